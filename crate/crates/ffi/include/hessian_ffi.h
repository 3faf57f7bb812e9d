#ifndef HESSIAN_FFI_H
#define HESSIAN_FFI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HessianStatus {
  HESSIAN_STATUS_OK = 0,
  HESSIAN_STATUS_NULL_POINTER = 1,
  HESSIAN_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad expression, chart or argument.
   */
  HESSIAN_STATUS_INVALID_INPUT = 3,
  /**
   * The point is outside the domain or the metric degenerates there.
   */
  HESSIAN_STATUS_NUMERICAL = 4,
  /**
   * The output buffer is shorter than required.
   */
  HESSIAN_STATUS_BUFFER_TOO_SMALL = 5,
  HESSIAN_STATUS_PANIC = 6,
} HessianStatus;

typedef enum HessianCone {
  HESSIAN_CONE_ORTHANT = 0,
  HESSIAN_CONE_LORENTZ = 1,
} HessianCone;

/**
 * A potential on an affine chart.
 */
typedef struct HessianChart HessianChart;

/**
 * A finite-difference solution of the Cheng-Yau equation on a cone.
 */
typedef struct HessianSolution HessianSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL if none.
 * Free with [`hessian_string_free`].
 */
char *hessian_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hessian_string_free(char *s);

/**
 * Static, NUL-terminated version string.
 */
const char *hessian_version(void);

/**
 * Builds a chart from variable names, a potential and domain expressions,
 * each of which must be positive on the chart.
 *
 * # Safety
 * `names` holds `n_names` valid C strings, `domain` holds `n_domain`
 * (it may be NULL when `n_domain` is 0), and `out` is writable.
 */
enum HessianStatus hessian_chart_new(const char *const *names,
                                     size_t n_names,
                                     const char *potential,
                                     const char *const *domain,
                                     size_t n_domain,
                                     struct HessianChart **out);

/**
 * # Safety
 * `chart` is NULL or came from [`hessian_chart_new`] and was not freed.
 */
void hessian_chart_free(struct HessianChart *chart);

/**
 * Dimension of the chart, 0 for NULL.
 *
 * # Safety
 * `chart` is NULL or a live handle.
 */
size_t hessian_chart_dim(const struct HessianChart *chart);

/**
 * Writes the Hessian metric at `p` to `out` row-major (`n*n` doubles).
 * A degenerate metric is not an error here.
 *
 * # Safety
 * `p` holds `n` doubles and `out` holds `out_len`.
 */
enum HessianStatus hessian_chart_metric(const struct HessianChart *chart,
                                        const double *p,
                                        size_t n,
                                        double *out,
                                        size_t out_len);

/**
 * Writes the Amari-Chentsov tensor `A[i][j][k]` (third partials) at `p`,
 * `n*n*n` doubles with `k` fastest.
 *
 * # Safety
 * `p` holds `n` doubles and `out` holds `out_len`.
 */
enum HessianStatus hessian_chart_amari_chentsov(const struct HessianChart *chart,
                                                const double *p,
                                                size_t n,
                                                double *out,
                                                size_t out_len);

/**
 * Scalar curvature of the Hessian metric at `p`.
 *
 * # Safety
 * `p` holds `n` doubles and `out` is writable.
 */
enum HessianStatus hessian_chart_scalar_curvature(const struct HessianChart *chart,
                                                  const double *p,
                                                  size_t n,
                                                  double *out);

/**
 * Writes the Koszul form `½ d log|det h|` at `p` (`n` doubles).
 *
 * # Safety
 * `p` holds `n` doubles and `out` holds `out_len`.
 */
enum HessianStatus hessian_chart_koszul_form(const struct HessianChart *chart,
                                             const double *p,
                                             size_t n,
                                             double *out,
                                             size_t out_len);

/**
 * Signature of the metric at `p`: counts of positive and negative
 * eigenvalues.
 *
 * # Safety
 * `p` holds `n` doubles; `positive` and `negative` are writable.
 */
enum HessianStatus hessian_chart_signature(const struct HessianChart *chart,
                                           const double *p,
                                           size_t n,
                                           size_t *positive,
                                           size_t *negative);

/**
 * Solves `det Hess u = e^{4u}` on `[a,b]×[c,d]` inside `cone` with
 * `resolution` interior nodes per direction and exact boundary values.
 *
 * # Safety
 * `out` is writable.
 */
enum HessianStatus hessian_cheng_yau_solve(enum HessianCone cone,
                                           double a,
                                           double b,
                                           double c,
                                           double d,
                                           size_t resolution,
                                           struct HessianSolution **out);

/**
 * # Safety
 * `sol` is NULL or came from [`hessian_cheng_yau_solve`] and was not freed.
 */
void hessian_solution_free(struct HessianSolution *sol);

/**
 * Nodes per side of the full grid including the boundary, 0 for NULL.
 *
 * # Safety
 * `sol` is NULL or a live handle.
 */
size_t hessian_solution_grid_size(const struct HessianSolution *sol);

/**
 * Copies the grid values, row-major with the second coordinate as the
 * row index, boundary included.
 *
 * # Safety
 * `out` holds `out_len` doubles.
 */
enum HessianStatus hessian_solution_values(const struct HessianSolution *sol,
                                           double *out,
                                           size_t out_len);

/**
 * Final Newton residual (max norm) and the largest nodal deviation from
 * the closed-form solution.
 *
 * # Safety
 * `residual` and `max_error` are writable.
 */
enum HessianStatus hessian_solution_errors(const struct HessianSolution *sol,
                                           double *residual,
                                           double *max_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HESSIAN_FFI_H */
