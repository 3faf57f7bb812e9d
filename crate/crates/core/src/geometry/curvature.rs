use nalgebra::DMatrix;
use ndarray::{Array3, Array4};
use serde::Serialize;

use super::{PointGeometry, Signature};
use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::tensor::{max_abs, ricci_contraction, DEGENERACY_THRESHOLD};

/// `|K|` below this at every sample counts as flat.
pub const FLATNESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RiemannValue {
    /// See [`crate::tensor::INDEX_CONVENTION`] for slot order.
    pub components: Array4<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl RiemannValue {
    pub fn from_components(components: Array4<f64>, inverse: &DMatrix<f64>) -> Self {
        let ricci = ricci_contraction(&components, inverse);
        let scalar = inverse.component_mul(&ricci).sum();
        RiemannValue {
            components,
            ricci,
            scalar,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.shape()[0]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.components.iter())
    }

    /// Sectional curvature of the plane spanned by `x` and `y`.
    pub fn sectional(&self, metric: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        num += self.components[[i, j, k, l]] * x[i] * y[j] * x[k] * y[l];
                    }
                }
            }
        }
        let g = |a: &[f64], b: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += a[i] * metric[(i, j)] * b[j];
                }
            }
            s
        };
        num / (g(x, x) * g(y, y) - g(x, y).powi(2))
    }

    /// Largest violation among antisymmetry in each index pair, pair
    /// symmetry and the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.components;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r[[i, j, k, l]];
                        worst = worst
                            .max((v + r[[j, i, k, l]]).abs())
                            .max((v + r[[i, j, l, k]]).abs())
                            .max((v - r[[k, l, i, j]]).abs())
                            .max((v + r[[i, k, l, j]] + r[[i, l, j, k]]).abs());
                    }
                }
            }
        }
        worst
    }
}

fn closed_form_components(lower: &Array3<f64>, raised: &Array3<f64>) -> Array4<f64> {
    let n = lower.shape()[0];
    Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
        let mut s = 0.0;
        for m in 0..n {
            s += raised[[i, l, m]] * lower[[j, k, m]] - raised[[i, k, m]] * lower[[j, l, m]];
        }
        0.25 * s
    })
}

/// `4 R_{ijkl} = A_{il}^m A_{jkm} - A_{ik}^m A_{jlm}`, with Ricci and scalar
/// curvature by contraction. Works for any nondegenerate signature.
pub fn riemann_closed_form(chart: &PotentialChart, p: &[f64]) -> Result<RiemannValue> {
    let g = PointGeometry::at(chart, p)?;
    Ok(riemann_from_geometry(&g))
}

pub(crate) fn riemann_from_geometry(g: &PointGeometry) -> RiemannValue {
    RiemannValue::from_components(closed_form_components(&g.ac.lower, &g.ac.raised), &g.inverse)
}

fn require_riemannian(g: &PointGeometry) -> Result<()> {
    if g.metric.is_riemannian() {
        Ok(())
    } else {
        let Signature { positive, negative } = g.metric.signature;
        Err(Error::UnsupportedSignature { positive, negative })
    }
}

#[derive(Debug, Clone)]
pub struct OrthonormalRicci {
    /// Columns are an `h`-orthonormal frame.
    pub frame: DMatrix<f64>,
    /// Ricci tensor in that frame from the trace formula.
    pub ricci: DMatrix<f64>,
    /// Max deviation from the closed-form Ricci transported to the frame.
    pub consistency_residual: f64,
}

/// `4 Ric_ij = tr(A_i A_j) - Σ_k tr(A_k) A_ijk` in an orthonormal frame
/// obtained from a Cholesky factorization of `h`. Riemannian metrics only.
pub fn ricci_orthonormal(chart: &PotentialChart, p: &[f64]) -> Result<OrthonormalRicci> {
    let g = PointGeometry::at(chart, p)?;
    require_riemannian(&g)?;
    let n = g.dim();
    let chol = g
        .metric
        .matrix
        .clone()
        .cholesky()
        .ok_or(Error::UnsupportedSignature {
            positive: g.metric.signature.positive,
            negative: g.metric.signature.negative,
        })?;
    let frame = chol
        .l()
        .transpose()
        .try_inverse()
        .expect("Cholesky factor of a positive definite matrix is invertible");
    let a = &g.ac.lower;
    let framed = Array3::from_shape_fn((n, n, n), |(a_, b_, c_)| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += a[[i, j, k]] * frame[(i, a_)] * frame[(j, b_)] * frame[(k, c_)];
                }
            }
        }
        s
    });
    let slice = |k: usize| DMatrix::from_fn(n, n, |i, j| framed[[i, j, k]]);
    let slices: Vec<_> = (0..n).map(slice).collect();
    let traces: Vec<f64> = slices.iter().map(|m| m.trace()).collect();
    let ricci = DMatrix::from_fn(n, n, |i, j| {
        let mut v = (&slices[i] * &slices[j]).trace();
        for k in 0..n {
            v -= traces[k] * framed[[i, j, k]];
        }
        0.25 * v
    });
    let transported = frame.transpose() * riemann_from_geometry(&g).ricci * &frame;
    let consistency_residual = (&ricci - transported).abs().max();
    Ok(OrthonormalRicci {
        frame,
        ricci,
        consistency_residual,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RicciBound {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `-(n-1)/2 |A|² h(X,X) ≤ Ric(X,X) ≤ (n-1)/4 |A|² h(X,X)`.
///
/// The ordering is tested with a slack of `1e-10` relative to the size of
/// the bounds; in two dimensions both bounds can be attained.
pub fn ricci_bound_check(chart: &PotentialChart, p: &[f64], x: &[f64]) -> Result<RicciBound> {
    let g = PointGeometry::at(chart, p)?;
    require_riemannian(&g)?;
    let n = g.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("X must be nonzero".into()));
    }
    let ric = riemann_from_geometry(&g).ricci;
    let hinv = &g.inverse;
    let a = &g.ac.lower;
    // |A|² = A_ijk A_lmn h^il h^jm h^kn
    let mut norm2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    for m in 0..n {
                        for q in 0..n {
                            s += a[[l, m, q]] * hinv[(i, l)] * hinv[(j, m)] * hinv[(k, q)];
                        }
                    }
                }
                norm2 += a[[i, j, k]] * s;
            }
        }
    }
    let hxx = g.metric.inner(x, x);
    let mut value = 0.0;
    for i in 0..n {
        for j in 0..n {
            value += x[i] * ric[(i, j)] * x[j];
        }
    }
    let nm1 = (n - 1) as f64;
    let lower = -nm1 / 2.0 * norm2 * hxx;
    let upper = nm1 / 4.0 * norm2 * hxx;
    let slack = 1e-10 * (norm2 * hxx).abs().max(1.0);
    Ok(RicciBound {
        lower,
        value,
        upper,
        holds: lower - slack <= value && value <= upper + slack,
    })
}

/// Gaussian curvature of a 2D Hessian metric from second and third partials:
/// `K = -det[[fxx, fxxx, fxxy], [fxy, fxxy, fxyy], [fyy, fxyy, fyyy]] / (4 det(Hess f)²)`.
pub fn gaussian_curvature_2d(chart: &PotentialChart, p: &[f64]) -> Result<f64> {
    if chart.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "Gaussian curvature needs a 2D chart, got dimension {}",
            chart.dim()
        )));
    }
    let h = chart.hessian(p)?;
    let det = h.determinant();
    if det.abs() <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            det,
        });
    }
    let t = chart.third(p)?;
    let (fxxx, fxxy, fxyy, fyyy) = (t[[0, 0, 0]], t[[0, 0, 1]], t[[0, 1, 1]], t[[1, 1, 1]]);
    let m = DMatrix::from_row_slice(
        3,
        3,
        &[
            h[(0, 0)], fxxx, fxxy, //
            h[(0, 1)], fxxy, fxyy, //
            h[(1, 1)], fxyy, fyyy,
        ],
    );
    Ok(-m.determinant() / (4.0 * det * det))
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessVerdict {
    pub flat: bool,
    pub max_abs_curvature: f64,
    pub curvatures: Vec<(Vec<f64>, f64)>,
    /// Samples skipped because the Hessian is degenerate there.
    pub excluded: Vec<Vec<f64>>,
}

/// Flat iff `|K| < 1e-8` at every nondegenerate sample; this is the
/// pointwise form of the homogeneous-relation criterion on `(f_xx, f_xy, f_yy)`.
pub fn flatness_test_2d(chart: &PotentialChart, samples: &[Vec<f64>]) -> Result<FlatnessVerdict> {
    let mut curvatures = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    for p in samples {
        match gaussian_curvature_2d(chart, p) {
            Ok(k) => curvatures.push((p.clone(), k)),
            Err(Error::DegenerateMetric { .. }) => excluded.push(p.clone()),
            Err(e) => return Err(e),
        }
    }
    if let (true, Some(p)) = (curvatures.is_empty(), excluded.first()) {
        return Err(Error::DegenerateMetric {
            point: p.clone(),
            det: chart.hessian(p)?.determinant(),
        });
    }
    if curvatures.is_empty() {
        return Err(Error::InvalidArgument("no samples for the flatness test".into()));
    }
    let max_abs_curvature = curvatures.iter().fold(0.0_f64, |m, (_, k)| m.max(k.abs()));
    Ok(FlatnessVerdict {
        flat: max_abs_curvature < FLATNESS_TOLERANCE,
        max_abs_curvature,
        curvatures,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic2() -> PotentialChart {
        PotentialChart::parse(&["y1", "y2"], "y1^2/(8*y2) - 0.25*log(y2)", &["y2"]).unwrap()
    }

    fn cone3() -> PotentialChart {
        PotentialChart::parse(
            &["x", "y", "t"],
            "-0.5*log(t^2 - x^2 - y^2)",
            &["t^2 - x^2 - y^2", "t"],
        )
        .unwrap()
    }

    #[test]
    fn quadratic_is_flat() {
        let c = PotentialChart::parse(&["x", "y", "z"], "x^2 + y^2 + x*z + 3*z^2", &[]).unwrap();
        let r = riemann_closed_form(&c, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r.scalar, 0.0);
    }

    #[test]
    fn hyperbolic_sectional_curvature() {
        let c = hyperbolic2();
        let p = [0.0, 1.0];
        let r = riemann_closed_form(&c, &p).unwrap();
        let h = c.hessian(&p).unwrap();
        assert!((r.components[[0, 1, 0, 1]] / h.determinant() + 1.0).abs() < 1e-12);
        assert!((r.sectional(&h, &[1.0, 0.0], &[0.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((r.scalar + 2.0).abs() < 1e-12);
        assert!(r.symmetry_residual() < 1e-12);
    }

    #[test]
    fn cone_scalar_and_block_curvature() {
        let c = cone3();
        let p = [0.0, 0.0, 1.0];
        let r = riemann_closed_form(&c, &p).unwrap();
        assert!((r.scalar + 2.0).abs() < 1e-12);
        let h = c.hessian(&p).unwrap();
        // plane orthogonal to the radial direction (0,0,1)
        assert!((r.sectional(&h, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]) + 1.0).abs() < 1e-12);
        assert!(r.sectional(&h, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_ricci_examples() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let r = ricci_orthonormal(&q, &[0.3, 0.4]).unwrap();
        assert_eq!(r.ricci.abs().max(), 0.0);

        let r = ricci_orthonormal(&hyperbolic2(), &[0.0, 1.0]).unwrap();
        let expected = -DMatrix::<f64>::identity(2, 2);
        assert!((&r.ricci - expected).abs().max() < 1e-12);
        assert!(r.consistency_residual < 1e-9);

        let orthant = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let r = ricci_orthonormal(&orthant, &[1.0, 1.0]).unwrap();
        assert!(r.ricci.abs().max() < 1e-12);
    }

    #[test]
    fn orthonormal_ricci_rejects_lorentzian() {
        let c = PotentialChart::parse(&["x", "y"], "x^3 - 3*x*y^2", &[]).unwrap();
        assert!(matches!(
            ricci_orthonormal(&c, &[1.0, 0.0]),
            Err(Error::UnsupportedSignature { positive: 1, negative: 1 })
        ));
        assert!(matches!(
            ricci_bound_check(&c, &[1.0, 0.0], &[1.0, 0.0]),
            Err(Error::UnsupportedSignature { .. })
        ));
    }

    #[test]
    fn ricci_bound_examples() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let b = ricci_bound_check(&q, &[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert_eq!((b.lower, b.value, b.upper), (0.0, 0.0, 0.0));
        assert!(b.holds);

        let b = ricci_bound_check(&hyperbolic2(), &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        // h(e1,e1) = 1/4 and Ric = -h
        assert!((b.value + 0.25).abs() < 1e-12);
        assert!(b.holds);

        let b = ricci_bound_check(&cone3(), &[0.0, 0.0, 1.0], &[0.6, 0.0, 0.8]).unwrap();
        assert!(b.holds);
        assert!(ricci_bound_check(&q, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn gaussian_curvature_examples() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        assert_eq!(gaussian_curvature_2d(&q, &[1.0, 1.0]).unwrap(), 0.0);

        let polar = PotentialChart::parse(&["x", "y"], "x^2/(2*y) + 0.25*log(y)*y", &["y"]).unwrap();
        assert!(gaussian_curvature_2d(&polar, &[0.0, 1.0]).unwrap().abs() < 1e-14);

        assert!((gaussian_curvature_2d(&hyperbolic2(), &[0.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);

        assert!(gaussian_curvature_2d(&cone3(), &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn flatness_examples() {
        let samples: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![0.6 + 0.1 * i as f64, 0.4 + 0.15 * i as f64])
            .collect();

        let sextic = PotentialChart::parse(&["x", "y"], "x^6 + y^6 - 10*x^3*y^3", &["x", "y"]).unwrap();
        let v = flatness_test_2d(&sextic, &samples).unwrap();
        assert!(v.flat, "{v:?}");

        let harmonic = PotentialChart::parse(&["x", "y"], "x^3 - 3*x*y^2", &[]).unwrap();
        assert!(flatness_test_2d(&harmonic, &samples).unwrap().flat);

        // x^4 + y^4 is homogeneous (and separable), hence flat as well; K(1,1)
        // evaluates to exactly zero through the determinant formula.
        let quartic = PotentialChart::parse(&["x", "y"], "x^4 + y^4", &["x", "y"]).unwrap();
        assert_eq!(gaussian_curvature_2d(&quartic, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(flatness_test_2d(&quartic, &samples).unwrap().flat);

        let curved = PotentialChart::parse(&["x", "y"], "x^4 + y^4 + x*y", &["x", "y"]).unwrap();
        let v = flatness_test_2d(&curved, &samples).unwrap();
        assert!(!v.flat);
        assert!(v.max_abs_curvature > 1e-3);
    }

    #[test]
    fn flatness_excludes_degenerate_points() {
        let harmonic = PotentialChart::parse(&["x", "y"], "x^3 - 3*x*y^2", &[]).unwrap();
        let v = flatness_test_2d(&harmonic, &[vec![0.0, 0.0], vec![1.0, 0.5]]).unwrap();
        assert_eq!(v.excluded, vec![vec![0.0, 0.0]]);
        assert!(v.flat);
    }
}
