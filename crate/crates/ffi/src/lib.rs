//! C interface to `hessian-core`.
//!
//! Charts and Monge-Ampere solutions are opaque handles created and freed
//! here. Every fallible call returns a [`HessianStatus`]; the message of the
//! last failure on the calling thread is available from
//! [`hessian_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hessian_core::geometry::{hessian_metric, koszul_form, riemann_closed_form, PointGeometry};
use hessian_core::monge_ampere::{self, Cone, ConeProblem, MASolution, Window};
use hessian_core::report::ExitCode;
use hessian_core::{Error, PotentialChart};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad expression, chart or argument.
    InvalidInput = 3,
    /// The point is outside the domain or the metric degenerates there.
    Numerical = 4,
    /// The output buffer is shorter than required.
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianCone {
    Orthant = 0,
    Lorentz = 1,
}

/// A potential on an affine chart.
pub struct HessianChart {
    inner: PotentialChart,
}

/// A finite-difference solution of the Cheng-Yau equation on a cone.
pub struct HessianSolution {
    inner: MASolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HessianStatus, message: impl Into<String>) -> HessianStatus {
    set_error(message.into());
    status
}

fn from_core(e: Error) -> HessianStatus {
    let status = match e.exit_code() {
        ExitCode::Numerical => HessianStatus::Numerical,
        _ => HessianStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics and core errors into status codes.
fn guard(f: impl FnOnce() -> Result<(), HessianStatus>) -> HessianStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HessianStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(HessianStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, HessianStatus> {
    if p.is_null() {
        return Err(fail(HessianStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(HessianStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn str_array<'a>(p: *const *const c_char, len: usize, what: &str) -> Result<Vec<&'a str>, HessianStatus> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(fail(HessianStatus::NullPointer, format!("{what} is NULL")));
    }
    (0..len).map(|i| str_arg(*p.add(i), what)).collect()
}

unsafe fn point_arg<'a>(chart: *const HessianChart, p: *const f64, n: usize) -> Result<(&'a PotentialChart, &'a [f64]), HessianStatus> {
    if chart.is_null() || p.is_null() {
        return Err(fail(HessianStatus::NullPointer, "chart or point is NULL"));
    }
    let chart = &(*chart).inner;
    if n != chart.dim() {
        return Err(from_core(Error::DimensionMismatch {
            expected: chart.dim(),
            got: n,
        }));
    }
    Ok((chart, std::slice::from_raw_parts(p, n)))
}

unsafe fn write_out(values: impl ExactSizeIterator<Item = f64>, out: *mut f64, out_len: usize) -> Result<(), HessianStatus> {
    if out.is_null() {
        return Err(fail(HessianStatus::NullPointer, "output buffer is NULL"));
    }
    let need = values.len();
    if out_len < need {
        return Err(fail(
            HessianStatus::BufferTooSmall,
            format!("output needs {need} doubles, buffer holds {out_len}"),
        ));
    }
    for (k, v) in values.enumerate() {
        *out.add(k) = v;
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL if none.
/// Free with [`hessian_string_free`].
#[no_mangle]
pub extern "C" fn hessian_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hessian_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn hessian_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a chart from variable names, a potential and domain expressions,
/// each of which must be positive on the chart.
///
/// # Safety
/// `names` holds `n_names` valid C strings, `domain` holds `n_domain`
/// (it may be NULL when `n_domain` is 0), and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_new(
    names: *const *const c_char,
    n_names: usize,
    potential: *const c_char,
    domain: *const *const c_char,
    n_domain: usize,
    out: *mut *mut HessianChart,
) -> HessianStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(HessianStatus::NullPointer, "out is NULL"));
        }
        *out = ptr::null_mut();
        let names = str_array(names, n_names, "names")?;
        let potential = str_arg(potential, "potential")?;
        let domain = str_array(domain, n_domain, "domain")?;
        let chart = PotentialChart::parse(&names, potential, &domain).map_err(from_core)?;
        *out = Box::into_raw(Box::new(HessianChart { inner: chart }));
        Ok(())
    })
}

/// # Safety
/// `chart` is NULL or came from [`hessian_chart_new`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_free(chart: *mut HessianChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Dimension of the chart, 0 for NULL.
///
/// # Safety
/// `chart` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_dim(chart: *const HessianChart) -> usize {
    chart.as_ref().map_or(0, |c| c.inner.dim())
}

/// Writes the Hessian metric at `p` to `out` row-major (`n*n` doubles).
/// A degenerate metric is not an error here.
///
/// # Safety
/// `p` holds `n` doubles and `out` holds `out_len`.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_metric(
    chart: *const HessianChart,
    p: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> HessianStatus {
    guard(|| {
        let (chart, p) = point_arg(chart, p, n)?;
        let m = hessian_metric(chart, p).map_err(from_core)?;
        write_out(m.matrix.transpose().iter().copied(), out, out_len)
    })
}

/// Writes the Amari-Chentsov tensor `A[i][j][k]` (third partials) at `p`,
/// `n*n*n` doubles with `k` fastest.
///
/// # Safety
/// `p` holds `n` doubles and `out` holds `out_len`.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_amari_chentsov(
    chart: *const HessianChart,
    p: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> HessianStatus {
    guard(|| {
        let (chart, p) = point_arg(chart, p, n)?;
        let a = chart.third(p).map_err(from_core)?;
        write_out(a.iter().copied(), out, out_len)
    })
}

/// Scalar curvature of the Hessian metric at `p`.
///
/// # Safety
/// `p` holds `n` doubles and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_scalar_curvature(
    chart: *const HessianChart,
    p: *const f64,
    n: usize,
    out: *mut f64,
) -> HessianStatus {
    guard(|| {
        let (chart, p) = point_arg(chart, p, n)?;
        let r = riemann_closed_form(chart, p).map_err(from_core)?;
        write_out(std::iter::once(r.scalar), out, 1)
    })
}

/// Writes the Koszul form `½ d log|det h|` at `p` (`n` doubles).
///
/// # Safety
/// `p` holds `n` doubles and `out` holds `out_len`.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_koszul_form(
    chart: *const HessianChart,
    p: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> HessianStatus {
    guard(|| {
        let (chart, p) = point_arg(chart, p, n)?;
        let k = koszul_form(chart, p).map_err(from_core)?;
        write_out(k.covector.iter().copied(), out, out_len)
    })
}

/// Signature of the metric at `p`: counts of positive and negative
/// eigenvalues.
///
/// # Safety
/// `p` holds `n` doubles; `positive` and `negative` are writable.
#[no_mangle]
pub unsafe extern "C" fn hessian_chart_signature(
    chart: *const HessianChart,
    p: *const f64,
    n: usize,
    positive: *mut usize,
    negative: *mut usize,
) -> HessianStatus {
    guard(|| {
        let (chart, p) = point_arg(chart, p, n)?;
        if positive.is_null() || negative.is_null() {
            return Err(fail(HessianStatus::NullPointer, "output is NULL"));
        }
        let g = PointGeometry::at(chart, p).map_err(from_core)?;
        *positive = g.metric.signature.positive;
        *negative = g.metric.signature.negative;
        Ok(())
    })
}

/// Solves `det Hess u = e^{4u}` on `[a,b]×[c,d]` inside `cone` with
/// `resolution` interior nodes per direction and exact boundary values.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn hessian_cheng_yau_solve(
    cone: HessianCone,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    resolution: usize,
    out: *mut *mut HessianSolution,
) -> HessianStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(HessianStatus::NullPointer, "out is NULL"));
        }
        *out = ptr::null_mut();
        let cone = match cone {
            HessianCone::Orthant => Cone::Orthant,
            HessianCone::Lorentz => Cone::Lorentz,
        };
        let problem = ConeProblem::new(cone, Window::new(a, b, c, d), resolution).map_err(from_core)?;
        let sol = monge_ampere::solve(&problem).map_err(from_core)?;
        *out = Box::into_raw(Box::new(HessianSolution { inner: sol }));
        Ok(())
    })
}

/// # Safety
/// `sol` is NULL or came from [`hessian_cheng_yau_solve`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn hessian_solution_free(sol: *mut HessianSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Nodes per side of the full grid including the boundary, 0 for NULL.
///
/// # Safety
/// `sol` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hessian_solution_grid_size(sol: *const HessianSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.problem.resolution + 2)
}

/// Copies the grid values, row-major with the second coordinate as the
/// row index, boundary included.
///
/// # Safety
/// `out` holds `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hessian_solution_values(
    sol: *const HessianSolution,
    out: *mut f64,
    out_len: usize,
) -> HessianStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| fail(HessianStatus::NullPointer, "solution is NULL"))?;
        write_out(sol.inner.values.iter().copied(), out, out_len)
    })
}

/// Final Newton residual (max norm) and the largest nodal deviation from
/// the closed-form solution.
///
/// # Safety
/// `residual` and `max_error` are writable.
#[no_mangle]
pub unsafe extern "C" fn hessian_solution_errors(
    sol: *const HessianSolution,
    residual: *mut f64,
    max_error: *mut f64,
) -> HessianStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| fail(HessianStatus::NullPointer, "solution is NULL"))?;
        if residual.is_null() || max_error.is_null() {
            return Err(fail(HessianStatus::NullPointer, "output is NULL"));
        }
        *residual = sol.inner.residual_norm;
        *max_error = sol.inner.max_error().map_err(from_core)?;
        Ok(())
    })
}
