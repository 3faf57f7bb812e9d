use crate::error::{Error, Result};

pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
pub const QUADRATURE_MAX_DEPTH: u32 = 40;

/// Adaptive Simpson on `[a, b]` with the default tolerance and depth.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson(f, a, b, QUADRATURE_TOLERANCE, QUADRATURE_MAX_DEPTH)
}

/// Fails if a subinterval still misses its share of `tol` at `max_depth`
/// or the integrand returns a non-finite value.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let v = recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature { a, b })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::Quadrature { a, b });
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // below a few ulps of the local value the error estimate is roundoff
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature { a, b });
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        assert!((integrate(|x| x * x, 0.0, 3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((integrate(f64::sin, 0.0, std::f64::consts::PI).unwrap() - 2.0).abs() < 1e-10);
        assert!((integrate(|x| 1.0 / x, 1e-3, 1.0).unwrap() - 1e3f64.ln()).abs() < 1e-9);
        assert_eq!(integrate(|_| 0.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn large_values_near_a_pole() {
        let exact = 1e4 - 1.0;
        let v = integrate(|x| 1.0 / (x * x), 1e-4, 1.0).unwrap();
        assert!((v - exact).abs() < 1e-9 * exact, "{v}");
    }

    #[test]
    fn non_finite_integrand_fails() {
        assert!(integrate(|x| 1.0 / (x - 0.375), 0.0, 1.0).is_err());
    }
}
