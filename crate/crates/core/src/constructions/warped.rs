use nalgebra::DMatrix;
use serde::Serialize;

use super::quadrature::integrate;
use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};

/// Warp data over a base chart: `f(t)` with `f' ≠ 0` and its inverse `F`,
/// both written in the single variable `t`.
#[derive(Debug, Clone)]
pub struct WarpedSpec {
    pub base: PotentialChart,
    pub warp: Expr,
    pub inverse: Expr,
    warp_prime: Expr,
    inverse_prime: Expr,
}

pub const WARP_VARIABLE: &str = "t";

impl WarpedSpec {
    pub fn new(base: PotentialChart, warp: Expr, inverse: Expr) -> Result<Self> {
        if warp.min_dimension() > 1 || inverse.min_dimension() > 1 {
            return Err(Error::InvalidArgument(
                "warp and inverse must depend on the single variable t".into(),
            ));
        }
        let warp_prime = warp.differentiate(0)?;
        let inverse_prime = inverse.differentiate(0)?;
        Ok(WarpedSpec {
            base,
            warp,
            inverse,
            warp_prime,
            inverse_prime,
        })
    }

    pub fn parse(base: PotentialChart, warp: &str, inverse: &str) -> Result<Self> {
        let warp = parse(warp, &[WARP_VARIABLE])?;
        let inverse = parse(inverse, &[WARP_VARIABLE])?;
        WarpedSpec::new(base, warp, inverse)
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + 1
    }

    pub fn warp_at(&self, t: f64) -> Result<f64> {
        Ok(self.warp.eval(&[t])?)
    }

    pub fn warp_prime_at(&self, t: f64) -> Result<f64> {
        Ok(self.warp_prime.eval(&[t])?)
    }

    pub fn inverse_prime_at(&self, s: f64) -> Result<f64> {
        Ok(self.inverse_prime.eval(&[s])?)
    }

    /// `max |f(F(s)) - s|` over `s = f(t)` for the given `t` values.
    pub fn inverse_residual(&self, ts: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &t in ts {
            let s = self.warp_at(t)?;
            let back = self.warp.eval(&[self.inverse.eval(&[s])?])?;
            worst = worst.max((back - s).abs());
        }
        Ok(worst)
    }

    /// `(x, t) ↦ (e^f x, e^f)`.
    pub fn to_y(&self, xt: &[f64]) -> Result<Vec<f64>> {
        let n = self.base.dim();
        self.check_xt(xt)?;
        let e = self.warp_at(xt[n])?.exp();
        let mut y: Vec<f64> = xt[..n].iter().map(|x| e * x).collect();
        y.push(e);
        Ok(y)
    }

    fn check_xt(&self, xt: &[f64]) -> Result<()> {
        if xt.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xt.len(),
            });
        }
        Ok(())
    }

    /// `∂²_y` of the integral term, `F'(log y)² / y²`.
    pub fn integral_second_derivative(&self, y: f64) -> Result<f64> {
        let fp = self.inverse_prime_at(y.ln())?;
        Ok(fp * fp / (y * y))
    }

    /// Hessian of `φ̂` in `y` coordinates; the integral term enters only
    /// through its second derivative.
    pub fn potential_hessian(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.base.dim();
        let yy = y[n];
        if !(yy > 0.0) {
            return Err(Error::NotAdmissible(y.to_vec()));
        }
        let z: Vec<f64> = y[..n].iter().map(|v| v / yy).collect();
        let hphi = self.base.hessian(&z)?;
        let hz = &hphi * nalgebra::DVector::from_column_slice(&z);
        let mut out = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = hphi[(i, j)] / yy;
            }
            out[(i, n)] = -hz[i] / yy;
            out[(n, i)] = -hz[i] / yy;
        }
        let zhz: f64 = z.iter().zip(hz.iter()).map(|(a, b)| a * b).sum();
        out[(n, n)] = zhz / yy + self.integral_second_derivative(yy)?;
        Ok(out)
    }

    /// Jacobian of `(x, t) ↦ y`, columns ordered `(x_1..x_n, t)`.
    pub fn jacobian(&self, xt: &[f64]) -> Result<DMatrix<f64>> {
        self.check_xt(xt)?;
        let n = self.base.dim();
        let t = xt[n];
        let e = self.warp_at(t)?.exp();
        let fp = self.warp_prime_at(t)?;
        let mut j = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            j[(i, i)] = e;
            j[(i, n)] = fp * e * xt[i];
        }
        j[(n, n)] = fp * e;
        Ok(j)
    }

    /// Builds `φ̂` as a chart in `y` coordinates given an explicit
    /// expression for the integral term in the variable `y`. Only its second
    /// derivative matters for the metric; see [`Self::integral_term_residual`].
    pub fn warped_chart(&self, integral_term: &Expr) -> Result<PotentialChart> {
        let n = self.base.dim();
        let mut names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
        names.push("y".into());
        let y = Expr::var(n, "y");
        let subs: Vec<Expr> = (0..n)
            .map(|i| Expr::var(i, names[i].as_str()) / y.clone())
            .collect();
        let perspective = self.base.potential().substitute(&subs) * y.clone();
        let integral = integral_term.substitute(&[y.clone()]);
        let mut domain: Vec<Expr> = self.base.domain().iter().map(|d| d.substitute(&subs)).collect();
        domain.push(y);
        PotentialChart::new(names, perspective + integral, domain)
    }

    /// `max |J'' - F'(log y)²/y²|` over the given `y` values.
    pub fn integral_term_residual(&self, integral_term: &Expr, ys: &[f64]) -> Result<f64> {
        let d2 = integral_term.differentiate(0)?.differentiate(0)?;
        let mut worst: f64 = 0.0;
        for &y in ys {
            worst = worst.max((d2.eval(&[y])? - self.integral_second_derivative(y)?).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WarpedMetricCheck {
    pub residual: f64,
    pub pulled_back: Vec<Vec<f64>>,
    pub expected: Vec<Vec<f64>>,
}

/// `max |Jᵀ Hess(φ̂) J - (dt² + e^f Hess φ)|` at a point `(x, t)`.
pub fn warped_metric_check(spec: &WarpedSpec, xt: &[f64]) -> Result<WarpedMetricCheck> {
    spec.check_xt(xt)?;
    let n = spec.base.dim();
    let t = xt[n];
    let fp = spec.warp_prime_at(t)?;
    if fp == 0.0 {
        return Err(Error::InvalidArgument(format!("f'(t) vanishes at t = {t}")));
    }
    let x = &xt[..n];
    spec.base.check_point(x)?;
    let y = spec.to_y(xt)?;
    let j = spec.jacobian(xt)?;
    let pulled = j.transpose() * spec.potential_hessian(&y)? * &j;
    let e = spec.warp_at(t)?.exp();
    let hphi = spec.base.hessian(x)?;
    let mut expected = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for k in 0..n {
            expected[(i, k)] = e * hphi[(i, k)];
        }
    }
    expected[(n, n)] = 1.0;
    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    };
    Ok(WarpedMetricCheck {
        residual: (&pulled - &expected).abs().max(),
        pulled_back: rows(&pulled),
        expected: rows(&expected),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IntegralStatus {
    Convergent { limit: f64 },
    DivergentIntegral { partial: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedIntegral {
    pub epsilon: f64,
    /// Integral over `[ε/2^k, y]` for `k = 0, 1, 2`.
    pub truncations: [f64; 3],
    pub status: IntegralStatus,
}

/// Ratio of successive truncation differences above which the `ε → 0`
/// limit is declared divergent. A tail behaving like `s^a` has ratio
/// `2^-(a+1)`; logarithmic and worse divergence give ratios of 1 or more.
pub const DIVERGENCE_RATIO: f64 = 0.75;

/// Keeps halving the lower limit until the added piece is negligible, then
/// adds the geometric tail estimate of the remaining pieces.
fn refine_limit(
    integrand: &impl Fn(f64) -> f64,
    mut lower: f64,
    mut total: f64,
    mut last: f64,
    negligible: f64,
) -> Result<f64> {
    for _ in 0..64 {
        if last.abs() <= negligible {
            break;
        }
        let piece = integrate(integrand, lower / 2.0, lower)?;
        let r = piece / last;
        total += piece;
        lower /= 2.0;
        if r > 0.0 && r < 1.0 && (piece * r / (1.0 - r)).abs() <= negligible {
            return Ok(total + piece * r / (1.0 - r));
        }
        last = piece;
    }
    Ok(total)
}

/// Integral of `integrand` over `[ε, y]`, `[ε/2, y]`, `[ε/4, y]` with a
/// convergence verdict and a geometric extrapolation of the limit.
pub fn truncated_integral(integrand: impl Fn(f64) -> f64, y: f64, epsilon: f64) -> Result<TruncatedIntegral> {
    if !(epsilon > 0.0) || !(y > epsilon) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < epsilon < y, got epsilon = {epsilon}, y = {y}"
        )));
    }
    let i0 = integrate(&integrand, epsilon, y)?;
    let i1 = i0 + integrate(&integrand, epsilon / 2.0, epsilon)?;
    let i2 = i1 + integrate(&integrand, epsilon / 4.0, epsilon / 2.0)?;
    let d1 = i1 - i0;
    let d2 = i2 - i1;
    let negligible = 1e-12 * i2.abs().max(1.0);
    let convergent = d2.abs() <= negligible || (d1 != 0.0 && d2 / d1 > 0.0 && d2 / d1 <= DIVERGENCE_RATIO);
    let status = if convergent {
        IntegralStatus::Convergent {
            limit: refine_limit(&integrand, epsilon / 4.0, i2, d2, negligible)?,
        }
    } else {
        IntegralStatus::DivergentIntegral { partial: i2 }
    };
    Ok(TruncatedIntegral {
        epsilon,
        truncations: [i0, i1, i2],
        status,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WarpedPotentialValue {
    pub perspective: f64,
    pub integral: TruncatedIntegral,
}

impl WarpedPotentialValue {
    /// `φ̂` with the extrapolated integral, or `None` when it diverges.
    pub fn value(&self) -> Option<f64> {
        match self.integral.status {
            IntegralStatus::Convergent { limit } => Some(self.perspective + limit),
            IntegralStatus::DivergentIntegral { .. } => None,
        }
    }
}

/// `φ̂(y) = y φ(y_i / y) + ∫_0^y F'(log s)² (y - s) s⁻² ds` at a point in
/// `y` coordinates, with the integral truncated at `ε`.
pub fn warped_potential_value(spec: &WarpedSpec, y: &[f64], epsilon: f64) -> Result<WarpedPotentialValue> {
    if y.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: y.len(),
        });
    }
    let n = spec.base.dim();
    let yy = y[n];
    if !(yy > 0.0) {
        return Err(Error::NotAdmissible(y.to_vec()));
    }
    let z: Vec<f64> = y[..n].iter().map(|v| v / yy).collect();
    let perspective = yy * spec.base.value(&z)?;
    let integrand = |s: f64| match spec.inverse_prime.eval(&[s.ln()]) {
        Ok(fp) => fp * fp * (yy - s) / (s * s),
        Err(_) => f64::NAN,
    };
    Ok(WarpedPotentialValue {
        perspective,
        integral: truncated_integral(integrand, yy, epsilon)?,
    })
}
