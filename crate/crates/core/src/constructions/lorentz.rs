//! The future light cone `{t > √(x² + y²)}` with `f = -½ log(t² - x² - y²)`,
//! parametrized by `(τ, ρ) ∈ H² × ℝ` through
//! `Φ(τ, ρ) = e^ρ / (2 Im τ) · (τ + τ̄, |τ|² - 1, |τ|² + 1)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::quadrature::integrate;
use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::geometry::riemann_closed_form;
use crate::tensor::DEGENERACY_THRESHOLD;

pub const CONE_POTENTIAL: &str = "-0.5*log(t^2 - x^2 - y^2)";

pub fn cone_chart() -> PotentialChart {
    PotentialChart::parse(&["x", "y", "t"], CONE_POTENTIAL, &["t^2 - x^2 - y^2", "t"])
        .expect("cone chart is valid")
}

/// `Φ` as expressions in `(a, b, ρ)` with `τ = a + ib`.
pub fn phi_expressions() -> Vec<Expr> {
    let vars = ["a", "b", "rho"];
    [
        "exp(rho)/(2*b) * (2*a)",
        "exp(rho)/(2*b) * (a^2 + b^2 - 1)",
        "exp(rho)/(2*b) * (a^2 + b^2 + 1)",
    ]
    .iter()
    .map(|s| parse(s, &vars).expect("static expression"))
    .collect()
}

pub fn phi(tau: (f64, f64), rho: f64) -> Vec<f64> {
    let (a, b) = tau;
    let s = rho.exp() / (2.0 * b);
    let m = a * a + b * b;
    vec![s * 2.0 * a, s * (m - 1.0), s * (m + 1.0)]
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometrySample {
    pub tau: (f64, f64),
    pub rho: f64,
    pub metric_residual: f64,
    /// `|Q(Φ) - e^{2ρ}| / e^{2ρ}`.
    pub q_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub max_metric_residual: f64,
    pub max_q_residual: f64,
    pub samples: Vec<IsometrySample>,
}

/// Pulls `Hess f` back through `Φ` and compares with `dρ² + |dτ|²/(Im τ)²`.
/// Any chart on `(x, y, t)` can be supplied; the cone chart should pass.
pub fn isometry_check(chart: &PotentialChart, samples: &[((f64, f64), f64)]) -> Result<IsometryReport> {
    if chart.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: chart.dim(),
        });
    }
    let phi_e = phi_expressions();
    let dphi: Vec<Vec<Expr>> = phi_e
        .iter()
        .map(|e| (0..3).map(|j| e.differentiate(j)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(samples.len());
    for &((a, b), rho) in samples {
        if !(b > 0.0) {
            return Err(Error::InvalidArgument(format!("Im τ must be positive, got {b}")));
        }
        let q = [a, b, rho];
        let point = phi_e.iter().map(|e| e.eval(&q)).collect::<Result<Vec<_>, _>>()?;
        let mut jac = DMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                jac[(i, j)] = dphi[i][j].eval(&q)?;
            }
        }
        let pulled = jac.transpose() * chart.hessian(&point)? * &jac;
        let target = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (b * b), 1.0 / (b * b), 1.0]));
        let qv = point[2] * point[2] - point[0] * point[0] - point[1] * point[1];
        let e2 = (2.0 * rho).exp();
        out.push(IsometrySample {
            tau: (a, b),
            rho,
            metric_residual: (pulled - target).abs().max(),
            q_residual: (qv - e2).abs() / e2,
        });
    }
    Ok(IsometryReport {
        max_metric_residual: out.iter().map(|s| s.metric_residual).fold(0.0, f64::max),
        max_q_residual: out.iter().map(|s| s.q_residual).fold(0.0, f64::max),
        samples: out,
    })
}

pub fn lorentz_isometry_check(samples: &[((f64, f64), f64)]) -> Result<IsometryReport> {
    isometry_check(&cone_chart(), samples)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConeCurvature {
    /// Sectional curvature of the plane `h`-orthogonal to the position vector.
    pub hyperbolic_block: f64,
    /// Largest `|K|` over planes containing the position vector, sampled on
    /// the coordinate-adapted basis.
    pub radial_planes: f64,
    pub scalar: f64,
}

/// Curvature split along the product structure `H² × ℝ` at a cone point.
pub fn cone_curvature(chart: &PotentialChart, p: &[f64]) -> Result<ConeCurvature> {
    let r = riemann_closed_form(chart, p)?;
    let h = chart.hessian(p)?;
    let radial = DVector::from_column_slice(p);
    // Gram-Schmidt of the coordinate basis against the radial direction in h.
    let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &h * v)[(0, 0)];
    let mut basis: Vec<DVector<f64>> = vec![radial.clone()];
    for k in 0..3 {
        let mut v = DVector::zeros(3);
        v[k] = 1.0;
        for b in &basis {
            v -= b * (ip(b, &v) / ip(b, b));
        }
        if ip(&v, &v).abs().sqrt() > 1e-8 {
            basis.push(v);
        }
        if basis.len() == 3 {
            break;
        }
    }
    if basis.len() < 3 || ip(&radial, &radial).abs() <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            det: h.determinant(),
        });
    }
    let (e1, e2) = (&basis[1], &basis[2]);
    let sec = |u: &DVector<f64>, v: &DVector<f64>| r.sectional(&h, u.as_slice(), v.as_slice());
    Ok(ConeCurvature {
        hyperbolic_block: sec(e1, e2),
        radial_planes: sec(&radial, e1).abs().max(sec(&radial, e2).abs()),
        scalar: r.scalar,
    })
}

/// A curve `[0, 1] → chart` given by one expression per coordinate in the
/// parameter `s`.
#[derive(Debug, Clone)]
pub struct LoopPath {
    pub components: Vec<Expr>,
    velocity: Vec<Expr>,
}

pub const PATH_PARAMETER: &str = "s";

impl LoopPath {
    pub fn new(components: Vec<Expr>) -> Result<Self> {
        if components.iter().any(|c| c.min_dimension() > 1) {
            return Err(Error::InvalidArgument(
                "path components must depend only on the parameter s".into(),
            ));
        }
        let velocity = components
            .iter()
            .map(|c| c.differentiate(0))
            .collect::<Result<_, _>>()?;
        Ok(LoopPath {
            components,
            velocity,
        })
    }

    pub fn parse(components: &[&str]) -> Result<Self> {
        let c = components
            .iter()
            .map(|s| parse(s, &[PATH_PARAMETER]))
            .collect::<Result<Vec<_>, _>>()?;
        LoopPath::new(c)
    }

    pub fn point(&self, s: f64) -> Result<Vec<f64>> {
        Ok(self
            .components
            .iter()
            .map(|c| c.eval(&[s]))
            .collect::<Result<Vec<_>, _>>()?)
    }

    pub fn velocity(&self, s: f64) -> Result<Vec<f64>> {
        Ok(self
            .velocity
            .iter()
            .map(|c| c.eval(&[s]))
            .collect::<Result<Vec<_>, _>>()?)
    }

    pub fn endpoints(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((self.point(0.0)?, self.point(1.0)?))
    }
}

/// `∫_γ η` by adaptive Simpson on `η(γ(s))·γ'(s)`. The path is sampled at
/// 65 points first and must stay admissible.
pub fn loop_period(chart: &PotentialChart, eta: &[Expr], path: &LoopPath) -> Result<f64> {
    let n = chart.dim();
    if eta.len() != n || path.components.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if eta.len() != n { eta.len() } else { path.components.len() },
        });
    }
    for k in 0..=64 {
        chart.check_point(&path.point(k as f64 / 64.0)?)?;
    }
    let integrand = |s: f64| -> f64 {
        let (Ok(p), Ok(v)) = (path.point(s), path.velocity(s)) else {
            return f64::NAN;
        };
        let mut acc = 0.0;
        for (e, vi) in eta.iter().zip(&v) {
            match e.eval(&p) {
                Ok(x) => acc += x * vi,
                Err(_) => return f64::NAN,
            }
        }
        acc
    };
    integrate(integrand, 0.0, 1.0)
}

/// The deck-translated path `s ↦ Φ(i, s)` from `Φ(i, 0)` to `Φ(i, 1)`.
pub fn deck_path() -> LoopPath {
    LoopPath::parse(&["0", "0", "exp(s)"]).expect("static path")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::differential;

    #[test]
    fn symmetric_point() {
        assert_eq!(phi((0.0, 1.0), 0.0), vec![0.0, 0.0, 1.0]);
        let r = lorentz_isometry_check(&[((0.0, 1.0), 0.0)]).unwrap();
        assert!(r.max_metric_residual < 1e-10);
        let r = lorentz_isometry_check(&[((0.0, 1.0), 1.0)]).unwrap();
        assert!(r.max_q_residual < 1e-14);
    }

    #[test]
    fn generic_samples() {
        let s = [((0.3, 0.7), -0.4), ((-1.2, 2.5), 0.8), ((2.0, 0.3), 0.1)];
        let r = lorentz_isometry_check(&s).unwrap();
        assert!(r.max_metric_residual < 1e-8, "{r:?}");
        assert!(r.max_q_residual < 1e-12);
    }

    #[test]
    fn corrupted_sign_fails() {
        let bad = PotentialChart::parse(&["x", "y", "t"], "0.5*log(t^2 - x^2 - y^2)", &["t^2 - x^2 - y^2", "t"])
            .unwrap();
        let r = isometry_check(&bad, &[((0.0, 1.0), 0.0)]).unwrap();
        assert!(r.max_metric_residual > 1.0);
    }

    #[test]
    fn cone_curvature_split() {
        let c = cone_chart();
        for p in [[0.0, 0.0, 1.0], [0.3, -0.5, 1.4], [2.0, 1.0, 3.0]] {
            let k = cone_curvature(&c, &p).unwrap();
            assert!((k.hyperbolic_block + 1.0).abs() < 1e-10, "{k:?}");
            assert!(k.radial_planes < 1e-10);
            assert!((k.scalar + 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn negated_potential_does_not_panic() {
        let bad = PotentialChart::parse(&["x", "y", "t"], "0.5*log(t^2 - x^2 - y^2)", &["t^2 - x^2 - y^2", "t"])
            .unwrap();
        let k = cone_curvature(&bad, &[0.3, -0.5, 1.4]).unwrap();
        assert!((k.hyperbolic_block + 1.0).abs() > 0.5);
    }

    #[test]
    fn deck_translation_period() {
        let c = cone_chart();
        let df = differential(&c).unwrap();
        let v = loop_period(&c, &df, &deck_path()).unwrap();
        assert!((v + 1.0).abs() < 1e-8, "{v}");
        let (a, b) = deck_path().endpoints().unwrap();
        assert!((v - (c.value(&b).unwrap() - c.value(&a).unwrap())).abs() < 1e-8);
    }

    #[test]
    fn angular_form_period() {
        let plane = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &["x^2 + y^2"]).unwrap();
        let eta = vec![
            plane.parse_expr("-y/(x^2 + y^2)").unwrap(),
            plane.parse_expr("x/(x^2 + y^2)").unwrap(),
        ];
        let circle = LoopPath::parse(&["cos(6.283185307179586*s)", "sin(6.283185307179586*s)"]).unwrap();
        let v = loop_period(&plane, &eta, &circle).unwrap();
        assert!((v - std::f64::consts::TAU).abs() < 1e-8);

        let df = differential(&plane).unwrap();
        assert!(loop_period(&plane, &df, &circle).unwrap().abs() < 1e-8);
    }
}
