//! Conjugate connection `∇*` of a Hessian chart and the Legendre-duality
//! identities, checked pointwise in the original affine coordinates.
//!
//! `∇` has vanishing coefficients in these coordinates, so every statement
//! about `∇*` reduces to `Γ*^k_{ij} = A^k_{ij}`.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array3, Array4};
use serde::Serialize;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::PointGeometry;
use crate::oracle::{christoffel, connection_curvature};

/// Pointwise tolerance for the Euler and Legendre defects.
pub const DEFECT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ConjugateConnection {
    /// `gamma[[k, i, j]] = Γ*^k_{ij}`.
    pub gamma: Array3<f64>,
    /// `max |∂_k g_ij - Γ*^m_{kj} g_im|`: `Z g(X,Y) = g(∇_Z X, Y) + g(X, ∇*_Z Y)`
    /// on coordinate fields.
    pub product_rule_residual: f64,
}

fn gamma_star(g: &PointGeometry) -> Array3<f64> {
    let n = g.dim();
    Array3::from_shape_fn((n, n, n), |(k, i, j)| g.ac.raised[[i, j, k]])
}

pub fn conjugate_connection(chart: &PotentialChart, p: &[f64]) -> Result<ConjugateConnection> {
    let g = PointGeometry::at(chart, p)?;
    let n = g.dim();
    let gamma = gamma_star(&g);
    let dg = chart.third(p)?;
    let h = &g.metric.matrix;
    let mut residual: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let rhs: f64 = (0..n).map(|m| gamma[[m, k, j]] * h[(i, m)]).sum();
                residual = residual.max((dg[[k, i, j]] - rhs).abs());
            }
        }
    }
    Ok(ConjugateConnection {
        gamma,
        product_rule_residual: residual,
    })
}

/// `max |½(0 + Γ*) - Γ^{LC}|` with the Levi-Civita symbols from the oracle.
pub fn levi_civita_residual(chart: &PotentialChart, p: &[f64]) -> Result<f64> {
    let star = conjugate_connection(chart, p)?.gamma;
    let lc = christoffel(chart, p)?.gamma;
    Ok(star
        .iter()
        .zip(lc.iter())
        .fold(0.0_f64, |m, (a, b)| m.max((0.5 * a - b).abs())))
}

/// `∂_a Γ*^k_{ij} = ∂_a A_ijl h^{lk} + A_ijl ∂_a h^{lk}`, stored `[[a, k, i, j]]`.
fn gamma_star_derivative(chart: &PotentialChart, g: &PointGeometry) -> Result<Array4<f64>> {
    let n = g.dim();
    let fourth = chart.fourth(&g.point)?;
    let inv = &g.inverse;
    let dinv: Vec<DMatrix<f64>> = (0..n).map(|a| -(inv * g.ac_slice(a) * inv)).collect();
    Ok(Array4::from_shape_fn((n, n, n, n), |(a, k, i, j)| {
        let mut s = 0.0;
        for l in 0..n {
            s += fourth[[a, i, j, l]] * inv[(l, k)] + g.ac.lower[[i, j, l]] * dinv[a][(l, k)];
        }
        s
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct DualFlatness {
    pub max_abs_curvature: f64,
    pub per_sample: Vec<f64>,
}

/// Curvature of `∇*` (not lowered) at each sample; zero for a Hessian chart.
pub fn dual_flatness_check(chart: &PotentialChart, samples: &[Vec<f64>]) -> Result<DualFlatness> {
    let mut per_sample = Vec::with_capacity(samples.len());
    for p in samples {
        let g = PointGeometry::at(chart, p)?;
        let r = connection_curvature(&gamma_star(&g), &gamma_star_derivative(chart, &g)?);
        per_sample.push(r.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    Ok(DualFlatness {
        max_abs_curvature: per_sample.iter().copied().fold(0.0, f64::max),
        per_sample,
    })
}

/// Dual affine coordinates `p_i = ∂f/∂x^i`; their Jacobian is `Hess f`.
#[derive(Debug, Clone)]
pub struct DualChart<'a> {
    pub chart: &'a PotentialChart,
    pub coordinates: Vec<Expr>,
}

impl<'a> DualChart<'a> {
    pub fn new(chart: &'a PotentialChart) -> Result<Self> {
        Ok(DualChart {
            chart,
            coordinates: crate::geometry::differential(chart)?,
        })
    }

    pub fn eval(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.chart.check_point(p)?;
        let v = self
            .coordinates
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(v))
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.chart.hessian(p)
    }
}

#[derive(Debug, Clone)]
pub struct EulerFieldValue {
    pub field: DVector<f64>,
    /// `(∇*_j H)^k - δ^k_j` stored `[(k, j)]`.
    pub defect: DMatrix<f64>,
}

impl EulerFieldValue {
    pub fn defect_norm(&self) -> f64 {
        self.defect.abs().max()
    }

    pub fn is_euler(&self) -> bool {
        self.defect_norm() < DEFECT_TOLERANCE
    }
}

/// `H = (df)♯` and the defect of `∇*H = Id`.
pub fn legendre_euler_field(chart: &PotentialChart, p: &[f64]) -> Result<EulerFieldValue> {
    let g = PointGeometry::at(chart, p)?;
    let n = g.dim();
    let inv = &g.inverse;
    let df = chart.gradient(p)?;
    let field = inv * &df;
    // ∂_j H^k = ∂_j h^{kl} f_l + h^{kl} h_{lj}
    let hh = inv * &g.metric.matrix;
    let mut defect = DMatrix::zeros(n, n);
    for j in 0..n {
        let dinv = -(inv * g.ac_slice(j) * inv);
        let d_field = &dinv * &df;
        for k in 0..n {
            let mut v = d_field[k] + hh[(k, j)];
            for m in 0..n {
                v += g.ac.raised[[j, m, k]] * field[m];
            }
            defect[(k, j)] = v - if k == j { 1.0 } else { 0.0 };
        }
    }
    Ok(EulerFieldValue { field, defect })
}

#[derive(Debug, Clone)]
pub struct RadiantValue {
    /// `H♭`.
    pub covector: DVector<f64>,
    /// `max |∂_i H^k - δ^k_i|`; nonzero means `H` is not an Euler field of `∇`.
    pub euler_defect: f64,
    /// `max |(∇* H♭)_ij - h_ij|`.
    pub defect: f64,
}

impl RadiantValue {
    pub fn is_euler(&self) -> bool {
        self.euler_defect < DEFECT_TOLERANCE
    }

    pub fn holds(&self) -> bool {
        self.defect < DEFECT_TOLERANCE
    }
}

fn eval_field(chart: &PotentialChart, field: &[Expr], p: &[f64]) -> Result<DVector<f64>> {
    if field.len() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: field.len(),
        });
    }
    let v = field.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(v))
}

/// `d[(k, i)] = ∂_i F^k` for an expression-valued field.
fn field_jacobian(field: &[Expr], p: &[f64]) -> Result<DMatrix<f64>> {
    let n = field.len();
    let mut d = DMatrix::zeros(n, n);
    for (k, e) in field.iter().enumerate() {
        for i in 0..n {
            d[(k, i)] = e.differentiate(i)?.eval(p)?;
        }
    }
    Ok(d)
}

/// Lowers an Euler field `H` of `∇` and checks `∇*(H♭) = h`.
pub fn radiant_to_koszul(chart: &PotentialChart, field: &[Expr], p: &[f64]) -> Result<RadiantValue> {
    let g = PointGeometry::at(chart, p)?;
    let n = g.dim();
    let h = &g.metric.matrix;
    let hv = eval_field(chart, field, p)?;
    let dh = field_jacobian(field, p)?;
    let euler_defect = (&dh - DMatrix::identity(n, n)).abs().max();
    let covector = h * &hv;
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            // ∂_i θ_j = ∂_i h_jm H^m + h_jm ∂_i H^m
            let mut d_theta = 0.0;
            for m in 0..n {
                d_theta += g.ac.lower[[i, j, m]] * hv[m] + h[(j, m)] * dh[(m, i)];
            }
            let correction: f64 = (0..n).map(|m| g.ac.raised[[i, j, m]] * covector[m]).sum();
            defect = defect.max((d_theta - correction - h[(i, j)]).abs());
        }
    }
    Ok(RadiantValue {
        covector,
        euler_defect,
        defect,
    })
}

/// `max_{i,k} |∂_i(θ♯)^k - ((∇*_i θ)♯)^k|`.
pub fn musical_sharp_commutation(chart: &PotentialChart, theta: &[Expr], p: &[f64]) -> Result<f64> {
    let g = PointGeometry::at(chart, p)?;
    let n = g.dim();
    let inv = &g.inverse;
    let th = eval_field(chart, theta, p)?;
    let dth = field_jacobian(theta, p)?; // dth[(l, i)] = ∂_i θ_l
    let mut residual: f64 = 0.0;
    for i in 0..n {
        let dinv = -(inv * g.ac_slice(i) * inv);
        let lhs = &dinv * &th + inv * dth.column(i);
        let cov = DVector::from_fn(n, |l, _| {
            dth[(l, i)] - (0..n).map(|m| g.ac.raised[[i, l, m]] * th[m]).sum::<f64>()
        });
        let rhs = inv * cov;
        residual = residual.max((lhs - rhs).abs().max());
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone3() -> PotentialChart {
        PotentialChart::parse(
            &["x", "y", "t"],
            "-0.5*log(t^2 - x^2 - y^2)",
            &["t^2 - x^2 - y^2", "t"],
        )
        .unwrap()
    }

    fn exprs(c: &PotentialChart, src: &[&str]) -> Vec<Expr> {
        src.iter().map(|s| c.parse_expr(s).unwrap()).collect()
    }

    #[test]
    fn quadratic_is_self_dual() {
        let c = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let cc = conjugate_connection(&c, &[0.3, 0.1]).unwrap();
        assert!(cc.gamma.iter().all(|&v| v == 0.0));
        let e = legendre_euler_field(&c, &[0.3, 0.1]).unwrap();
        assert_eq!(e.field.as_slice(), &[0.3, 0.1]);
        assert!(e.is_euler());
        let r = radiant_to_koszul(&c, &exprs(&c, &["x", "y"]), &[0.3, 0.1]).unwrap();
        assert_eq!(r.defect, 0.0);
        assert_eq!(musical_sharp_commutation(&c, &exprs(&c, &["1", "0"]), &[0.3, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn orthant_1d_conjugate_coefficient() {
        let c = PotentialChart::parse(&["x"], "-log(x)", &["x"]).unwrap();
        let cc = conjugate_connection(&c, &[1.0]).unwrap();
        assert_eq!(cc.gamma[[0, 0, 0]], -2.0);
        assert!(cc.product_rule_residual < 1e-15);
    }

    #[test]
    fn cone_duality_identities() {
        let c = cone3();
        let samples = vec![vec![0.0, 0.0, 1.0], vec![0.2, -0.3, 1.1], vec![1.0, 0.5, 2.0]];
        assert!(dual_flatness_check(&c, &samples).unwrap().max_abs_curvature < 1e-8);
        for p in &samples {
            assert!(levi_civita_residual(&c, p).unwrap() < 1e-10);
            assert!(conjugate_connection(&c, p).unwrap().product_rule_residual < 1e-9);
            assert!(legendre_euler_field(&c, p).unwrap().is_euler());
            let df: Vec<Expr> = crate::geometry::differential(&c).unwrap();
            assert!(musical_sharp_commutation(&c, &df, p).unwrap() < 1e-8);
        }
        let e = legendre_euler_field(&c, &[0.0, 0.0, 1.0]).unwrap();
        assert!((e.field - DVector::from_vec(vec![0.0, 0.0, -1.0])).abs().max() < 1e-15);
    }

    #[test]
    fn radiant_charts() {
        let lorentz = PotentialChart::parse(&["x", "t"], "-0.5*log(t^2 - x^2)", &["t^2 - x^2", "t"]).unwrap();
        let h = exprs(&lorentz, &["x", "t"]);
        for p in [[0.0, 1.0], [0.3, 0.9], [-1.0, 1.5]] {
            let r = radiant_to_koszul(&lorentz, &h, &p).unwrap();
            assert!(r.is_euler() && r.holds(), "{r:?}");
        }
        let orthant = PotentialChart::parse(
            &["x", "y"],
            "-0.5*(log(x) + log(y)) - 0.5*log(2)",
            &["x", "y"],
        )
        .unwrap();
        let r = radiant_to_koszul(&orthant, &exprs(&orthant, &["x", "y"]), &[1.5, 0.4]).unwrap();
        assert!(r.holds());
        let e = legendre_euler_field(&orthant, &[1.0, 1.0]).unwrap();
        assert!(e.is_euler());
    }

    #[test]
    fn non_euler_field_is_reported_distinctly() {
        let c = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let r = radiant_to_koszul(&c, &exprs(&c, &["2*x", "y"]), &[1.0, 1.0]).unwrap();
        assert!(!r.is_euler());
        assert!(!r.holds());
    }

    #[test]
    fn dual_chart_jacobian_is_hessian() {
        let c = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let d = DualChart::new(&c).unwrap();
        assert_eq!(d.eval(&[2.0, 4.0]).unwrap().as_slice(), &[-0.5, -0.25]);
        assert_eq!(d.jacobian(&[1.0, 1.0]).unwrap(), DMatrix::identity(2, 2));
    }
}
