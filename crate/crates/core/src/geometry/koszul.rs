use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::PointGeometry;
use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::tensor::{symmetric_eigenvalues, trace_with, POSITIVITY_THRESHOLD};

/// Tolerance on `∂_i κ_j - ∂_j κ_i` and on `dη`.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct KoszulFormValue {
    pub covector: DVector<f64>,
    pub log_abs_det: f64,
    /// `max |∂_i κ_j - ∂_j κ_i|`.
    pub closedness_residual: f64,
    /// `∂_j κ_i`, the second Koszul form in affine coordinates.
    pub derivative: DMatrix<f64>,
}

/// `κ_i = ½ ∂_i log|det H| = ½ tr(H⁻¹ ∂_i H)` by Jacobi's formula.
///
/// `∂_j κ_i = ½ (tr(H⁻¹ F_ij) - tr(H⁻¹ A_j H⁻¹ A_i))` where `F_ij` is the
/// slice of fourth partials; closedness is the symmetry of that matrix.
pub fn koszul_form(chart: &PotentialChart, p: &[f64]) -> Result<KoszulFormValue> {
    let g = PointGeometry::at(chart, p)?;
    let n = g.dim();
    let hinv = &g.inverse;
    let slices: Vec<DMatrix<f64>> = (0..n).map(|k| g.ac_slice(k)).collect();
    let covector = DVector::from_fn(n, |i, _| 0.5 * trace_with(hinv, &slices[i]));
    let fourth = chart.fourth(p)?;
    let reduced: Vec<DMatrix<f64>> = slices.iter().map(|s| hinv * s).collect();
    let derivative = DMatrix::from_fn(n, n, |i, j| {
        let f_ij = DMatrix::from_fn(n, n, |a, b| fourth[[a, b, i, j]]);
        0.5 * (trace_with(hinv, &f_ij) - (&reduced[j] * &reduced[i]).trace())
    });
    let closedness_residual = (&derivative - derivative.transpose()).abs().max();
    Ok(KoszulFormValue {
        covector,
        log_abs_det: g.metric.determinant.abs().ln(),
        closedness_residual,
        derivative,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KoszulSample {
    pub point: Vec<f64>,
    /// `max |∂_i η_j - ∂_j η_i|`.
    pub closedness_residual: f64,
    /// Smallest eigenvalue of the symmetric part of `∂_i η_j`.
    pub min_eigenvalue: f64,
    pub closed: bool,
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KoszulTypeVerdict {
    pub koszul_type: bool,
    pub samples: Vec<KoszulSample>,
}

/// Checks at each sample that `η` is closed and `∇η = (∂_i η_j)` is positive
/// definite, i.e. that `η` is a space-like Lagrangian section.
pub fn koszul_type_check(
    chart: &PotentialChart,
    eta: &[Expr],
    samples: &[Vec<f64>],
) -> Result<KoszulTypeVerdict> {
    let n = chart.dim();
    if eta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: eta.len(),
        });
    }
    let mut d = Vec::with_capacity(n * n);
    for e in eta {
        for i in 0..n {
            d.push(e.differentiate(i)?);
        }
    }
    let mut out = Vec::with_capacity(samples.len());
    for p in samples {
        chart.check_point(p)?;
        // m[(i, j)] = ∂_i η_j
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                m[(i, j)] = d[j * n + i].eval(p)?;
            }
        }
        let closedness_residual = (&m - m.transpose()).abs().max();
        let min_eigenvalue = symmetric_eigenvalues(&m)[0];
        out.push(KoszulSample {
            point: p.clone(),
            closedness_residual,
            min_eigenvalue,
            closed: closedness_residual <= CLOSEDNESS_TOLERANCE,
            positive: min_eigenvalue > POSITIVITY_THRESHOLD,
        });
    }
    Ok(KoszulTypeVerdict {
        koszul_type: out.iter().all(|s| s.closed && s.positive),
        samples: out,
    })
}

/// Components of `df` as expressions.
pub fn differential(chart: &PotentialChart) -> Result<Vec<Expr>> {
    (0..chart.dim())
        .map(|i| Ok(chart.partial(&[i])?.as_ref().clone()))
        .collect()
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

    #[test]
    fn quadratic_koszul_form_vanishes() {
        let c = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let k = koszul_form(&c, &[0.2, 0.7]).unwrap();
        assert_eq!(k.covector.abs().max(), 0.0);
        assert_eq!(k.log_abs_det, 0.0);
    }

    #[test]
    fn orthant_koszul_form() {
        let c = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let k = koszul_form(&c, &[1.0, 1.0]).unwrap();
        assert_eq!(k.covector.as_slice(), &[-1.0, -1.0]);
        let k = koszul_form(&c, &[2.0, 0.5]).unwrap();
        assert!((k.covector[0] + 0.5).abs() < 1e-15 && (k.covector[1] + 2.0).abs() < 1e-15);
        assert!(k.closedness_residual < 1e-12);
    }

    #[test]
    fn cone_koszul_form_is_three_df() {
        let c = cone3();
        for p in [[0.0, 0.0, 1.0], [0.3, -0.2, 1.1], [1.5, 0.4, 2.0]] {
            let k = koszul_form(&c, &p).unwrap();
            let df = c.gradient(&p).unwrap();
            assert!((&k.covector - 3.0 * df).abs().max() < 1e-12);
            assert!(k.closedness_residual < 1e-9);
        }
    }

    #[test]
    fn koszul_form_matches_finite_difference_of_log_det() {
        let c = PotentialChart::parse(&["x", "y"], "x^4 + x^2*y + exp(y) + y^2", &[]).unwrap();
        let p = [0.7, 0.3];
        let k = koszul_form(&c, &p).unwrap();
        let ld = |q: &[f64]| c.hessian(q).unwrap().determinant().abs().ln();
        let h = 1e-5;
        for i in 0..2 {
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            let fd = (ld(&a) - ld(&b)) / (2.0 * h);
            assert!((2.0 * k.covector[i] - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn koszul_type_examples() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let eta = differential(&q).unwrap();
        let samples = vec![vec![0.0, 0.0], vec![1.0, -2.0]];
        assert!(koszul_type_check(&q, &eta, &samples).unwrap().koszul_type);

        let c = cone3();
        let eta = differential(&c).unwrap();
        let samples = vec![vec![0.0, 0.0, 1.0], vec![0.5, 0.2, 1.3]];
        assert!(koszul_type_check(&c, &eta, &samples).unwrap().koszul_type);

        let rot = vec![q.parse_expr("-y").unwrap(), q.parse_expr("x").unwrap()];
        let v = koszul_type_check(&q, &rot, &[vec![0.5, 0.5]]).unwrap();
        assert!(!v.koszul_type);
        assert!(!v.samples[0].closed);
        assert!(!v.samples[0].positive);
    }
}
