//! Pointwise Hessian geometry: metric, Amari-Chentsov tensor, curvature via
//! the closed forms in terms of `A`, Koszul forms and the 2D flatness test.

mod curvature;
mod koszul;

use nalgebra::DMatrix;
use ndarray::Array3;
use serde::Serialize;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::tensor::{raise_last, symmetric_eigenvalues, DEGENERACY_THRESHOLD, SIGNATURE_THRESHOLD};

pub use curvature::{
    flatness_test_2d, gaussian_curvature_2d, ricci_bound_check, ricci_orthonormal,
    riemann_closed_form, FlatnessVerdict, OrthonormalRicci, RicciBound, RiemannValue,
    FLATNESS_TOLERANCE,
};
pub use koszul::{
    differential, koszul_form, koszul_type_check, KoszulFormValue, KoszulSample, KoszulTypeVerdict,
    CLOSEDNESS_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_riemannian(&self, n: usize) -> bool {
        self.positive == n
    }
}

#[derive(Debug, Clone)]
pub struct MetricValue {
    pub matrix: DMatrix<f64>,
    pub signature: Signature,
    pub determinant: f64,
    pub eigenvalues: Vec<f64>,
}

impl MetricValue {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let eigenvalues = symmetric_eigenvalues(&matrix);
        let signature = Signature {
            positive: eigenvalues.iter().filter(|&&e| e > SIGNATURE_THRESHOLD).count(),
            negative: eigenvalues.iter().filter(|&&e| e < -SIGNATURE_THRESHOLD).count(),
        };
        let determinant = matrix.determinant();
        MetricValue {
            matrix,
            signature,
            determinant,
            eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_degenerate(&self) -> bool {
        self.determinant.abs() <= DEGENERACY_THRESHOLD
    }

    pub fn is_riemannian(&self) -> bool {
        !self.is_degenerate() && self.signature.is_riemannian(self.dim())
    }

    pub fn inverse(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        if self.is_degenerate() {
            return Err(Error::DegenerateMetric {
                point: point.to_vec(),
                det: self.determinant,
            });
        }
        self.matrix.clone().try_inverse().ok_or(Error::DegenerateMetric {
            point: point.to_vec(),
            det: self.determinant,
        })
    }

    /// `h(x, y)` for coordinate vectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * self.matrix[(i, j)] * y[j];
            }
        }
        s
    }
}

/// The Hessian metric `h = ∇(df)` at `p`. Degeneracy is reported through
/// [`MetricValue::is_degenerate`], not as an error.
pub fn hessian_metric(chart: &PotentialChart, p: &[f64]) -> Result<MetricValue> {
    Ok(MetricValue::from_matrix(chart.hessian(p)?))
}

#[derive(Debug, Clone)]
pub struct ACTensorValue {
    /// `A[i][j][k] = ∂_i∂_j∂_k f`.
    pub lower: Array3<f64>,
    /// `raised[[i, j, k]] = A^k_{ij}`.
    pub raised: Array3<f64>,
}

pub fn amari_chentsov(chart: &PotentialChart, p: &[f64]) -> Result<ACTensorValue> {
    Ok(PointGeometry::at(chart, p)?.ac)
}

/// Everything the closed forms need at one point, computed once.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    pub metric: MetricValue,
    pub inverse: DMatrix<f64>,
    pub ac: ACTensorValue,
}

impl PointGeometry {
    pub fn at(chart: &PotentialChart, p: &[f64]) -> Result<Self> {
        let metric = hessian_metric(chart, p)?;
        let inverse = metric.inverse(p)?;
        let lower = chart.third(p)?;
        let raised = raise_last(&lower, &inverse);
        Ok(PointGeometry {
            point: p.to_vec(),
            metric,
            inverse,
            ac: ACTensorValue { lower, raised },
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `(A_k)_{ij} = A[i][j][k]` as a matrix.
    pub fn ac_slice(&self, k: usize) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.ac.lower[[i, j, k]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_metric_is_identity() {
        let c = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let m = hessian_metric(&c, &[0.4, 2.0]).unwrap();
        assert_eq!(m.matrix, DMatrix::identity(2, 2));
        assert_eq!(m.signature, Signature { positive: 2, negative: 0 });
        assert!(m.is_riemannian());
    }

    #[test]
    fn hyperbolic_example_metric() {
        let c = PotentialChart::parse(&["y1", "y2"], "y1^2/(8*y2) - 0.25*log(y2)", &["y2"]).unwrap();
        let m = hessian_metric(&c, &[0.0, 1.0]).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.25]);
        assert!((m.matrix - expected).abs().max() < 1e-15);
        assert_eq!(m.signature, Signature { positive: 2, negative: 0 });
    }

    #[test]
    fn harmonic_metric_is_lorentzian() {
        let c = PotentialChart::parse(&["x", "y"], "x^3 - 3*x*y^2", &[]).unwrap();
        let m = hessian_metric(&c, &[1.0, 0.0]).unwrap();
        assert_eq!(m.matrix, DMatrix::from_row_slice(2, 2, &[6.0, 0.0, 0.0, -6.0]));
        assert_eq!(m.signature, Signature { positive: 1, negative: 1 });
    }

    #[test]
    fn degenerate_metric_is_flagged_not_fatal() {
        let c = PotentialChart::parse(&["x", "y"], "x^3 - 3*x*y^2", &[]).unwrap();
        let m = hessian_metric(&c, &[0.0, 0.0]).unwrap();
        assert!(m.is_degenerate());
        assert!(matches!(amari_chentsov(&c, &[0.0, 0.0]), Err(Error::DegenerateMetric { .. })));
    }

    #[test]
    fn ac_tensor_examples() {
        let q = PotentialChart::parse(&["x", "y"], "x^2 + x*y + 2*y^2", &[]).unwrap();
        assert!(amari_chentsov(&q, &[1.0, 1.0]).unwrap().lower.iter().all(|&v| v == 0.0));

        let cubic = PotentialChart::parse(&["x"], "x^3/6", &[]).unwrap();
        assert_eq!(amari_chentsov(&cubic, &[1.0]).unwrap().lower[[0, 0, 0]], 1.0);

        // third partial of -log x is -2/x^3
        let orthant = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let a = amari_chentsov(&orthant, &[1.0, 1.0]).unwrap();
        for (idx, v) in a.lower.indexed_iter() {
            let expected = if idx.0 == idx.1 && idx.1 == idx.2 { -2.0 } else { 0.0 };
            assert_eq!(*v, expected, "{idx:?}");
        }
    }
}
