//! Index conventions and small tensor helpers shared by the closed-form
//! curvature engine and the Christoffel oracle.
//!
//! Both routes must agree on these; nothing else in the crate picks its own
//! slot order.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array3, Array4};

/// Conventions used throughout, written out once.
///
/// * `A[i][j][k] = ∂_i ∂_j ∂_k f` (Amari-Chentsov tensor in affine coordinates).
/// * Raising contracts the last slot: `A^k_{ij} = A[i][j][l] h^{lk}`, stored as `raised[[i, j, k]]`.
/// * Christoffel symbols are stored `gamma[[k, i, j]] = Γ^k_{ij}`.
/// * `R[i][j][k][l] = h(R(∂_i, ∂_j) ∂_l, ∂_k)`, so a metric of constant
///   sectional curvature `K` has `R_{ijkl} = K (h_ik h_jl - h_il h_jk)` and
///   `R_{1212} = K det h` in two dimensions.
/// * `Ric[j][l] = h^{ik} R[i][j][k][l]`, scalar curvature `S = h^{jl} Ric[j][l]`.
pub const INDEX_CONVENTION: &str = "A[i][j][k]=f_ijk; raised[i][j][k]=A[i][j][l]h^lk; \
gamma[k][i][j]=Γ^k_ij; R[i][j][k][l]=h(R(∂i,∂j)∂l,∂k); Ric[j][l]=h^ik R[i][j][k][l]; S=h^jl Ric[j][l]";

/// Eigenvalues within this distance of zero count as neither sign.
pub const SIGNATURE_THRESHOLD: f64 = 1e-12;

/// |det| at or below this marks a metric as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Smallest eigenvalue accepted as positive in definiteness checks.
pub const POSITIVITY_THRESHOLD: f64 = 1e-10;

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn raise_last(lower: &Array3<f64>, inverse: &DMatrix<f64>) -> Array3<f64> {
    let n = inverse.nrows();
    Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        (0..n).map(|l| lower[[i, j, l]] * inverse[(l, k)]).sum()
    })
}

/// `Ric[j][l] = h^{ik} R[i][j][k][l]`.
pub fn ricci_contraction(riemann: &Array4<f64>, inverse: &DMatrix<f64>) -> DMatrix<f64> {
    let n = inverse.nrows();
    DMatrix::from_fn(n, n, |j, l| {
        let mut s = 0.0;
        for i in 0..n {
            for k in 0..n {
                s += inverse[(i, k)] * riemann[[i, j, k, l]];
            }
        }
        s
    })
}

pub fn trace_with(inverse: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    inverse.component_mul(&m.transpose()).sum()
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
