//! Brute-force curvature from Christoffel symbols of `h` with symbolic
//! fourth derivatives, plus a finite-difference audit of the derivative
//! tensors. Nothing here uses the Amari-Chentsov closed forms.

use nalgebra::DMatrix;
use ndarray::{Array3, Array4, ArrayD, IxDyn};
use serde::Serialize;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::geometry::{hessian_metric, RiemannValue};

#[derive(Debug, Clone)]
pub struct ChristoffelValue {
    /// `gamma[[k, i, j]] = Γ^k_{ij}`.
    pub gamma: Array3<f64>,
    /// `lowered[[i, j, l]] = Γ_{ij,l}`.
    pub lowered: Array3<f64>,
}

fn metric_and_inverse(chart: &PotentialChart, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = hessian_metric(chart, p)?;
    let inv = m.inverse(p)?;
    Ok((m.matrix, inv))
}

/// `Γ_{ij,l} = ½(∂_i g_jl + ∂_j g_il - ∂_l g_ij)`, raised with `h⁻¹`.
pub fn christoffel(chart: &PotentialChart, p: &[f64]) -> Result<ChristoffelValue> {
    let (_, inv) = metric_and_inverse(chart, p)?;
    let dg = chart.third(p)?; // dg[[i, j, l]] = ∂_i g_jl
    Ok(christoffel_from(&dg, &inv))
}

fn christoffel_from(dg: &Array3<f64>, inv: &DMatrix<f64>) -> ChristoffelValue {
    let n = inv.nrows();
    let lowered = Array3::from_shape_fn((n, n, n), |(i, j, l)| {
        0.5 * (dg[[i, j, l]] + dg[[j, i, l]] - dg[[l, i, j]])
    });
    let gamma = Array3::from_shape_fn((n, n, n), |(k, i, j)| {
        (0..n).map(|l| inv[(k, l)] * lowered[[i, j, l]]).sum()
    });
    ChristoffelValue { gamma, lowered }
}

/// `R^l_{ijk} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} - Γ^l_{jm} Γ^m_{ik}`,
/// lowered to the shared slot order `R[i][j][k][l] = g(R(∂_i,∂_j)∂_l, ∂_k)`.
pub fn riemann_from_christoffel(chart: &PotentialChart, p: &[f64]) -> Result<RiemannValue> {
    let (g, inv) = metric_and_inverse(chart, p)?;
    let n = g.nrows();
    let dg = chart.third(p)?;
    let ddg = chart.fourth(p)?; // ddg[[a, i, j, l]] = ∂_a ∂_i g_jl
    let ch = christoffel_from(&dg, &inv);
    let gamma = &ch.gamma;

    // ∂_a h^{kl} = -h^{kp} ∂_a g_pq h^{ql}
    let dinv: Vec<DMatrix<f64>> = (0..n)
        .map(|a| {
            let da = DMatrix::from_fn(n, n, |p_, q| dg[[a, p_, q]]);
            -(&inv * da * &inv)
        })
        .collect();
    // dgamma[[a, k, i, j]] = ∂_a Γ^k_{ij}
    let dgamma = Array4::from_shape_fn((n, n, n, n), |(a, k, i, j)| {
        let mut s = 0.0;
        for l in 0..n {
            let dlow = 0.5 * (ddg[[a, i, j, l]] + ddg[[a, j, i, l]] - ddg[[a, l, i, j]]);
            s += dlow * inv[(k, l)] + ch.lowered[[i, j, l]] * dinv[a][(k, l)];
        }
        s
    });
    let up = connection_curvature(gamma, &dgamma);
    let lowered = Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
        (0..n).map(|m| up[[m, i, j, l]] * g[(m, k)]).sum()
    });
    Ok(RiemannValue::from_components(lowered, &inv))
}

/// Curvature of an arbitrary torsion-free connection given its coefficients
/// and their first derivatives, without lowering: `out[[l, i, j, k]] = R^l_{ijk}`.
pub fn connection_curvature(gamma: &Array3<f64>, dgamma: &Array4<f64>) -> Array4<f64> {
    let n = gamma.shape()[0];
    Array4::from_shape_fn((n, n, n, n), |(l, i, j, k)| {
        let mut s = dgamma[[i, l, j, k]] - dgamma[[j, l, i, k]];
        for m in 0..n {
            s += gamma[[l, i, m]] * gamma[[m, j, k]] - gamma[[l, j, m]] * gamma[[m, i, k]];
        }
        s
    })
}

pub const FD_STEP_ORDER2: f64 = 1e-5;
pub const FD_STEP_HIGHER: f64 = 1e-4;
const FD_RETRIES: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct FiniteDifferenceAudit {
    /// Max absolute deviation for orders 2, 3, 4.
    pub deviations: [f64; 3],
    /// Step actually used for each order after any shrinking.
    pub steps: [f64; 3],
}

impl FiniteDifferenceAudit {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Central differences of the symbolic order `k-1` tensor give an
/// independent order `k` tensor; its max deviation from the symbolic one is
/// reported per order. Steps halve (up to three times) when the stencil
/// leaves the domain.
pub fn finite_difference_audit(chart: &PotentialChart, p: &[f64]) -> Result<FiniteDifferenceAudit> {
    chart.check_point(p)?;
    let mut deviations = [0.0; 3];
    let mut steps = [0.0; 3];
    for (slot, order) in (2..=4).enumerate() {
        let base = if order == 2 { FD_STEP_ORDER2 } else { FD_STEP_HIGHER };
        let step = stencil_step(chart, p, base)?;
        let exact = chart.derivative_tensor(order, p)?;
        let approx = central_difference(chart, p, order - 1, step)?;
        deviations[slot] = exact
            .iter()
            .zip(approx.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        steps[slot] = step;
    }
    Ok(FiniteDifferenceAudit { deviations, steps })
}

fn stencil_step(chart: &PotentialChart, p: &[f64], base: f64) -> Result<f64> {
    let mut step = base;
    for _ in 0..=FD_RETRIES {
        let inside = (0..p.len()).all(|i| {
            [-step, step].iter().all(|&d| {
                let mut q = p.to_vec();
                q[i] += d;
                chart.is_admissible(&q)
            })
        });
        if inside {
            return Ok(step);
        }
        step *= 0.5;
    }
    Err(Error::InvalidArgument(format!(
        "finite-difference stencil leaves the domain at {p:?} even with step {}",
        step * 2.0
    )))
}

/// `out[a, rest..] = (T(p + h e_a) - T(p - h e_a)) / 2h` for the order-`lower` tensor `T`.
fn central_difference(chart: &PotentialChart, p: &[f64], lower: usize, h: f64) -> Result<ArrayD<f64>> {
    let n = p.len();
    let mut out = ArrayD::zeros(IxDyn(&vec![n; lower + 1]));
    for a in 0..n {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[a] += h;
        minus[a] -= h;
        let tp = tensor_or_gradient(chart, &plus, lower)?;
        let tm = tensor_or_gradient(chart, &minus, lower)?;
        let mut slab = out.index_axis_mut(ndarray::Axis(0), a);
        for ((dst, x), y) in slab.iter_mut().zip(tp.iter()).zip(tm.iter()) {
            *dst = (x - y) / (2.0 * h);
        }
    }
    Ok(out)
}

fn tensor_or_gradient(chart: &PotentialChart, p: &[f64], order: usize) -> Result<ArrayD<f64>> {
    if order == 1 {
        let g = chart.gradient(p)?;
        Ok(ArrayD::from_shape_vec(IxDyn(&[p.len()]), g.iter().copied().collect())
            .expect("gradient shape"))
    } else {
        chart.derivative_tensor(order, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{amari_chentsov, riemann_closed_form};
    use crate::tensor::max_abs;

    fn hyperbolic2() -> PotentialChart {
        PotentialChart::parse(&["y1", "y2"], "y1^2/(8*y2) - 0.25*log(y2)", &["y2"]).unwrap()
    }

    #[test]
    fn quadratic_christoffel_and_curvature_vanish() {
        let c = PotentialChart::parse(&["x", "y"], "x^2 + 3*x*y + 4*y^2", &[]).unwrap();
        let ch = christoffel(&c, &[0.5, 0.5]).unwrap();
        assert_eq!(max_abs(ch.gamma.iter()), 0.0);
        assert_eq!(riemann_from_christoffel(&c, &[0.5, 0.5]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn orthant_1d_christoffel() {
        let c = PotentialChart::parse(&["x"], "-log(x)", &["x"]).unwrap();
        let ch = christoffel(&c, &[1.0]).unwrap();
        assert_eq!(ch.gamma[[0, 0, 0]], -1.0);
        let ch = christoffel(&c, &[2.0]).unwrap();
        assert!((ch.gamma[[0, 0, 0]] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn christoffel_is_half_raised_ac() {
        let c = hyperbolic2();
        for p in [[0.0, 1.0], [0.7, 0.4], [-1.3, 2.5]] {
            let ch = christoffel(&c, &p).unwrap();
            let a = amari_chentsov(&c, &p).unwrap();
            for ((k, i, j), v) in ch.gamma.indexed_iter() {
                assert!((v - 0.5 * a.raised[[i, j, k]]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_on_hyperbolic_plane() {
        let c = hyperbolic2();
        let p = [0.3, 0.8];
        let a = riemann_from_christoffel(&c, &p).unwrap();
        let b = riemann_closed_form(&c, &p).unwrap();
        for (x, y) in a.components.iter().zip(b.components.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
        let h = c.hessian(&p).unwrap();
        assert!((a.components[[0, 1, 0, 1]] / h.determinant() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn maschke_sextic_is_flat() {
        let c = PotentialChart::parse(
            &["x", "y", "z"],
            "x^6 + y^6 + z^6 - 10*(x^3*y^3 + y^3*z^3 + z^3*x^3)",
            &[],
        )
        .unwrap();
        let r = riemann_from_christoffel(&c, &[1.0, 0.5, 0.3]).unwrap();
        assert!(r.max_abs() < 1e-7, "{}", r.max_abs());
    }

    #[test]
    fn audit_examples() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        assert!(finite_difference_audit(&q, &[0.1, 0.2]).unwrap().max_deviation() < 1e-9);

        let cone = PotentialChart::parse(
            &["x", "y", "t"],
            "-0.5*log(t^2 - x^2 - y^2)",
            &["t^2 - x^2 - y^2", "t"],
        )
        .unwrap();
        assert!(finite_difference_audit(&cone, &[0.0, 0.0, 2.0]).unwrap().max_deviation() < 1e-5);

        let polar = PotentialChart::parse(&["x", "y"], "x^2/(2*y) + 0.25*log(y)*y", &["y"]).unwrap();
        assert!(finite_difference_audit(&polar, &[0.3, 1.2]).unwrap().max_deviation() < 1e-5);
    }

    #[test]
    fn audit_shrinks_step_near_boundary() {
        let c = PotentialChart::parse(&["x"], "-log(x)", &["x"]).unwrap();
        let a = finite_difference_audit(&c, &[8e-5]).unwrap();
        assert!(a.steps[1] < FD_STEP_HIGHER);
        assert!(finite_difference_audit(&c, &[2e-9]).is_err());
    }
}
