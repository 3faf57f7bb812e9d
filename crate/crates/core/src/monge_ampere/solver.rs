use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::banded::BandMatrix;
use super::{exact_cone_solution, ConeProblem, InitialGuess};
use crate::error::{Error, Result};

pub const NEWTON_TOLERANCE: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const MAX_NONCONVEX_RETRIES: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct MASolution {
    pub problem: ConeProblem,
    /// Node values on the full `(m+2)×(m+2)` grid including the boundary,
    /// row-major with the second coordinate as the row index.
    pub values: Vec<f64>,
    /// `det(H_h u) - e^{4u}` at interior nodes, row-major.
    pub residuals: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smallest eigenvalue of the discrete Hessian over interior nodes.
    pub min_eigenvalue: f64,
    /// Residual norm before each Newton step and after the last one.
    pub trace: Vec<f64>,
}

struct Grid {
    m: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.m + 2) + i
    }

    fn unknown(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.m + (i - 1)
    }

    /// `(u_xx, u_yy, u_xy)` at interior node `(i, j)`.
    fn hessian(&self, u: &[f64], i: usize, j: usize) -> (f64, f64, f64) {
        let c = u[self.idx(i, j)];
        let uxx = (u[self.idx(i + 1, j)] - 2.0 * c + u[self.idx(i - 1, j)]) / (self.hx * self.hx);
        let uyy = (u[self.idx(i, j + 1)] - 2.0 * c + u[self.idx(i, j - 1)]) / (self.hy * self.hy);
        let uxy = (u[self.idx(i + 1, j + 1)] - u[self.idx(i + 1, j - 1)] - u[self.idx(i - 1, j + 1)]
            + u[self.idx(i - 1, j - 1)])
            / (4.0 * self.hx * self.hy);
        (uxx, uyy, uxy)
    }

    fn residuals(&self, u: &[f64]) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.m * self.m);
        for j in 1..=self.m {
            for i in 1..=self.m {
                let (uxx, uyy, uxy) = self.hessian(u, i, j);
                g.push(uxx * uyy - uxy * uxy - (4.0 * u[self.idx(i, j)]).exp());
            }
        }
        g
    }

    fn min_eigenvalue(&self, u: &[f64]) -> f64 {
        let mut lo = f64::INFINITY;
        for j in 1..=self.m {
            for i in 1..=self.m {
                let (a, c, b) = self.hessian(u, i, j);
                // smaller eigenvalue of [[a, b], [b, c]]
                let mean = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                lo = lo.min(mean - rad);
            }
        }
        lo
    }

    /// Newton matrix of `G`: `u_yy ∂_xx + u_xx ∂_yy - 2u_xy ∂_xy - 4e^{4u}`.
    fn jacobian(&self, u: &[f64]) -> BandMatrix {
        let m = self.m;
        let n = m * m;
        let mut jac = BandMatrix::zeros(n, m + 1, m + 1);
        let (ixx, iyy, ixy) = (
            1.0 / (self.hx * self.hx),
            1.0 / (self.hy * self.hy),
            1.0 / (4.0 * self.hx * self.hy),
        );
        for j in 1..=m {
            for i in 1..=m {
                let row = self.unknown(i, j);
                let (uxx, uyy, uxy) = self.hessian(u, i, j);
                let mut put = |ii: usize, jj: usize, v: f64| {
                    if (1..=m).contains(&ii) && (1..=m).contains(&jj) {
                        jac.add(row, self.unknown(ii, jj), v);
                    }
                };
                put(i, j, -2.0 * uyy * ixx - 2.0 * uxx * iyy - 4.0 * (4.0 * u[self.idx(i, j)]).exp());
                put(i + 1, j, uyy * ixx);
                put(i - 1, j, uyy * ixx);
                put(i, j + 1, uxx * iyy);
                put(i, j - 1, uxx * iyy);
                let c = -2.0 * uxy * ixy;
                put(i + 1, j + 1, c);
                put(i - 1, j - 1, c);
                put(i + 1, j - 1, -c);
                put(i - 1, j + 1, -c);
            }
        }
        jac
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn initial_values(problem: &ConeProblem, grid: &Grid) -> Result<Vec<f64>> {
    let m = grid.m;
    let mut u = vec![0.0; (m + 2) * (m + 2)];
    for j in 0..=m + 1 {
        for i in 0..=m + 1 {
            u[grid.idx(i, j)] = exact_cone_solution(problem.cone, &problem.node(i, j))?;
        }
    }
    match problem.initial {
        InitialGuess::PerturbedExact { amplitude } => {
            let s = (m + 1) as f64;
            for j in 1..=m {
                for i in 1..=m {
                    let bump = (std::f64::consts::PI * i as f64 / s).sin()
                        * (std::f64::consts::PI * j as f64 / s).sin();
                    u[grid.idx(i, j)] += amplitude * bump;
                }
            }
        }
        InitialGuess::QuadraticInterpolant => {
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for j in 0..=m + 1 {
                for i in 0..=m + 1 {
                    if i == 0 || j == 0 || i == m + 1 || j == m + 1 {
                        let [x, y] = problem.node(i, j);
                        rows.extend_from_slice(&[1.0, x, y, x * x, x * y, y * y]);
                        rhs.push(u[grid.idx(i, j)]);
                    }
                }
            }
            let a = DMatrix::from_row_slice(rhs.len(), 6, &rows);
            let b = DVector::from_vec(rhs);
            let coef = a
                .svd(true, true)
                .solve(&b, 1e-14)
                .map_err(|e| Error::InvalidArgument(format!("quadratic fit failed: {e}")))?;
            for j in 1..=m {
                for i in 1..=m {
                    let [x, y] = problem.node(i, j);
                    let basis = [1.0, x, y, x * x, x * y, y * y];
                    u[grid.idx(i, j)] = basis.iter().zip(coef.iter()).map(|(p, c)| p * c).sum();
                }
            }
        }
    }
    Ok(u)
}

/// Damped Newton on `det(H_h u) = e^{4u}` with exact boundary data.
///
/// Each step backtracks by halves (at most 20) until the residual norm
/// decreases and the discrete Hessian stays positive definite; more than
/// five non-convex trial steps in one iteration is an error.
pub fn solve(problem: &ConeProblem) -> Result<MASolution> {
    problem.validate()?;
    let m = problem.resolution;
    let (hx, hy) = problem.steps();
    let grid = Grid { m, hx, hy };
    let mut u = initial_values(problem, &grid)?;
    let mut g = grid.residuals(&u);
    let mut norm = max_abs(&g);
    let mut trace = vec![norm];
    let mut iterations = 0;
    let fail = |iterations: usize, reason: String, trace: &[f64]| Error::Solver {
        iterations,
        reason,
        trace: trace.to_vec(),
    };
    while norm >= NEWTON_TOLERANCE && iterations < MAX_NEWTON_ITERATIONS {
        let mut delta: Vec<f64> = g.iter().map(|v| -v).collect();
        grid.jacobian(&u)
            .solve(&mut delta)
            .map_err(|s| fail(iterations, format!("singular Newton matrix at column {}", s.column), &trace))?;
        let mut lambda = 1.0;
        let mut nonconvex = 0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = u.clone();
            for j in 1..=m {
                for i in 1..=m {
                    trial[grid.idx(i, j)] += lambda * delta[grid.unknown(i, j)];
                }
            }
            if grid.min_eigenvalue(&trial) <= 0.0 {
                nonconvex += 1;
                if nonconvex > MAX_NONCONVEX_RETRIES {
                    return Err(fail(iterations, "iterate lost convexity".into(), &trace));
                }
            } else {
                let tg = grid.residuals(&trial);
                let tn = max_abs(&tg);
                if tn < norm {
                    accepted = Some((trial, tg, tn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, tg, tn)) = accepted else {
            return Err(fail(iterations, "line search exhausted 20 halvings".into(), &trace));
        };
        u = trial;
        g = tg;
        norm = tn;
        iterations += 1;
        trace.push(norm);
    }
    Ok(MASolution {
        problem: *problem,
        min_eigenvalue: grid.min_eigenvalue(&u),
        values: u,
        residuals: g,
        residual_norm: norm,
        iterations,
        converged: norm < NEWTON_TOLERANCE,
        trace,
    })
}

impl MASolution {
    fn grid(&self) -> Grid {
        let (hx, hy) = self.problem.steps();
        Grid {
            m: self.problem.resolution,
            hx,
            hy,
        }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid().idx(i, j)]
    }

    /// Central-difference gradient and discrete Hessian at an interior node.
    pub fn discrete_derivatives(&self, i: usize, j: usize) -> (DVector<f64>, DMatrix<f64>) {
        let g = self.grid();
        let u = &self.values;
        let gx = (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.hx);
        let gy = (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.hy);
        let (uxx, uyy, uxy) = g.hessian(u, i, j);
        (
            DVector::from_vec(vec![gx, gy]),
            DMatrix::from_row_slice(2, 2, &[uxx, uxy, uxy, uyy]),
        )
    }

    /// `max |u_h - u|` over interior nodes.
    pub fn max_error(&self) -> Result<f64> {
        let m = self.problem.resolution;
        let mut worst: f64 = 0.0;
        for j in 1..=m {
            for i in 1..=m {
                let exact = exact_cone_solution(self.problem.cone, &self.problem.node(i, j))?;
                worst = worst.max((self.value(i, j) - exact).abs());
            }
        }
        Ok(worst)
    }

    /// Interior nodes as CSV, row-major, 17 significant digits.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        let [a, b] = self.problem.cone.coordinate_names();
        writeln!(out, "{a},{b},u,residual")?;
        let m = self.problem.resolution;
        for j in 1..=m {
            for i in 1..=m {
                let [x, y] = self.problem.node(i, j);
                let r = self.residuals[(j - 1) * m + (i - 1)];
                writeln!(out, "{x:.16e},{y:.16e},{:.16e},{r:.16e}", self.value(i, j))?;
            }
        }
        Ok(())
    }
}
