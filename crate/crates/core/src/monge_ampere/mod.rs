//! The Cheng-Yau equation `det Hess u = e^{2nu}` on two-dimensional cones:
//! closed-form solutions, a damped Newton finite-difference solver and the
//! unit-covector identities.

mod banded;
mod solver;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};

pub use banded::{BandMatrix, SingularMatrix};
pub use solver::{solve, MASolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cone {
    /// `{x > 0, y > 0}`
    Orthant,
    /// `{t > |x|}` in coordinates `(x, t)`
    Lorentz,
}

impl Cone {
    pub fn coordinate_names(self) -> [&'static str; 2] {
        match self {
            Cone::Orthant => ["x", "y"],
            Cone::Lorentz => ["x", "t"],
        }
    }

    pub fn contains(self, p: &[f64]) -> bool {
        match self {
            Cone::Orthant => p[0] > 0.0 && p[1] > 0.0,
            Cone::Lorentz => p[1] > p[0].abs(),
        }
    }

    /// The unique convex solution with `u → ∞` at the boundary.
    pub fn exact_source(self) -> &'static str {
        match self {
            Cone::Orthant => "-0.5*(log(x) + log(y)) - 0.5*log(2)",
            Cone::Lorentz => "-0.5*log(t^2 - x^2)",
        }
    }

    pub fn exact_chart(self) -> PotentialChart {
        let domain: &[&str] = match self {
            Cone::Orthant => &["x", "y"],
            Cone::Lorentz => &["t^2 - x^2", "t"],
        };
        PotentialChart::parse(&self.coordinate_names(), self.exact_source(), domain)
            .expect("static chart")
    }

    pub fn default_window(self) -> Window {
        match self {
            Cone::Orthant => Window::new(1.0, 2.0, 1.0, 2.0),
            Cone::Lorentz => Window::new(0.05, 0.4, 1.2, 1.8),
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cone::Orthant => "orthant",
            Cone::Lorentz => "lorentz",
        })
    }
}

impl FromStr for Cone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthant" => Ok(Cone::Orthant),
            "lorentz" => Ok(Cone::Lorentz),
            _ => Err(Error::InvalidArgument(format!("unknown cone `{s}` (orthant|lorentz)"))),
        }
    }
}

pub fn exact_cone_solution(cone: Cone, p: &[f64]) -> Result<f64> {
    if p.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.len(),
        });
    }
    if !cone.contains(p) {
        return Err(Error::NotAdmissible(p.to_vec()));
    }
    Ok(match cone {
        Cone::Orthant => -0.5 * (p[0].ln() + p[1].ln()) - 0.5 * 2f64.ln(),
        Cone::Lorentz => -0.5 * (p[1] * p[1] - p[0] * p[0]).ln(),
    })
}

/// `det Hess u - e^{4u}` for the symbolic exact solution.
pub fn exact_pde_residual(cone: Cone, p: &[f64]) -> Result<f64> {
    let c = cone.exact_chart();
    let h = c.hessian(p)?;
    Ok(h.determinant() - (4.0 * c.value(p)?).exp())
}

/// `max |u(Lp) - u(p)|` for the orthant swap or a Lorentz boost of the
/// given rapidity.
pub fn equivariance_residual(cone: Cone, points: &[Vec<f64>], rapidity: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let q = match cone {
            Cone::Orthant => vec![p[1], p[0]],
            Cone::Lorentz => {
                let (c, s) = (rapidity.cosh(), rapidity.sinh());
                vec![c * p[0] + s * p[1], s * p[0] + c * p[1]]
            }
        };
        worst = worst.max((exact_cone_solution(cone, &q)? - exact_cone_solution(cone, p)?).abs());
    }
    Ok(worst)
}

/// Axis-aligned box `[a, b] × [c, d]` in the cone's coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Window {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Window { a, b, c, d }
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        [[self.a, self.c], [self.a, self.d], [self.b, self.c], [self.b, self.d]]
    }
}

impl FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("window `{s}` is not four numbers a,b,c,d")))?;
        match v.as_slice() {
            &[a, b, c, d] => Ok(Window::new(a, b, c, d)),
            _ => Err(Error::InvalidArgument(format!("window `{s}` needs exactly four numbers"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialGuess {
    /// Exact solution plus `amplitude · sin(πξ) sin(πη)` in window-relative
    /// coordinates.
    PerturbedExact { amplitude: f64 },
    /// Least-squares quadratic fit to the boundary values.
    QuadraticInterpolant,
}

pub const MIN_RESOLUTION: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeProblem {
    pub cone: Cone,
    pub window: Window,
    /// Interior nodes per direction.
    pub resolution: usize,
    pub initial: InitialGuess,
}

impl ConeProblem {
    pub fn new(cone: Cone, window: Window, resolution: usize) -> Result<Self> {
        let p = ConeProblem {
            cone,
            window,
            resolution,
            initial: InitialGuess::PerturbedExact { amplitude: 1e-3 },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_initial(mut self, initial: InitialGuess) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "resolution must be at least {MIN_RESOLUTION}, got {}",
                self.resolution
            )));
        }
        let w = self.window;
        if !(w.a < w.b && w.c < w.d) || [w.a, w.b, w.c, w.d].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("degenerate window {w:?}")));
        }
        // the window is convex, so its closure lies in the open cone iff the corners do
        if !w.corners().iter().all(|p| self.cone.contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "window {w:?} is not strictly inside the {} cone",
                self.cone
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> (f64, f64) {
        let m = (self.resolution + 1) as f64;
        ((self.window.b - self.window.a) / m, (self.window.d - self.window.c) / m)
    }

    /// Coordinates of grid node `(i, j)`, `0 ..= m + 1` in each direction.
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let (hx, hy) = self.steps();
        [self.window.a + i as f64 * hx, self.window.c + j as f64 * hy]
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct UnitCovectorResidual {
    /// `max |⟨∇u, H⁻¹∇u⟩ - 1|`
    pub quadratic_form: f64,
    /// `max |⟨∇u, x⟩ + 1|`
    pub euler: f64,
    /// `max ‖H⁻¹∇u + x‖`
    pub position: f64,
}

impl UnitCovectorResidual {
    pub fn max(&self) -> f64 {
        self.quadratic_form.max(self.euler).max(self.position)
    }

    fn absorb(&mut self, x: &[f64], grad: &DVector<f64>, hess: &DMatrix<f64>, at: &[f64]) -> Result<()> {
        let hinv = hess.clone().try_inverse().ok_or(Error::DegenerateMetric {
            point: at.to_vec(),
            det: hess.determinant(),
        })?;
        let v = &hinv * grad;
        let xv = DVector::from_column_slice(x);
        self.quadratic_form = self.quadratic_form.max((grad.dot(&v) - 1.0).abs());
        self.euler = self.euler.max((grad.dot(&xv) + 1.0).abs());
        self.position = self.position.max((v + xv).norm());
        Ok(())
    }
}

/// The three identities at symbolic sample points of a potential chart.
pub fn unit_covector_check(u: &PotentialChart, points: &[Vec<f64>]) -> Result<UnitCovectorResidual> {
    let mut r = UnitCovectorResidual::default();
    for p in points {
        let g = u.gradient(p)?;
        let h = u.hessian(p)?;
        r.absorb(p, &g, &h, p)?;
    }
    Ok(r)
}

/// The same identities on a grid solution, with central-difference
/// gradients and the solver's discrete Hessian at every interior node.
pub fn unit_covector_check_grid(sol: &MASolution) -> Result<UnitCovectorResidual> {
    let mut r = UnitCovectorResidual::default();
    let m = sol.problem.resolution;
    for j in 1..=m {
        for i in 1..=m {
            let (g, h) = sol.discrete_derivatives(i, j);
            let x = sol.problem.node(i, j);
            r.absorb(&x, &g, &h, &x)?;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert!((exact_cone_solution(Cone::Orthant, &[1.0, 1.0]).unwrap() + 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(exact_cone_solution(Cone::Lorentz, &[0.0, 1.0]).unwrap(), 0.0);
        for cone in [Cone::Orthant, Cone::Lorentz] {
            let p = match cone {
                Cone::Orthant => [1.0, 1.0],
                Cone::Lorentz => [0.3, 1.0],
            };
            let u1 = exact_cone_solution(cone, &p).unwrap();
            let u2 = exact_cone_solution(cone, &[2.0 * p[0], 2.0 * p[1]]).unwrap();
            assert!((u2 - (u1 - 2f64.ln())).abs() < 1e-15);
        }
        assert!(exact_cone_solution(Cone::Lorentz, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn exact_solutions_solve_the_equation() {
        for (cone, p) in [(Cone::Orthant, [1.3, 0.7]), (Cone::Lorentz, [0.2, 1.1])] {
            assert!(exact_pde_residual(cone, &p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn unit_covector_on_exact_solutions() {
        let r = unit_covector_check(&Cone::Orthant.exact_chart(), &[vec![1.0, 1.0], vec![0.4, 2.2]]).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
        let c = Cone::Lorentz.exact_chart();
        let r = unit_covector_check(&c, &[vec![0.0, 1.0], vec![-0.5, 0.9]]).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
        let h = c.hessian(&[0.0, 1.0]).unwrap();
        let v = h.try_inverse().unwrap() * c.gradient(&[0.0, 1.0]).unwrap();
        assert!((v - DVector::from_vec(vec![0.0, -1.0])).norm() < 1e-15);
    }

    #[test]
    fn quadratic_is_not_a_solution() {
        let q = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let r = unit_covector_check(&q, &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(r.euler, 3.0);
        assert!(r.max() >= 1.0);
    }

    #[test]
    fn equivariance() {
        let pts = vec![vec![0.3, 1.2], vec![1.0, 2.0]];
        assert!(equivariance_residual(Cone::Orthant, &pts, 0.0).unwrap() < 1e-15);
        assert!(equivariance_residual(Cone::Lorentz, &pts, 0.3).unwrap() < 1e-10);
    }

    #[test]
    fn problem_validation() {
        assert!(ConeProblem::new(Cone::Orthant, Window::new(1.0, 2.0, 1.0, 2.0), 8).is_err());
        assert!(ConeProblem::new(Cone::Orthant, Window::new(0.0, 2.0, 1.0, 2.0), 9).is_err());
        assert!(ConeProblem::new(Cone::Lorentz, Window::new(0.05, 0.4, 0.3, 1.8), 9).is_err());
        assert!(ConeProblem::new(Cone::Lorentz, Cone::Lorentz.default_window(), 9).is_ok());
        assert_eq!("1,2,1,2".parse::<Window>().unwrap(), Window::new(1.0, 2.0, 1.0, 2.0));
        assert!("1,2,1".parse::<Window>().is_err());
    }
}
