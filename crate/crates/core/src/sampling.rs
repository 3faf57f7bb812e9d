//! Deterministic sample generation.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::tensor::DEGENERACY_THRESHOLD;

pub const DEFAULT_SEED: u64 = 42;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box bounds must have equal nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidArgument(format!("empty box {lo:?} .. {hi:?}")));
        }
        Ok(SampleBox { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        SampleBox {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn draw(&self, rng: &mut SampleRng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| rng.random_range(a..b))
            .collect()
    }
}

/// Draws admissible points with `|det Hess f|` above `min_det`, by
/// rejection. Gives up after `200 * count` draws.
pub fn sample_points(
    chart: &PotentialChart,
    bounds: &SampleBox,
    count: usize,
    min_det: f64,
    rng: &mut SampleRng,
) -> Result<Vec<Vec<f64>>> {
    if bounds.dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: bounds.dim(),
        });
    }
    let threshold = min_det.max(DEGENERACY_THRESHOLD);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= 200 * count.max(1) {
            return Err(Error::InvalidArgument(format!(
                "found only {} of {count} admissible nondegenerate samples in {bounds:?}",
                out.len()
            )));
        }
        attempts += 1;
        let p = bounds.draw(rng);
        if !chart.is_admissible(&p) {
            continue;
        }
        if chart.hessian(&p).is_ok_and(|h| h.determinant().abs() > threshold) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Random polynomial of degree at most 4: a diagonal quadratic with
/// coefficients in `[0.5, 2]` plus up to eight monomials of degree 2 to 4
/// with coefficients in `[-1, 1]`.
pub fn random_polynomial_chart(n: usize, rng: &mut SampleRng) -> PotentialChart {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    assert!((1..=NAMES.len()).contains(&n), "dimension {n} not supported");
    let vars: Vec<Expr> = (0..n).map(|i| Expr::var(i, NAMES[i])).collect();
    let mut terms = Vec::new();
    for v in &vars {
        let a = rng.random_range(0.5..2.0);
        terms.push(Expr::product(vec![Expr::Const(a), Expr::powi(v.clone(), 2)]));
    }
    let extra = rng.random_range(3..=8);
    for _ in 0..extra {
        let degree = rng.random_range(2..=4);
        let mut factors = vec![Expr::Const(rng.random_range(-1.0..1.0))];
        for _ in 0..degree {
            factors.push(vars[rng.random_range(0..n)].clone());
        }
        terms.push(Expr::product(factors));
    }
    let names = NAMES[..n].iter().map(|s| s.to_string()).collect();
    PotentialChart::new(names, Expr::sum(terms), Vec::new()).expect("polynomial chart is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_samples() {
        let c = PotentialChart::parse(&["x", "y"], "-log(x) - log(y)", &["x", "y"]).unwrap();
        let b = SampleBox::cube(2, -1.0, 2.0);
        let a = sample_points(&c, &b, 10, 0.0, &mut rng(7)).unwrap();
        let a2 = sample_points(&c, &b, 10, 0.0, &mut rng(7)).unwrap();
        assert_eq!(a, a2);
        assert!(a.iter().all(|p| p[0] > 0.0 && p[1] > 0.0));
    }

    #[test]
    fn impossible_region_errors() {
        let c = PotentialChart::parse(&["x"], "-log(x)", &["x"]).unwrap();
        let b = SampleBox::cube(1, -2.0, -1.0);
        assert!(sample_points(&c, &b, 3, 0.0, &mut rng(1)).is_err());
    }

    #[test]
    fn random_polynomials_are_polynomials_of_degree_at_most_four() {
        let mut r = rng(3);
        for n in [2, 3] {
            let c = random_polynomial_chart(n, &mut r);
            let p = vec![0.3; n];
            let fifth = c.partial(&vec![0; 5]).unwrap();
            assert_eq!(fifth.eval(&p).unwrap(), 0.0);
        }
    }
}
