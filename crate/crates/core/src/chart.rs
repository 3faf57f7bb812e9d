//! One affine chart carrying a potential function.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use ndarray::{Array3, Array4, ArrayD, IxDyn};

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Func};

/// Default margin for domain predicates: a point is admissible when every
/// predicate evaluates strictly above this value.
pub const DOMAIN_MARGIN: f64 = 1e-9;

pub struct PotentialChart {
    names: Vec<String>,
    potential: Expr,
    domain: Vec<Expr>,
    margin: f64,
    // sorted multi-index -> symbolic partial derivative
    cache: Mutex<HashMap<Vec<usize>, Arc<Expr>>>,
}

impl std::fmt::Debug for PotentialChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialChart")
            .field("names", &self.names)
            .field("potential", &self.potential.to_string())
            .field("domain", &self.domain.iter().map(ToString::to_string).collect::<Vec<_>>())
            .finish()
    }
}

impl Clone for PotentialChart {
    fn clone(&self) -> Self {
        PotentialChart {
            names: self.names.clone(),
            potential: self.potential.clone(),
            domain: self.domain.clone(),
            margin: self.margin,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl PotentialChart {
    pub fn new(names: Vec<String>, potential: Expr, domain: Vec<Expr>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidChart("dimension must be at least 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidChart(format!("duplicate variable name `{n}`")));
            }
            if Func::from_name(n).is_some() {
                return Err(Error::InvalidChart(format!("variable name `{n}` shadows a function")));
            }
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidChart(format!("`{n}` is not a valid identifier")));
            }
        }
        let dim = names.len();
        if potential.min_dimension() > dim || domain.iter().any(|d| d.min_dimension() > dim) {
            return Err(Error::InvalidChart(format!(
                "expression refers to a variable beyond dimension {dim}"
            )));
        }
        if potential.contains_abs() {
            return Err(Error::InvalidChart(
                "abs may only appear in domain predicates".into(),
            ));
        }
        let mut cache = HashMap::new();
        cache.insert(Vec::new(), Arc::new(potential.clone()));
        Ok(PotentialChart {
            names,
            potential,
            domain,
            margin: DOMAIN_MARGIN,
            cache: Mutex::new(cache),
        })
    }

    /// Builds a chart from source text; `domain` entries are expressions
    /// required to be positive.
    pub fn parse(names: &[&str], potential: &str, domain: &[&str]) -> Result<Self> {
        let potential = parse(potential, names)?;
        let domain = domain
            .iter()
            .map(|d| parse(d, names))
            .collect::<Result<Vec<_>, _>>()?;
        PotentialChart::new(names.iter().map(|s| s.to_string()).collect(), potential, domain)
    }

    pub fn with_domain_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    /// Same chart with the potential replaced.
    pub fn with_potential(&self, potential: Expr) -> Result<Self> {
        PotentialChart::new(self.names.clone(), potential, self.domain.clone())
            .map(|c| c.with_domain_margin(self.margin))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn domain(&self) -> &[Expr] {
        &self.domain
    }

    pub fn domain_margin(&self) -> f64 {
        self.margin
    }

    /// Parses an auxiliary expression (a covector component, a vector field
    /// component) over this chart's variables.
    pub fn parse_expr(&self, source: &str) -> Result<Expr> {
        Ok(parse(source, &self.name_refs())?)
    }

    pub fn is_admissible(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().all(|x| x.is_finite())
            && self
                .domain
                .iter()
                .all(|d| d.eval(p).is_ok_and(|v| v > self.margin))
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        if !self.is_admissible(p) {
            return Err(Error::NotAdmissible(p.to_vec()));
        }
        Ok(())
    }

    /// Symbolic partial derivative for a multi-index (any order of indices).
    pub fn partial(&self, multi: &[usize]) -> Result<Arc<Expr>> {
        if let Some(&bad) = multi.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::InvalidArgument(format!(
                "variable index {bad} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut key = multi.to_vec();
        key.sort_unstable();
        self.partial_sorted(&key)
    }

    fn partial_sorted(&self, key: &[usize]) -> Result<Arc<Expr>> {
        if let Some(e) = self.cache.lock().unwrap().get(key) {
            return Ok(e.clone());
        }
        let (last, parent_key) = key.split_last().expect("empty key is always cached");
        let parent = self.partial_sorted(parent_key)?;
        let d = Arc::new(parent.differentiate(*last)?);
        self.cache
            .lock()
            .unwrap()
            .entry(key.to_vec())
            .or_insert_with(|| d.clone());
        Ok(d)
    }

    pub fn value(&self, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.potential.eval(p)?)
    }

    pub fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.check_point(p)?;
        let n = self.dim();
        let mut g = DVector::zeros(n);
        for i in 0..n {
            g[i] = self.partial(&[i])?.eval(p)?;
        }
        Ok(g)
    }

    /// Fully symmetric array of all order-`order` partials at `p`. Each
    /// distinct multi-index is evaluated once and copied to every
    /// permutation, so symmetry is exact.
    pub fn derivative_tensor(&self, order: usize, p: &[f64]) -> Result<ArrayD<f64>> {
        self.check_point(p)?;
        let n = self.dim();
        let mut out = ArrayD::zeros(IxDyn(&vec![n; order]));
        for key in sorted_multi_indices(n, order) {
            let v = self.partial_sorted(&key)?.eval(p)?;
            for perm in permutations(&key) {
                out[IxDyn(&perm)] = v;
            }
        }
        Ok(out)
    }

    pub fn hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let t = self.derivative_tensor(2, p)?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |i, j| t[[i, j]]))
    }

    pub fn third(&self, p: &[f64]) -> Result<Array3<f64>> {
        Ok(self
            .derivative_tensor(3, p)?
            .into_dimensionality()
            .expect("order-3 tensor"))
    }

    pub fn fourth(&self, p: &[f64]) -> Result<Array4<f64>> {
        Ok(self
            .derivative_tensor(4, p)?
            .into_dimensionality()
            .expect("order-4 tensor"))
    }
}

/// Non-decreasing index tuples of length `order` over `0..n`.
pub(crate) fn sorted_multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(order);
    fn rec(n: usize, order: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == order {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, order, i, cur, out);
            cur.pop();
        }
    }
    rec(n, order, 0, &mut cur, &mut out);
    out
}

/// Distinct permutations of a sorted tuple.
fn permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![sorted.to_vec()];
    let mut cur = sorted.to_vec();
    // next_permutation over a multiset
    loop {
        let k = match (0..cur.len().saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) {
            Some(k) => k,
            None => return out,
        };
        let l = (k + 1..cur.len()).rev().find(|&l| cur[k] < cur[l]).unwrap();
        cur.swap(k, l);
        cur[k + 1..].reverse();
        out.push(cur.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_counts() {
        assert_eq!(sorted_multi_indices(3, 4).len(), 15);
        assert_eq!(sorted_multi_indices(2, 3).len(), 4);
        assert_eq!(permutations(&[0, 0, 1]).len(), 3);
        assert_eq!(permutations(&[0, 1, 2, 2]).len(), 12);
    }

    #[test]
    fn quadratic_tensors() {
        let c = PotentialChart::parse(&["x", "y"], "0.5*(x^2 + y^2)", &[]).unwrap();
        let p = [0.3, -1.2];
        assert_eq!(c.hessian(&p).unwrap(), DMatrix::identity(2, 2));
        assert!(c.third(&p).unwrap().iter().all(|&v| v == 0.0));
        assert!(c.fourth(&p).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cone_hessian_is_identity_at_apex_axis() {
        let c = PotentialChart::parse(
            &["x", "y", "t"],
            "-0.5*log(t^2 - x^2 - y^2)",
            &["t^2 - x^2 - y^2", "t"],
        )
        .unwrap();
        let h = c.hessian(&[0.0, 0.0, 1.0]).unwrap();
        // 2(t dt - x dx - y dy)^2/Q^2 - (dt^2 - dx^2 - dy^2)/Q at Q = 1
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0]));
        assert!((h - expected).abs().max() < 1e-15);
    }

    #[test]
    fn invalid_charts() {
        assert!(PotentialChart::parse(&[], "1", &[]).is_err());
        assert!(PotentialChart::parse(&["x", "x"], "x", &[]).is_err());
        assert!(PotentialChart::parse(&["log"], "1", &[]).is_err());
        assert!(PotentialChart::parse(&["x"], "abs(x)", &[]).is_err());
        assert!(PotentialChart::parse(&["x"], "x^2", &["abs(x)"]).is_ok());
    }

    #[test]
    fn admissibility_uses_margin() {
        let c = PotentialChart::parse(&["x"], "-log(x)", &["x"]).unwrap();
        assert!(c.is_admissible(&[1.0]));
        assert!(!c.is_admissible(&[1e-10]));
        assert!(matches!(c.value(&[-1.0]), Err(Error::NotAdmissible(_))));
        assert!(matches!(c.value(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_rejects_bad_index() {
        let c = PotentialChart::parse(&["x"], "x^3", &[]).unwrap();
        assert!(c.partial(&[1]).is_err());
        assert_eq!(c.partial(&[0, 0, 0]).unwrap().eval(&[5.0]).unwrap(), 6.0);
    }
}
