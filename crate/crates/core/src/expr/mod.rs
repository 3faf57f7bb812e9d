//! Scalar expressions in `n` real variables.
//!
//! Expressions are immutable trees built through normalizing constructors
//! ([`Expr::sum`], [`Expr::product`], ...). The constructors flatten nested
//! sums and products, fold constants and apply the 0/1 identities, so every
//! tree reachable from the parser or from [`Expr::differentiate`] is already
//! in that light normal form. No further canonicalization is attempted.

mod diff;
mod eval;
mod parse;
mod print;

use std::sync::Arc;

use num_rational::Ratio;

pub use diff::DiffError;
pub use eval::EvalError;
pub use parse::{parse, ParseError, ParseErrorKind};

/// Rational exponent of a power node.
pub type Exponent = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Sin,
    Cos,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    /// Applies the function, returning `None` outside its real domain.
    pub(crate) fn apply(self, x: f64) -> Option<f64> {
        match self {
            Func::Log if x > 0.0 => Some(x.ln()),
            Func::Sqrt if x > 0.0 => Some(x.sqrt()),
            Func::Log | Func::Sqrt => None,
            Func::Exp => Some(x.exp()),
            Func::Sin => Some(x.sin()),
            Func::Cos => Some(x.cos()),
            Func::Abs => Some(x.abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var { index: usize, name: Arc<str> },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, Exponent),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(index: usize, name: impl Into<Arc<str>>) -> Expr {
        Expr::Var {
            index,
            name: name.into(),
        }
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Flattened sum with all constant terms folded into one trailing constant.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(terms.len());
        let mut constant = 0.0;
        let mut saw_constant = false;
        let mut stack: Vec<Expr> = terms.into_iter().rev().collect();
        while let Some(term) = stack.pop() {
            match term {
                Expr::Sum(inner) => stack.extend(inner.into_iter().rev()),
                Expr::Const(c) => {
                    constant += c;
                    saw_constant = true;
                }
                other => out.push(other),
            }
        }
        if saw_constant && (constant != 0.0 || out.is_empty()) {
            out.push(Expr::Const(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Sum(out),
        }
    }

    /// Flattened product with constants folded into one leading factor.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(factors.len() + 1);
        let mut constant = 1.0;
        let mut stack: Vec<Expr> = factors.into_iter().rev().collect();
        while let Some(factor) = stack.pop() {
            match factor {
                Expr::Product(inner) => stack.extend(inner.into_iter().rev()),
                Expr::Const(c) => constant *= c,
                other => out.push(other),
            }
        }
        if constant == 0.0 || out.is_empty() {
            return Expr::Const(constant);
        }
        if constant != 1.0 {
            out.insert(0, Expr::Const(constant));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::Product(out)
        }
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::product(vec![Expr::Const(-1.0), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        match (&num, &den) {
            (_, Expr::Const(d)) if *d == 1.0 => num,
            (Expr::Const(a), Expr::Const(b)) if *b != 0.0 => Expr::Const(a / b),
            _ => Expr::Quotient(Box::new(num), Box::new(den)),
        }
    }

    pub fn power(base: Expr, exponent: Exponent) -> Expr {
        if exponent == Exponent::from_integer(0) {
            return Expr::one();
        }
        if exponent == Exponent::from_integer(1) {
            return base;
        }
        match base {
            Expr::Const(c) => match eval::rational_pow(c, exponent) {
                Some(v) if v.is_finite() => Expr::Const(v),
                _ => Expr::Power(Box::new(Expr::Const(c)), exponent),
            },
            // (b^r)^s = b^(rs) is safe for integer s wherever the left side is defined.
            Expr::Power(inner, r) if exponent.is_integer() => Expr::power(*inner, r * exponent),
            base => Expr::Power(Box::new(base), exponent),
        }
    }

    pub fn powi(base: Expr, exponent: i64) -> Expr {
        Expr::power(base, Exponent::from_integer(exponent))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Expr::Const(c) = arg {
            if let Some(v) = f.apply(c) {
                if v.is_finite() {
                    return Expr::Const(v);
                }
            }
        }
        Expr::Func(f, Box::new(arg))
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::func(Func::Log, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    /// Largest variable index plus one, i.e. the smallest dimension this
    /// expression can live in.
    pub fn min_dimension(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var { index, .. } => index + 1,
            Expr::Sum(v) | Expr::Product(v) => v.iter().map(Expr::min_dimension).max().unwrap_or(0),
            Expr::Quotient(a, b) => a.min_dimension().max(b.min_dimension()),
            Expr::Power(b, _) | Expr::Func(_, b) => b.min_dimension(),
        }
    }

    pub fn contains_abs(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var { .. } => false,
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(Expr::contains_abs),
            Expr::Quotient(a, b) => a.contains_abs() || b.contains_abs(),
            Expr::Power(b, _) => b.contains_abs(),
            Expr::Func(f, b) => *f == Func::Abs || b.contains_abs(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Const(_) | Expr::Var { .. } => 0,
            Expr::Sum(v) | Expr::Product(v) => v.iter().map(Expr::size).sum(),
            Expr::Quotient(a, b) => a.size() + b.size(),
            Expr::Power(b, _) | Expr::Func(_, b) => b.size(),
        }
    }

    /// Replaces every variable `i` with `replacements[i]`, rebuilding through
    /// the normalizing constructors.
    ///
    /// Panics if a variable index has no replacement.
    pub fn substitute(&self, replacements: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var { index, .. } => replacements[*index].clone(),
            Expr::Sum(v) => Expr::sum(v.iter().map(|e| e.substitute(replacements)).collect()),
            Expr::Product(v) => {
                Expr::product(v.iter().map(|e| e.substitute(replacements)).collect())
            }
            Expr::Quotient(a, b) => {
                Expr::quotient(a.substitute(replacements), b.substitute(replacements))
            }
            Expr::Power(b, r) => Expr::power(b.substitute(replacements), *r),
            Expr::Func(f, b) => Expr::func(*f, b.substitute(replacements)),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Expr {
        Expr::Const(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var(0, "x")
    }

    #[test]
    fn sum_flattens_and_folds() {
        let e = Expr::sum(vec![
            Expr::Const(1.0),
            Expr::sum(vec![x(), Expr::Const(2.0)]),
            Expr::Const(-3.0),
        ]);
        assert_eq!(e, x());
    }

    #[test]
    fn product_folds_constants_to_front() {
        let e = Expr::product(vec![x(), Expr::Const(2.0), Expr::product(vec![Expr::Const(3.0), x()])]);
        assert_eq!(e, Expr::Product(vec![Expr::Const(6.0), x(), x()]));
        assert_eq!(Expr::product(vec![x(), Expr::Const(0.0)]), Expr::zero());
        assert_eq!(Expr::product(vec![Expr::one(), x()]), x());
    }

    #[test]
    fn power_identities() {
        assert_eq!(Expr::powi(x(), 0), Expr::one());
        assert_eq!(Expr::powi(x(), 1), x());
        assert_eq!(Expr::powi(Expr::powi(x(), 2), 3), Expr::powi(x(), 6));
        assert_eq!(Expr::powi(Expr::Const(3.0), 2), Expr::Const(9.0));
        // fractional outer exponent is left alone
        let half = Exponent::new(1, 2);
        assert!(matches!(Expr::power(Expr::powi(x(), 2), half), Expr::Power(..)));
    }

    #[test]
    fn quotient_identities() {
        assert_eq!(Expr::quotient(Expr::zero(), x()), Expr::zero());
        assert_eq!(Expr::quotient(x(), Expr::one()), x());
        assert_eq!(Expr::quotient(Expr::Const(1.0), Expr::Const(4.0)), Expr::Const(0.25));
    }

    #[test]
    fn func_folding_respects_domain() {
        assert_eq!(Expr::log(Expr::one()), Expr::Const(0.0));
        assert!(matches!(Expr::log(Expr::Const(-1.0)), Expr::Func(Func::Log, _)));
    }

    #[test]
    fn substitute_rebuilds() {
        let e = x() * x();
        let s = e.substitute(&[Expr::Const(3.0)]);
        assert_eq!(s, Expr::Const(9.0));
    }
}
