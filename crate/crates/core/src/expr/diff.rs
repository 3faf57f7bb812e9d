use thiserror::Error;

use super::{Exponent, Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("abs is not differentiable; it may only appear in domain predicates")]
    Abs,
}

impl Expr {
    /// Exact partial derivative with respect to variable `var`.
    pub fn differentiate(&self, var: usize) -> Result<Expr, DiffError> {
        Ok(match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var { index, .. } => Expr::Const(if *index == var { 1.0 } else { 0.0 }),
            Expr::Sum(terms) => Expr::sum(
                terms
                    .iter()
                    .map(|t| t.differentiate(var))
                    .collect::<Result<_, _>>()?,
            ),
            Expr::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for (i, f) in factors.iter().enumerate() {
                    let df = f.differentiate(var)?;
                    if df.is_zero() {
                        continue;
                    }
                    let mut fs = factors.clone();
                    fs[i] = df;
                    terms.push(Expr::product(fs));
                }
                Expr::sum(terms)
            }
            Expr::Quotient(a, b) => {
                let da = a.differentiate(var)?;
                let db = b.differentiate(var)?;
                if db.is_zero() {
                    Expr::quotient(da, (**b).clone())
                } else {
                    let num = Expr::sub(
                        Expr::product(vec![da, (**b).clone()]),
                        Expr::product(vec![(**a).clone(), db]),
                    );
                    Expr::quotient(num, Expr::powi((**b).clone(), 2))
                }
            }
            Expr::Power(b, r) => {
                let db = b.differentiate(var)?;
                if db.is_zero() {
                    return Ok(Expr::zero());
                }
                let coeff = *r.numer() as f64 / *r.denom() as f64;
                Expr::product(vec![
                    Expr::Const(coeff),
                    Expr::power((**b).clone(), r - Exponent::from_integer(1)),
                    db,
                ])
            }
            Expr::Func(f, arg) => {
                if *f == Func::Abs {
                    return Err(DiffError::Abs);
                }
                let du = arg.differentiate(var)?;
                if du.is_zero() {
                    return Ok(Expr::zero());
                }
                let u = (**arg).clone();
                match f {
                    Func::Log => Expr::quotient(du, u),
                    Func::Exp => Expr::product(vec![self.clone(), du]),
                    Func::Sqrt => Expr::quotient(du, Expr::product(vec![Expr::Const(2.0), self.clone()])),
                    Func::Sin => Expr::product(vec![Expr::func(Func::Cos, u), du]),
                    Func::Cos => Expr::neg(Expr::product(vec![Expr::func(Func::Sin, u), du])),
                    Func::Abs => unreachable!(),
                }
            }
        })
    }
}
