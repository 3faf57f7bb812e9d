use thiserror::Error;

use super::{Exponent, Expr};

/// Evaluation left the real domain of some subexpression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("{func} of non-positive argument {value} in `{expr}`")]
    NonPositiveArgument {
        func: &'static str,
        value: f64,
        expr: String,
    },
    #[error("negative base {value} raised to {exponent} in `{expr}`")]
    NegativeBase {
        value: f64,
        exponent: String,
        expr: String,
    },
    #[error("variable index {index} not present in a point of dimension {dim}")]
    MissingCoordinate { index: usize, dim: usize },
}

/// `base^exponent` with real-valued semantics: odd-denominator roots of
/// negative numbers are allowed, even-denominator ones are not.
pub(crate) fn rational_pow(base: f64, exponent: Exponent) -> Option<f64> {
    let (num, den) = (*exponent.numer(), *exponent.denom());
    if den == 1 {
        if base == 0.0 && num < 0 {
            return None;
        }
        return Some(match i32::try_from(num) {
            Ok(k) => base.powi(k),
            Err(_) => base.powf(num as f64),
        });
    }
    let r = num as f64 / den as f64;
    if base > 0.0 {
        Some(base.powf(r))
    } else if base == 0.0 {
        (num > 0).then_some(0.0)
    } else if den % 2 != 0 {
        let mag = (-base).powf(r);
        Some(if num % 2 == 0 { mag } else { -mag })
    } else {
        None
    }
}

impl Expr {
    /// Evaluates at a point given as coordinates indexed by variable index.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var { index, .. } => point.get(*index).copied().ok_or(EvalError::MissingCoordinate {
                index: *index,
                dim: point.len(),
            }),
            Expr::Sum(terms) => terms.iter().try_fold(0.0, |acc, t| Ok(acc + t.eval(point)?)),
            Expr::Product(factors) => {
                factors.iter().try_fold(1.0, |acc, f| Ok(acc * f.eval(point)?))
            }
            Expr::Quotient(a, b) => {
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero(self.to_string()));
                }
                Ok(a.eval(point)? / den)
            }
            Expr::Power(b, r) => {
                let base = b.eval(point)?;
                rational_pow(base, *r).ok_or_else(|| {
                    if base == 0.0 {
                        EvalError::DivisionByZero(self.to_string())
                    } else {
                        EvalError::NegativeBase {
                            value: base,
                            exponent: r.to_string(),
                            expr: self.to_string(),
                        }
                    }
                })
            }
            Expr::Func(f, arg) => {
                let x = arg.eval(point)?;
                f.apply(x).ok_or_else(|| EvalError::NonPositiveArgument {
                    func: f.name(),
                    value: x,
                    expr: self.to_string(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ev(src: &str, vars: &[&str], p: &[f64]) -> Result<f64, EvalError> {
        parse(src, vars).unwrap().eval(p)
    }

    #[test]
    fn spec_points_evaluate_to_zero() {
        assert_eq!(ev("-0.5*log(t^2 - x^2 - y^2)", &["x", "y", "t"], &[0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(ev("x^2/(2*y) + 0.25*log(y)*y", &["x", "y"], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(ev("y1^2/(8*y2) - 0.25*log(y2)", &["y1", "y2"], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let err = ev("x + log(y)", &["x", "y"], &[1.0, -2.0]).unwrap_err();
        match err {
            EvalError::NonPositiveArgument { func, expr, .. } => {
                assert_eq!(func, "log");
                assert_eq!(expr, "log(y)");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ev("1/x", &["x"], &[0.0]), Err(EvalError::DivisionByZero(_))));
        assert!(matches!(ev("sqrt(x)", &["x"], &[0.0]), Err(EvalError::NonPositiveArgument { .. })));
        assert!(matches!(ev("x^(1/2)", &["x"], &[-1.0]), Err(EvalError::NegativeBase { .. })));
        assert!(matches!(ev("x^-1", &["x"], &[0.0]), Err(EvalError::DivisionByZero(_))));
    }

    #[test]
    fn odd_roots_of_negatives() {
        assert!((ev("x^(1/3)", &["x"], &[-8.0]).unwrap() + 2.0).abs() < 1e-15);
        assert!((ev("x^(2/3)", &["x"], &[-8.0]).unwrap() - 4.0).abs() < 1e-14);
    }
}
