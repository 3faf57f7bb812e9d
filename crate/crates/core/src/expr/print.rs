//! Printing in the input grammar.
//!
//! Parenthesization is chosen so that parsing the printed text rebuilds a
//! structurally equal tree for every normalized expression.

use std::fmt;

use super::{Exponent, Expr};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    /// A term of a sum, or the whole expression.
    Term,
    /// The leading factor of a product, or a quotient numerator.
    Leading,
    /// A non-leading factor or a denominator.
    Factor,
    /// A power base.
    Base,
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_nan() {
        write!(f, "(0/0)")
    } else if c.is_infinite() {
        write!(f, "({}1/0)", if c < 0.0 { "-" } else { "" })
    } else {
        write!(f, "{c:?}")
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, r: Exponent) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

fn needs_parens(e: &Expr, slot: Slot) -> bool {
    match e {
        Expr::Const(c) => slot >= Slot::Factor && (c.is_sign_negative() || !c.is_finite()),
        Expr::Var { .. } | Expr::Func(..) => false,
        Expr::Sum(_) => slot > Slot::Term,
        Expr::Product(_) | Expr::Quotient(..) => slot >= Slot::Factor,
        Expr::Power(..) => slot == Slot::Base,
    }
}

fn write_in(f: &mut fmt::Formatter<'_>, e: &Expr, slot: Slot) -> fmt::Result {
    if needs_parens(e, slot) {
        write!(f, "(")?;
        write_bare(f, e)?;
        write!(f, ")")
    } else {
        write_bare(f, e)
    }
}

fn write_bare(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(c) => write_const(f, *c),
        Expr::Var { name, .. } => write!(f, "{name}"),
        Expr::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write_in(f, t, Slot::Term)?;
            }
            Ok(())
        }
        Expr::Product(factors) => {
            for (i, t) in factors.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                write_in(f, t, if i == 0 { Slot::Leading } else { Slot::Factor })?;
            }
            Ok(())
        }
        Expr::Quotient(a, b) => {
            write_in(f, a, Slot::Leading)?;
            write!(f, "/")?;
            write_in(f, b, Slot::Factor)
        }
        Expr::Power(b, r) => {
            write_in(f, b, Slot::Base)?;
            write!(f, "^")?;
            write_exponent(f, *r)
        }
        Expr::Func(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_bare(f, arg)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bare(f, self)
    }
}
