//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := "-"? atom ("^" rational)?
//! atom     := number | identifier | function "(" expr ")" | "(" expr ")"
//! rational := integer | "(" integer "/" integer ")"
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Integers in
//! exponents may carry a leading minus sign.

use std::sync::Arc;

use thiserror::Error;

use super::{Exponent, Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    UnknownIdentifier(String),
    UnknownFunction(String),
    Arity { func: &'static str, found: usize },
    BadNumber(String),
    BadExponent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {}", describe(&self.kind))]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// The message without the position.
    pub fn message(&self) -> String {
        describe(&self.kind)
    }
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character {c:?}"),
        ParseErrorKind::UnexpectedToken { found, expected } => {
            format!("expected {expected}, found {found}")
        }
        ParseErrorKind::UnexpectedEnd { expected } => format!("expected {expected}, found end of input"),
        ParseErrorKind::UnknownIdentifier(s) => format!("unknown identifier `{s}`"),
        ParseErrorKind::UnknownFunction(s) => format!("unknown function `{s}`"),
        ParseErrorKind::Arity { func, found } => {
            format!("function `{func}` takes exactly one argument, found {found}")
        }
        ParseErrorKind::BadNumber(s) => format!("malformed number `{s}`"),
        ParseErrorKind::BadExponent(s) => format!("malformed exponent: {s}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Int(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let mut integral = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integral = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let bad = || ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                };
                let tok = if integral {
                    text.parse::<i64>()
                        .map(Tok::Int)
                        .or_else(|_| text.parse::<f64>().map(Tok::Num))
                        .map_err(|_| bad())?
                } else {
                    Tok::Num(text.parse::<f64>().map_err(|_| bad())?)
                };
                out.push((start, tok));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: Vec<(&'a str, Arc<str>)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::UnexpectedToken {
                found: t.show(),
                expected,
            }),
            None => self.error(ParseErrorKind::UnexpectedEnd { expected }),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = Expr::product(vec![acc, self.factor()?]);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = Expr::quotient(acc, self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negate = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut e = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            e = Expr::power(e, self.exponent()?);
        }
        Ok(if negate { Expr::neg(e) } else { e })
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("an integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let num = self.signed_int()?;
            let den = if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                let at = self.offset();
                let den = self.signed_int()?;
                if den == 0 {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::BadExponent("zero denominator".into()),
                    });
                }
                den
            } else {
                1
            };
            self.expect(Tok::RParen, "`)` closing the exponent")?;
            Ok(Exponent::new(num, den))
        } else {
            Ok(Exponent::from_integer(self.signed_int()?))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::Int(v)) => Ok(Expr::Const(v as f64)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(func) = Func::from_name(&name) {
                    if self.peek() != Some(&Tok::LParen) {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                found: 0,
                            },
                        });
                    }
                    self.pos += 1;
                    if self.peek() == Some(&Tok::RParen) {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                found: 0,
                            },
                        });
                    }
                    let arg = self.expr()?;
                    let mut extra = 0;
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        self.expr()?;
                        extra += 1;
                    }
                    if extra > 0 {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::Arity {
                                func: func.name(),
                                found: 1 + extra,
                            },
                        });
                    }
                    self.expect(Tok::RParen, "`)` closing the function call")?;
                    return Ok(Expr::func(func, arg));
                }
                if let Some(index) = self.vars.iter().position(|(v, _)| *v == name) {
                    return Ok(Expr::Var {
                        index,
                        name: self.vars[index].1.clone(),
                    });
                }
                let kind = if self.peek() == Some(&Tok::LParen) {
                    ParseErrorKind::UnknownFunction(name)
                } else {
                    ParseErrorKind::UnknownIdentifier(name)
                };
                Err(ParseError { offset: start, kind })
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.unexpected("a number, variable, function or `(`"))
            }
            None => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }
}

/// Parses `source` with `vars[i]` bound to variable index `i`.
pub fn parse(source: &str, vars: &[&str]) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: source.len(),
        vars: vars.iter().map(|v| (*v, Arc::<str>::from(*v))).collect(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XY: &[&str] = &["x", "y"];

    #[test]
    fn polar_potential_structure() {
        let e = parse("x^2/(2*y) + 0.25*log(y)*y", XY).unwrap();
        let Expr::Sum(terms) = &e else { panic!("{e:?}") };
        assert_eq!(terms.len(), 2);
        assert!(matches!(&terms[0], Expr::Quotient(num, _) if matches!(**num, Expr::Power(..))));
        let Expr::Product(f) = &terms[1] else { panic!() };
        assert_eq!(f[0], Expr::Const(0.25));
        assert!(matches!(f[1], Expr::Func(Func::Log, _)));
    }

    #[test]
    fn zero_is_constant() {
        assert_eq!(parse("0", &[]).unwrap(), Expr::Const(0.0));
    }

    #[test]
    fn cone_potential_parses() {
        let e = parse("-0.5*log(t^2 - x^2 - y^2)", &["x", "y", "t"]).unwrap();
        let Expr::Product(f) = &e else { panic!("{e:?}") };
        assert_eq!(f[0], Expr::Const(-0.5));
        assert!(matches!(f[1], Expr::Func(Func::Log, _)));
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        let e = parse("-x^2", XY).unwrap();
        assert_eq!(e, Expr::neg(Expr::powi(Expr::var(0, "x"), 2)));
        assert_eq!(parse("-2^2", XY).unwrap(), Expr::Const(-4.0));
    }

    #[test]
    fn rational_exponents() {
        let e = parse("x^(1/2) + y^-1 + x^(-3/2)", XY).unwrap();
        let Expr::Sum(t) = e else { panic!() };
        assert!(matches!(t[0], Expr::Power(_, r) if r == Exponent::new(1, 2)));
        assert!(matches!(t[1], Expr::Power(_, r) if r == Exponent::from_integer(-1)));
        assert!(matches!(t[2], Expr::Power(_, r) if r == Exponent::new(-3, 2)));
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("x + * y", XY).unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse("x + z", XY).unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("z".into()));
        let e = parse("log(x, y)", XY).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity { func: "log", found: 2 });
        let e = parse("exp + 1", XY).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { func: "exp", found: 0 }));
        let e = parse("foo(x)", XY).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownFunction("foo".into()));
        let e = parse("(x + y", XY).unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedEnd { .. }));
        let e = parse("x^y", XY).unwrap_err();
        assert_eq!(e.offset, 2);
        let e = parse("x # y", XY).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar('#'));
        let e = parse("x^(1/0)", XY).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadExponent(_)));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1e-3", &[]).unwrap(), Expr::Const(1e-3));
        assert_eq!(parse("2.5E2", &[]).unwrap(), Expr::Const(250.0));
    }
}
