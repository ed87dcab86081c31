//! Text grammar for expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' ['+' | '-'] integer)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! number  := digits ['.' digits]
//! ```
//!
//! Decimals become exact rationals (`0.1` is `1/10`). Function calls
//! (`sin`, `cos`, `exp`) are accepted only in [`ParseMode::InitialData`].

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::Rational;
use super::rational::Expr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Rational,
    InitialData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
        }
    }
}

/// Parse tree. Variables are indices into the name list given to [`parse`].
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(Rational),
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Call(Func, Box<Ast>),
}

impl Ast {
    pub fn is_rational(&self) -> bool {
        match self {
            Ast::Num(_) | Ast::Var(_) => true,
            Ast::Neg(a) | Ast::Pow(a, _) => a.is_rational(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
                a.is_rational() && b.is_rational()
            }
            Ast::Call(..) => false,
        }
    }

    /// Highest variable index referenced plus one.
    pub fn width(&self) -> usize {
        match self {
            Ast::Num(_) => 0,
            Ast::Var(i) => i + 1,
            Ast::Neg(a) | Ast::Pow(a, _) | Ast::Call(_, a) => a.width(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
                a.width().max(b.width())
            }
        }
    }

    /// Normal form of a rational expression.
    pub fn to_expr(&self) -> Result<Expr> {
        super::guard::guarded(|| self.to_expr_inner())
    }

    fn to_expr_inner(&self) -> Result<Expr> {
        Ok(match self {
            Ast::Num(c) => Expr::constant(c.clone()),
            Ast::Var(i) => Expr::var(*i),
            Ast::Neg(a) => -a.to_expr_inner()?,
            Ast::Add(a, b) => a.to_expr_inner()? + b.to_expr_inner()?,
            Ast::Sub(a, b) => a.to_expr_inner()? - b.to_expr_inner()?,
            Ast::Mul(a, b) => a.to_expr_inner()? * b.to_expr_inner()?,
            Ast::Div(a, b) => a.to_expr_inner()?.checked_div(&b.to_expr_inner()?)?,
            Ast::Pow(a, n) => a.to_expr_inner()?.powi(*n)?,
            Ast::Call(..) => return Err(Error::NotRational),
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        Ok(match self {
            Ast::Num(c) => c.to_f64().unwrap_or(f64::NAN),
            Ast::Var(i) => *point.get(*i).ok_or(Error::UnassignedVariable(*i))?,
            Ast::Neg(a) => -a.eval_f64(point)?,
            Ast::Add(a, b) => a.eval_f64(point)? + b.eval_f64(point)?,
            Ast::Sub(a, b) => a.eval_f64(point)? - b.eval_f64(point)?,
            Ast::Mul(a, b) => a.eval_f64(point)? * b.eval_f64(point)?,
            Ast::Div(a, b) => {
                let d = b.eval_f64(point)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval_f64(point)? / d
            }
            Ast::Pow(a, n) => {
                let x = a.eval_f64(point)?;
                if x == 0.0 && *n < 0 {
                    return Err(Error::DivisionByZero);
                }
                x.powi(*n)
            }
            Ast::Call(f, a) => f.apply(a.eval_f64(point)?),
        })
    }
}

/// Parses `text` with variables drawn from `vars` (index = position).
pub fn parse<S: AsRef<str>>(text: &str, vars: &[S], mode: ParseMode) -> Result<Ast> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: vars.iter().map(|s| s.as_ref()).collect(),
        mode,
    };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(ast)
}

/// Parses a rational expression straight to normal form.
pub fn parse_expr<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Expr> {
    parse(text, vars, ParseMode::Rational)?.to_expr()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vec<&'a str>,
    mode: ParseMode,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Ast::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Ast::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' {
                Ast::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Ast::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let start = {
            self.skip_ws();
            self.pos
        };
        let exp = self.integer_exponent().ok_or(Error::NonIntegerExponent { offset: start })?;
        if self.peek() == Some(b'^') {
            return Err(self.syntax("chained exponents need parentheses"));
        }
        Ok(Ast::Pow(Box::new(base), exp))
    }

    fn integer_exponent(&mut self) -> Option<i32> {
        let save = self.pos;
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let mut sign = 1i64;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let ok = self.pos > digits_start
            && self.src.get(self.pos) != Some(&b'.')
            && !self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic());
        if !ok {
            self.pos = save;
            return None;
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).ok()?;
        let value = i64::from_str(text).ok()? * sign;
        if parenthesized {
            if self.peek() != Some(b')') {
                self.pos = save;
                return None;
            }
            self.pos += 1;
        }
        i32::try_from(value).ok()
    }

    fn primary(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Ast> {
        let start = self.pos;
        let mut int_part = String::new();
        let mut frac_part = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_part.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        Ok(Ast::Num(decimal_to_rational(&int_part, &frac_part)))
    }

    fn name(&mut self) -> Result<Ast> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.peek() == Some(b'(') {
            let Some(func) = Func::from_name(name) else {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unknown function `{name}`"),
                });
            };
            if self.mode != ParseMode::InitialData {
                return Err(Error::TranscendentalNotAllowed {
                    name: name.to_string(),
                    offset: start,
                });
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.syntax("expected `)`"));
            }
            self.pos += 1;
            return Ok(Ast::Call(func, Box::new(arg)));
        }
        match self.vars.iter().position(|v| *v == name) {
            Some(i) => Ok(Ast::Var(i)),
            None if name == "pi" && self.mode == ParseMode::InitialData => {
                // Only meaningful for float evaluation of initial data.
                Ok(Ast::Num(
                    BigRational::from_float(std::f64::consts::PI).expect("finite"),
                ))
            }
            None => Err(Error::UnknownVariable {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}

fn decimal_to_rational(int_part: &str, frac_part: &str) -> Rational {
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).expect("digits");
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    if n.is_zero() {
        return Rational::zero();
    }
    BigRational::new(n, d)
}

/// Parses a rational constant given as `"p/q"`, an integer, or a decimal.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let ast = parse::<&str>(text, &[], ParseMode::Rational)?;
    let e = ast.to_expr()?;
    e.constant_value().ok_or(Error::NotRational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::poly::rat;

    const UV: [&str; 2] = ["u1", "u2"];

    #[test]
    fn two_monomials() {
        let e = parse_expr("u1^2*u2 - 1/2", &UV).unwrap();
        assert!(e.is_polynomial());
        assert_eq!(e.numerator().n_terms(), 2);
    }

    #[test]
    fn unknown_variable() {
        let err = parse_expr("u3", &UV).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownVariable {
                name: "u3".into(),
                offset: 0
            }
        );
    }

    #[test]
    fn decimal_is_exact() {
        let ast = parse("0.1*sin(x)", &["x"], ParseMode::InitialData).unwrap();
        match &ast {
            Ast::Mul(c, _) => assert_eq!(**c, Ast::Num(rat(1, 10))),
            other => panic!("unexpected tree {other:?}"),
        }
        let v = ast.eval_f64(&[std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn transcendental_needs_initial_data_mode() {
        let err = parse("sin(u1)", &UV, ParseMode::Rational).unwrap_err();
        assert!(matches!(err, Error::TranscendentalNotAllowed { offset: 0, .. }));
    }

    #[test]
    fn exponent_errors() {
        assert!(matches!(
            parse("u1^0.5", &UV, ParseMode::Rational),
            Err(Error::NonIntegerExponent { offset: 3 })
        ));
        assert!(matches!(
            parse("u1^u2", &UV, ParseMode::Rational),
            Err(Error::NonIntegerExponent { .. })
        ));
        let e = parse_expr("u1^-1 * u1", &UV).unwrap();
        assert!(e.is_one());
        let e = parse_expr("u1^(-2) * u1^2", &UV).unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse("u1 + * u2", &UV, ParseMode::Rational).unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                offset: 5,
                message: "unexpected character".into()
            }
        );
        assert!(matches!(
            parse("(u1 + u2", &UV, ParseMode::Rational),
            Err(Error::Syntax { offset: 8, .. })
        ));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-u1^2 + 2*u2/4", &UV).unwrap();
        let v = e.eval_exact(&[rat(3, 1), rat(2, 1)]).unwrap();
        assert_eq!(v, rat(-8, 1));
    }

    #[test]
    fn rational_constants() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rational("u1").is_err());
    }
}
