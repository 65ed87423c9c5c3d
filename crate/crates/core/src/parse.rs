//! Recursive-descent parser for polynomial and rational expressions.
//!
//! Grammar: integers, identifiers `[A-Za-z][A-Za-z0-9_]*`, the operators
//! `+ - * / ^`, parentheses and unary minus. Exponents are nonnegative integer
//! literals. Multiplication is always explicit. The identifier `i` is the
//! imaginary unit.

use num::bigint::BigInt;
use thiserror::Error;

use crate::algebra::{AlgebraError, GaussianRational, MultiPoly, Rational, RationalFunction, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("exponent at position {pos} is not a nonnegative integer literal")]
    NonIntegerExponent { pos: usize },
    #[error("`{0}` does not normalize to a polynomial")]
    DivisionNotRational(String),
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("`i` is reserved for the imaginary unit and cannot name a variable")]
    ReservedName,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::NonIntegerExponent { .. } => "NonIntegerExponent",
            ParseError::DivisionNotRational(_) => "DivisionNotRational",
            ParseError::UnknownVariable { .. } => "UnknownVariable",
            ParseError::ReservedName => "ReservedName",
            ParseError::Algebra(e) => e.code(),
        }
    }
}

/// Result of parsing an expression that may contain division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Polynomial(MultiPoly),
    Rational(RationalFunction),
}

pub fn parse_expression(text: &str, vars: &Vars) -> Result<Parsed, ParseError> {
    let f = parse_rational(text, vars)?;
    if f.is_polynomial() {
        Ok(Parsed::Polynomial(f.to_poly()?))
    } else {
        Ok(Parsed::Rational(f))
    }
}

/// Parses an expression that must normalize to a polynomial. Division by
/// constants is always fine; other divisions must cancel exactly.
pub fn parse_polynomial(text: &str, vars: &Vars) -> Result<MultiPoly, ParseError> {
    let f = parse_rational(text, vars)?;
    f.to_poly().map_err(|_| ParseError::DivisionNotRational(text.to_string()))
}

/// Parses an expression allowed to be a quotient of polynomials.
pub fn parse_rational(text: &str, vars: &Vars) -> Result<RationalFunction, ParseError> {
    if vars.iter().any(|v| v == "i") {
        return Err(ParseError::ReservedName);
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::Syntax { pos: 0, message: "empty expression".into() });
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.try_add(&rhs)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.try_sub(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.try_mul(&rhs)?;
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(ParseError::Syntax { pos: at, message: "division by zero".into() });
                    }
                    acc = acc.try_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let followed_by_ident = matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_' || c == b'.');
        if start == self.pos || followed_by_ident {
            return Err(ParseError::NonIntegerExponent { pos: start });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let e: u32 = digits.parse().map_err(|_| ParseError::NonIntegerExponent { pos: start })?;
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
                if self.peek() == Some(b'.') {
                    return Err(self.error("decimal literals are not exact; write a fraction"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let n: BigInt = digits.parse().expect("digit run");
                let c = GaussianRational::from_rational(Rational::from_integer(n));
                Ok(RationalFunction::from_poly(MultiPoly::constant(self.vars, c)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if name == "i" {
                    return Ok(RationalFunction::from_poly(MultiPoly::constant(
                        self.vars,
                        GaussianRational::i(),
                    )));
                }
                match MultiPoly::var(self.vars, name) {
                    Ok(p) => Ok(RationalFunction::from_poly(p)),
                    Err(_) => Err(ParseError::UnknownVariable { name: name.to_string(), pos: start }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a bare exact number such as `3/2`, `-4` or `1/2-3/4*i`.
pub fn parse_number(text: &str) -> Result<GaussianRational, ParseError> {
    let empty: Vars = Vec::<String>::new().into();
    let p = parse_polynomial(text, &empty)?;
    Ok(p.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, vars};
    use num::Zero;

    fn xy() -> Vars {
        vars(["x", "y"])
    }

    #[test]
    fn polynomial_terms() {
        let p = parse_polynomial("x^2*y + 3/2*x", &xy()).unwrap();
        let x = MultiPoly::var(&xy(), "x").unwrap();
        let y = MultiPoly::var(&xy(), "y").unwrap();
        let expected = &(&x.pow(2) * &y) + &x.scale(&GaussianRational::from_ratio(3, 2));
        assert_eq!(p, expected);
    }

    #[test]
    fn rational_slot() {
        match parse_expression("x/(1+y)", &xy()).unwrap() {
            Parsed::Rational(f) => {
                assert_eq!(f.num(), &MultiPoly::var(&xy(), "x").unwrap());
                assert_eq!(f.den(), &parse_polynomial("1+y", &xy()).unwrap());
            }
            other => panic!("expected a rational pair, got {:?}", other),
        }
    }

    #[test]
    fn exponent_must_be_literal() {
        assert!(matches!(parse_polynomial("x^y", &xy()), Err(ParseError::NonIntegerExponent { pos: 2 })));
        assert!(matches!(parse_polynomial("x^-1", &xy()), Err(ParseError::NonIntegerExponent { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_polynomial("x + * y", &xy()), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_polynomial("x + z", &xy()), Err(ParseError::UnknownVariable { pos: 4, .. })));
        assert!(matches!(parse_polynomial("x y", &xy()), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("x/y", &xy()), Err(ParseError::DivisionNotRational(_))));
        assert!(matches!(parse_polynomial("", &xy()), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn cancelling_division_is_polynomial() {
        let p = parse_polynomial("(x^2 - y^2)/(x - y)", &xy()).unwrap();
        assert_eq!(p, parse_polynomial("x + y", &xy()).unwrap());
    }

    #[test]
    fn complex_numbers_round_trip() {
        let z = parse_number("1/2-3/4*i").unwrap();
        assert_eq!(z, GaussianRational::new(rational(1, 2), rational(-3, 4)));
        let p = parse_polynomial("(1-2*i)*x*y - 3*i*x + i", &xy()).unwrap();
        assert_eq!(parse_polynomial(&p.to_string(), &xy()).unwrap(), p);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let p = parse_polynomial("-x^2", &xy()).unwrap();
        assert_eq!(p.constant_term(), GaussianRational::zero());
        assert_eq!(p.to_string(), "-x^2");
    }
}
