//! Parser for polynomial and rational-function literals such as
//! `-20*(4*X^2+3*X*Y-4*Y)/(36*X^2-32*X-Y)`.
//!
//! Multiplication must be written with `*`; `^` takes a nonnegative integer
//! exponent; numbers may be integers or decimals and are read exactly.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::poly::{SparsePoly, Vars};
use crate::ratfunc::RationalFunction;
use crate::ExactError;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ExactError {
        ExactError::Parse(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.src)))
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

    fn expr(&mut self) -> Result<RationalFunction, ExactError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ExactError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    acc = acc.div(&d).map_err(|_| self.err("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ExactError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n: u32 = digits.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction, ExactError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let q = parse_decimal(s).ok_or_else(|| self.err("bad number"))?;
                Ok(RationalFunction::constant(self.vars, q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| ExactError::IncompatibleVariables(name.to_string()))?;
                Ok(RationalFunction::var(self.vars, i))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: Integer = if digits.is_empty() { Integer::new() } else { digits.parse().ok()? };
    let d = Integer::from(10).pow(frac_part.len() as u32);
    Some(Rational::from((n, d)))
}

/// Parses a rational literal `p/q`, an integer, or a decimal, with sign.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let v = match body.split_once('/') {
        Some((a, b)) => {
            let num = parse_decimal(a.trim())?;
            let den = parse_decimal(b.trim())?;
            if den == 0 {
                return None;
            }
            num / den
        }
        None => parse_decimal(body)?,
    };
    Some(if neg { -v } else { v })
}

impl RationalFunction {
    pub fn parse(vars: &Vars, src: &str) -> Result<RationalFunction, ExactError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, vars };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl SparsePoly {
    /// Parses a polynomial; division is allowed only by constants.
    pub fn parse(vars: &Vars, src: &str) -> Result<SparsePoly, ExactError> {
        let rf = RationalFunction::parse(vars, src)?;
        match rf.den().constant_value() {
            Some(c) => Ok(rf.num().scale(&Rational::from(c.recip_ref()))),
            None => Err(ExactError::Parse(format!("{src:?} is not a polynomial"))),
        }
    }
}
