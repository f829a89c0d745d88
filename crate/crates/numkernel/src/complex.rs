use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::NumError;

/// Complex scalar with a binary mantissa of configurable width.
///
/// Binary operations take the precision of their left operand.
#[derive(Clone, PartialEq)]
pub struct ComplexValue(Complex);

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

impl ComplexValue {
    pub fn zero(prec: u32) -> Self {
        ComplexValue(Complex::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        ComplexValue(Complex::with_val(prec, (1, 0)))
    }

    pub fn i(prec: u32) -> Self {
        ComplexValue(Complex::with_val(prec, (0, 1)))
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexValue(Complex::with_val(prec, (re, im)))
    }

    pub fn from_i64(prec: u32, re: i64) -> Self {
        ComplexValue(Complex::with_val(prec, (re, 0)))
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        ComplexValue(Complex::with_val(prec, (q, 0)))
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        ComplexValue(Complex::with_val(prec, (re, im)))
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        ComplexValue(Complex::with_val(p, (re, 0)))
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let p = re.prec().max(im.prec());
        ComplexValue(Complex::with_val(p, (re, im)))
    }

    pub fn from_complex(c: Complex) -> Self {
        ComplexValue(c)
    }

    pub fn pi(prec: u32) -> Self {
        ComplexValue::from_real(pi(prec))
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn into_complex(self) -> Complex {
        self.0
    }

    pub fn prec(&self) -> u32 {
        let (a, b) = self.0.prec();
        a.max(b)
    }

    /// Same value rounded to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexValue(Complex::with_val(prec, &self.0))
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn re_f64(&self) -> f64 {
        self.0.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.0.imag().to_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re_f64(), self.im_f64())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.0.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.0.norm_ref())
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn conj(&self) -> Self {
        ComplexValue(self.0.clone().conj())
    }

    pub fn mul_i(&self) -> Self {
        ComplexValue(self.0.clone().mul_i(false))
    }

    pub fn recip(&self) -> Self {
        ComplexValue(self.0.clone().recip())
    }

    pub fn exp(&self) -> Self {
        ComplexValue(self.0.clone().exp())
    }

    /// Principal branch.
    pub fn ln(&self) -> Self {
        ComplexValue(self.0.clone().ln())
    }

    /// Principal branch.
    pub fn sqrt(&self) -> Self {
        ComplexValue(self.0.clone().sqrt())
    }

    pub fn square(&self) -> Self {
        ComplexValue(self.0.clone().square())
    }

    pub fn powi(&self, n: i32) -> Self {
        ComplexValue(self.0.clone().pow(n))
    }

    pub fn powu(&self, n: u32) -> Self {
        ComplexValue(self.0.clone().pow(n))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        ComplexValue(Complex::with_val(self.prec(), &self.0 * q))
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        ComplexValue(Complex::with_val(self.prec(), &self.0 * k))
    }

    pub fn scale_float(&self, x: &Float) -> Self {
        ComplexValue(Complex::with_val(self.prec(), &self.0 * x))
    }

    /// `exp(iπx)` for rational `x`.
    ///
    /// `x` is reduced modulo 2 exactly before any rounding happens, so the
    /// error does not grow with |x|.
    pub fn exp_i_pi(x: &Rational, prec: u32) -> Self {
        let half = Rational::from(x / 2u32);
        let fl = half.clone().floor();
        let mut r = (half - fl) * 2u32;
        if r > 1 {
            r -= 2u32;
        }
        let guard = prec + 16;
        let t = Float::with_val(guard, &r);
        let c = t.clone().cos_pi();
        let s = t.sin_pi();
        ComplexValue(Complex::with_val(prec, (c, s)))
    }

    /// `exp(iπx)` for arbitrary complex `x`, computed directly.
    pub fn exp_i_pi_complex(x: &ComplexValue) -> Self {
        let p = x.prec();
        let arg = x.mul_i().scale_float(&pi(p + 16));
        arg.exp().with_prec(p)
    }

    /// Relative distance |a - b| / max(|a|, |b|), zero when both vanish.
    pub fn rel_diff(&self, other: &ComplexValue) -> f64 {
        let d = (self - other).abs_f64();
        let s = self.abs_f64().max(other.abs_f64());
        if s == 0.0 {
            d
        } else {
            d / s
        }
    }

    pub fn dist(&self, other: &ComplexValue) -> f64 {
        (self - other).abs_f64()
    }

    /// Parses `a`, `bi`, `a+bi`, `a-bi` where each part is a decimal or
    /// `p/q` rational. `i` alone means the imaginary unit.
    pub fn parse(s: &str, prec: u32) -> Result<Self, NumError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(NumError::Parse(s.to_string()));
        }
        let bad = || NumError::Parse(s.to_string());
        if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
            // Find the sign splitting real and imaginary parts, skipping an
            // exponent sign such as 1e-3.
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                let c = bytes[k];
                if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                    split = Some(k);
                    break;
                }
            }
            let (re_s, im_s) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im_s = match im_s {
                "" | "+" => "1",
                "-" => "-1",
                other => other,
            };
            let re = parse_real(re_s, prec).ok_or_else(bad)?;
            let im = parse_real(im_s, prec).ok_or_else(bad)?;
            Ok(ComplexValue::from_parts(re, im))
        } else {
            let re = parse_real(&t, prec).ok_or_else(bad)?;
            Ok(ComplexValue::from_real(re))
        }
    }

    /// Decimal rendering with `digits` significant digits per part.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.0.real().to_string_radix(10, Some(digits));
        let im = self.0.imag();
        let sign = if im.is_sign_negative() { '-' } else { '+' };
        let im_abs = Float::with_val(im.prec(), im.abs_ref());
        format!("{re}{sign}{}i", im_abs.to_string_radix(10, Some(digits)))
    }
}

fn parse_real(s: &str, prec: u32) -> Option<Float> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.contains('/') {
        let q: Rational = s.parse().ok()?;
        return Some(Float::with_val(prec, &q));
    }
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v = Float::parse(digits).ok()?;
    let f = Float::with_val(prec, v);
    Some(if neg { -f } else { f })
}

impl fmt::Debug for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(20))
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec() as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_string_digits(digits.max(1)))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt, $aop:tt) => {
        impl $tr<&ComplexValue> for &ComplexValue {
            type Output = ComplexValue;
            fn $m(self, rhs: &ComplexValue) -> ComplexValue {
                ComplexValue(Complex::with_val(self.prec(), &self.0 $op &rhs.0))
            }
        }
        impl $tr<ComplexValue> for &ComplexValue {
            type Output = ComplexValue;
            fn $m(self, rhs: ComplexValue) -> ComplexValue {
                self $op &rhs
            }
        }
        impl $tr<&ComplexValue> for ComplexValue {
            type Output = ComplexValue;
            fn $m(mut self, rhs: &ComplexValue) -> ComplexValue {
                self.0 $aop &rhs.0;
                self
            }
        }
        impl $tr<ComplexValue> for ComplexValue {
            type Output = ComplexValue;
            fn $m(mut self, rhs: ComplexValue) -> ComplexValue {
                self.0 $aop &rhs.0;
                self
            }
        }
        impl $atr<&ComplexValue> for ComplexValue {
            fn $am(&mut self, rhs: &ComplexValue) {
                self.0 $aop &rhs.0;
            }
        }
        impl $atr<ComplexValue> for ComplexValue {
            fn $am(&mut self, rhs: ComplexValue) {
                self.0 $aop &rhs.0;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +, +=);
binop!(Sub, sub, SubAssign, sub_assign, -, -=);
binop!(Mul, mul, MulAssign, mul_assign, *, *=);
binop!(Div, div, DivAssign, div_assign, /, /=);

impl Neg for ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue(-self.0)
    }
}

impl Neg for &ComplexValue {
    type Output = ComplexValue;
    fn neg(self) -> ComplexValue {
        ComplexValue(-self.0.clone())
    }
}

/// Total order on magnitudes, used for pivoting.
pub fn cmp_abs(a: &ComplexValue, b: &ComplexValue) -> Ordering {
    a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_i_pi_reduces_exactly() {
        let big = Rational::from((1_000_001, 2));
        let v = ComplexValue::exp_i_pi(&big, 128);
        // 1000001/2 = 500000 + 1/2, so the value is i.
        assert!(v.dist(&ComplexValue::i(128)) < 1e-37);
        let third = Rational::from((1, 3));
        let w = ComplexValue::exp_i_pi(&third, 128);
        assert!((w.re_f64() - 0.5).abs() < 1e-15);
        assert!((w.im_f64() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn parse_forms() {
        let p = 128;
        let z = ComplexValue::parse("1.3i", p).unwrap();
        assert_eq!(z.re_f64(), 0.0);
        assert!((z.im_f64() - 1.3).abs() < 1e-15);
        let z = ComplexValue::parse("0.5-1/3i", p).unwrap();
        assert!((z.im_f64() + 1.0 / 3.0).abs() < 1e-15);
        let z = ComplexValue::parse("-2", p).unwrap();
        assert_eq!(z.re_f64(), -2.0);
        let z = ComplexValue::parse("i", p).unwrap();
        assert_eq!(z.im_f64(), 1.0);
        let z = ComplexValue::parse("1e-3+2e-2i", p).unwrap();
        assert!((z.re_f64() - 1e-3).abs() < 1e-18 && (z.im_f64() - 2e-2).abs() < 1e-18);
        assert!(ComplexValue::parse("abc", p).is_err());
    }

    #[test]
    fn arithmetic_roundtrip() {
        let a = ComplexValue::from_f64(128, 1.5, -0.25);
        let b = ComplexValue::from_f64(128, -0.75, 2.0);
        let c = (&a * &b) / &b;
        assert!(c.dist(&a) < 1e-36);
        let l = a.exp().ln();
        assert!(l.dist(&a) < 1e-36);
    }
}
