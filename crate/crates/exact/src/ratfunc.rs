use std::fmt;

use rug::Rational;

use crate::poly::{gcd, SparsePoly, Vars};
use crate::ExactError;

/// Quotient of two polynomials in lowest terms.
///
/// The denominator is nonzero and monic in graded-lex order, so equal
/// functions have identical representations.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: SparsePoly,
    den: SparsePoly,
}

impl RationalFunction {
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: SparsePoly, den: SparsePoly) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: SparsePoly::one(den.vars()) };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Self::normalize_sign(num, den)
    }

    fn normalize_sign(num: SparsePoly, den: SparsePoly) -> Self {
        let lc = den.leading_coeff();
        if lc == 1 {
            return RationalFunction { num, den };
        }
        let inv = Rational::from(lc.recip_ref());
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: SparsePoly) -> Self {
        let one = SparsePoly::one(p.vars());
        RationalFunction { num: p, den: one }
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(SparsePoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(SparsePoly::one(vars))
    }

    pub fn constant(vars: &Vars, c: impl Into<Rational>) -> Self {
        Self::from_poly(SparsePoly::constant(vars, c))
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::from_poly(SparsePoly::var(vars, i))
    }

    pub fn num(&self) -> &SparsePoly {
        &self.num
    }

    pub fn den(&self) -> &SparsePoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_constant() && other.den.is_constant() {
            let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            return Self::normalize_sign(n, self.den.mul(&other.den));
        }
        let g = gcd(&self.den, &other.den);
        let da = self.den.div_exact(&g).unwrap();
        let db = other.den.div_exact(&g).unwrap();
        let num = self.num.mul(&db).add(&other.num.mul(&da));
        let den = self.den.mul(&db);
        if num.is_zero() {
            return Self::zero(self.vars());
        }
        // Any common factor of num and den divides g.
        if g.is_constant() {
            return Self::normalize_sign(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_constant() {
            Self::normalize_sign(num, den)
        } else {
            Self::normalize_sign(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
        }
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.vars());
        }
        // Cross-cancel before multiplying.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        Self::normalize_sign(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn mul_poly(&self, p: &SparsePoly) -> RationalFunction {
        self.mul(&Self::from_poly(p.clone()))
    }

    pub fn scale(&self, k: &Rational) -> RationalFunction {
        if *k == 0 {
            return Self::zero(self.vars());
        }
        RationalFunction { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<RationalFunction, ExactError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction, ExactError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, n: u32) -> RationalFunction {
        RationalFunction { num: self.num.pow(n), den: self.den.pow(n) }
    }

    pub fn derivative(&self, var: usize) -> RationalFunction {
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalize_sign(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::reduce(num, self.den.mul(&self.den))
    }

    /// Evaluates at a rational point; `None` if the denominator vanishes.
    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let d = self.den.eval(point);
        if d == 0 {
            return None;
        }
        Some(self.num.eval(point) / d)
    }

    /// Substitutes a rational for one variable; fails if the reduced
    /// denominator vanishes identically there.
    pub fn eval_var(&self, var: usize, value: &Rational) -> Result<RationalFunction, ExactError> {
        Self::new(self.num.eval_var(var, value), self.den.eval_var(var, value))
    }

    /// Replaces `var` by a rational function (same ring).
    pub fn substitute(&self, var: usize, value: &RationalFunction) -> Result<RationalFunction, ExactError> {
        let n = subst_poly(&self.num, var, value);
        let d = subst_poly(&self.den, var, value);
        n.div(&d)
    }

    pub fn to_ring(&self, target: &Vars) -> Result<RationalFunction, ExactError> {
        Ok(RationalFunction { num: self.num.to_ring(target)?, den: self.den.to_ring(target)? })
    }
}

fn subst_poly(p: &SparsePoly, var: usize, value: &RationalFunction) -> RationalFunction {
    let coeffs = p.to_univariate(var);
    let mut acc = RationalFunction::zero(p.vars());
    for c in coeffs.iter().rev() {
        acc = acc.mul(value).add(&RationalFunction::from_poly(c.clone()));
    }
    acc
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.constant_value().is_some_and(|c| c == 1) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}
