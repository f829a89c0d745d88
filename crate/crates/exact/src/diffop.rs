//! Linear differential operators `Σ a_i(t) D^i` with rational-function
//! coefficients in one variable.

use std::fmt;

use rug::{Integer, Rational};

use crate::poly::{SparsePoly, Vars};
use crate::ratfunc::RationalFunction;
use crate::ExactError;

/// Where to localize an operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(c) => write!(f, "{c}"),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator {
    coeffs: Vec<RationalFunction>,
}

impl DiffOperator {
    /// Trailing zero coefficients are dropped; an all-zero list is rejected.
    pub fn new(mut coeffs: Vec<RationalFunction>) -> Result<Self, ExactError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(ExactError::ZeroOperator);
        }
        let v = coeffs[0].vars().clone();
        assert_eq!(v.len(), 1, "operator coefficients must be univariate");
        for c in &coeffs {
            assert!(c.vars() == &v, "operator coefficients must share one ring");
        }
        Ok(DiffOperator { coeffs })
    }

    pub fn from_polys(coeffs: Vec<SparsePoly>) -> Result<Self, ExactError> {
        Self::new(coeffs.into_iter().map(RationalFunction::from_poly).collect())
    }

    /// Coefficients from parsed strings, lowest order first.
    pub fn parse(vars: &Vars, coeffs: &[&str]) -> Result<Self, ExactError> {
        let c = coeffs.iter().map(|s| RationalFunction::parse(vars, s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(c)
    }

    /// `d/dt`.
    pub fn d(vars: &Vars) -> Self {
        DiffOperator { coeffs: vec![RationalFunction::zero(vars), RationalFunction::one(vars)] }
    }

    /// The multiplication operator by `f`.
    pub fn multiplication(f: RationalFunction) -> Result<Self, ExactError> {
        Self::new(vec![f])
    }

    pub fn vars(&self) -> &Vars {
        self.coeffs[0].vars()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &RationalFunction {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &RationalFunction {
        self.coeffs.last().unwrap()
    }

    pub fn add(&self, other: &DiffOperator) -> Result<DiffOperator, ExactError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = RationalFunction::zero(self.vars());
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z).add(other.coeffs.get(i).unwrap_or(&z)))
                .collect(),
        )
    }

    /// `f·L`.
    pub fn left_mul(&self, f: &RationalFunction) -> Result<DiffOperator, ExactError> {
        Self::new(self.coeffs.iter().map(|c| c.mul(f)).collect())
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> DiffOperator {
        let inv = self.leading().recip().unwrap();
        DiffOperator { coeffs: self.coeffs.iter().map(|c| c.mul(&inv)).collect() }
    }

    /// Polynomial coefficients obtained by multiplying through by the lcm of
    /// the denominators and removing the integer content; the leading
    /// polynomial has positive leading coefficient.
    pub fn clear_denominators(&self) -> Vec<SparsePoly> {
        let mut l = SparsePoly::one(self.vars());
        for c in &self.coeffs {
            let g = crate::poly::gcd(&l, c.den());
            l = l.mul(&c.den().div_exact(&g).unwrap());
        }
        let polys: Vec<SparsePoly> =
            self.coeffs.iter().map(|c| c.num().mul(&l.div_exact(c.den()).unwrap())).collect();
        // Common rational content.
        let mut num = Integer::new();
        let mut den = Integer::from(1);
        for p in &polys {
            for (_, c) in p.terms() {
                num.gcd_mut(c.numer());
                den.lcm_mut(c.denom());
            }
        }
        let mut k = Rational::from((den, num));
        if polys.last().unwrap().leading_coeff() < 0 {
            k = -k;
        }
        polys.iter().map(|p| p.scale(&k)).collect()
    }

    /// Whether the two operators agree up to a left rational-function factor.
    pub fn equivalent(&self, other: &DiffOperator) -> bool {
        self.monic() == other.monic()
    }

    /// `(p∘q)`: by Leibniz, `a D^i ∘ b D^j = a Σ_k C(i,k) b^{(k)} D^{i−k+j}`.
    pub fn compose(&self, q: &DiffOperator) -> DiffOperator {
        assert!(self.vars() == q.vars(), "operators live in different variables");
        let n = self.order() + q.order() + 1;
        let mut out = vec![RationalFunction::zero(self.vars()); n];
        // derivs[j][k] = k-th derivative of q_j.
        let max_i = self.order();
        let derivs: Vec<Vec<RationalFunction>> = q
            .coeffs
            .iter()
            .map(|b| {
                let mut v = vec![b.clone()];
                for k in 1..=max_i {
                    let next = v[k - 1].derivative(0);
                    v.push(next);
                }
                v
            })
            .collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut binom = Integer::from(1);
            for k in 0..=i {
                for (j, dj) in derivs.iter().enumerate() {
                    if dj[k].is_zero() {
                        continue;
                    }
                    let term = a.mul(&dj[k]).scale(&Rational::from(&binom));
                    out[i - k + j] = out[i - k + j].add(&term);
                }
                binom = binom * (i - k) as u32 / (k + 1) as u32;
            }
        }
        DiffOperator { coeffs: out }
    }

    pub fn apply(&self, u: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.vars());
        let mut du = u.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                du = du.derivative(0);
            }
            acc = acc.add(&a.mul(&du));
        }
        acc
    }

    /// The operator in the local coordinate `s` at `point` (`t = c + s` or
    /// `t = 1/s`). The variable keeps its name.
    pub fn localize(&self, point: &Point) -> DiffOperator {
        let vars = self.vars().clone();
        let s = RationalFunction::var(&vars, 0);
        match point {
            Point::Finite(c) if *c == 0 => self.clone(),
            Point::Finite(c) => {
                let shift = s.add(&RationalFunction::constant(&vars, c.clone()));
                let coeffs = self.coeffs.iter().map(|a| a.substitute(0, &shift).unwrap()).collect();
                DiffOperator { coeffs }
            }
            Point::Infinity => {
                let inv = s.recip().unwrap();
                // D_t = −s² D_s.
                let e = DiffOperator {
                    coeffs: vec![RationalFunction::zero(&vars), s.pow(2).neg()],
                };
                let mut power = DiffOperator::multiplication(RationalFunction::one(&vars)).unwrap();
                let mut acc: Option<DiffOperator> = None;
                for (i, a) in self.coeffs.iter().enumerate() {
                    if i > 0 {
                        power = e.compose(&power);
                    }
                    if a.is_zero() {
                        continue;
                    }
                    let term = power.left_mul(&a.substitute(0, &inv).unwrap()).unwrap();
                    acc = Some(match acc {
                        None => term,
                        Some(x) => x.add(&term).unwrap(),
                    });
                }
                acc.unwrap()
            }
        }
    }

    /// `(ord_0 a_i, lowest Laurent coefficient)` for each nonzero coefficient.
    fn local_orders(&self) -> Vec<Option<(i64, Rational)>> {
        self.coeffs
            .iter()
            .map(|a| {
                if a.is_zero() {
                    return None;
                }
                let nc = a.num().univariate_coeffs(0);
                let dc = a.den().univariate_coeffs(0);
                let vn = nc.iter().position(|c| *c != 0).unwrap();
                let vd = dc.iter().position(|c| *c != 0).unwrap();
                Some((vn as i64 - vd as i64, Rational::from(&nc[vn] / &dc[vd])))
            })
            .collect()
    }

    /// Indicial polynomial (coefficients in `ρ`, lowest first) at `point`.
    pub fn indicial_polynomial(&self, point: &Point) -> Result<Vec<Rational>, ExactError> {
        let local = self.localize(point);
        let ords = local.local_orders();
        let m = ords
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.as_ref().map(|(v, _)| v - i as i64))
            .min()
            .unwrap();
        let n = local.order();
        let (vn, _) = ords[n].as_ref().unwrap();
        if vn - n as i64 != m {
            return Err(ExactError::IrregularSingular { point: point.to_string() });
        }
        let mut poly = vec![Rational::new(); n + 1];
        for (i, o) in ords.iter().enumerate() {
            if let Some((v, c)) = o {
                if v - i as i64 == m {
                    let f = falling_factorial_poly(i);
                    for (k, x) in f.iter().enumerate() {
                        poly[k] += Rational::from(x * c);
                    }
                }
            }
        }
        Ok(poly)
    }

    /// Roots of the indicial polynomial at `point`, with multiplicity, sorted.
    pub fn indicial_exponents(&self, point: &Point) -> Result<Vec<Rational>, ExactError> {
        let p = self.indicial_polynomial(point)?;
        rational_roots(&p)
    }
}

/// Coefficients of `ρ(ρ−1)…(ρ−i+1)`.
pub(crate) fn falling_factorial_poly(i: usize) -> Vec<Rational> {
    let mut p = vec![Rational::from(1)];
    for k in 0..i {
        // multiply by (ρ − k)
        let mut q = vec![Rational::new(); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            q[j + 1] += c;
            q[j] -= Rational::from(c * k as u32);
        }
        p = q;
    }
    p
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

pub(crate) fn eval_poly(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// Divides by `(ρ − r)`, assuming `r` is a root.
fn deflate(p: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = p.len() - 1;
    let mut q = vec![Rational::new(); n];
    let mut carry = Rational::new();
    for k in (0..n).rev() {
        carry = Rational::from(&carry * r) + &p[k + 1];
        q[k] = carry.clone();
    }
    q
}

fn divisors(n: &Integer) -> Vec<Integer> {
    let n = n.clone().abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Integer::from(1);
    while Integer::from(&d * &d) <= n {
        if n.is_divisible(&d) {
            let e = Integer::from(&n / &d);
            if e != d {
                large.push(e);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// All rational roots with multiplicity; fails if a non-linear factor remains.
pub fn rational_roots(poly: &[Rational]) -> Result<Vec<Rational>, ExactError> {
    let mut p = poly.to_vec();
    trim(&mut p);
    let mut roots = Vec::new();
    while p.len() > 1 && p[0] == 0 {
        p.remove(0);
        roots.push(Rational::new());
    }
    if p.len() > 1 {
        // Integer coefficients for the candidate search.
        let mut l = Integer::from(1);
        for c in &p {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = p.iter().map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom()))).collect();
        let ps = divisors(&ints[0]);
        let qs = divisors(ints.last().unwrap());
        let mut cands: Vec<Rational> = Vec::new();
        for a in &ps {
            for b in &qs {
                for s in [1, -1] {
                    let r = Rational::from((Integer::from(a * s), b.clone()));
                    if !cands.contains(&r) {
                        cands.push(r);
                    }
                }
            }
        }
        for r in cands {
            while p.len() > 1 && eval_poly(&p, &r) == 0 {
                p = deflate(&p, &r);
                roots.push(r.clone());
            }
        }
    }
    if p.len() > 1 {
        let factor = p
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| format!("{c}*r^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        return Err(ExactError::NonRationalRoot { factor });
    }
    roots.sort();
    Ok(roots)
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})*D^{i}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator({self})")
    }
}
