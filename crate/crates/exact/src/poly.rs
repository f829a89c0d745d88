use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Assign, Integer, Rational};

use crate::ExactError;

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered variable names shared between polynomials of one ring.
pub type Vars = Arc<Vec<String>>;

pub fn vars(names: &[&str]) -> Vars {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Zero coefficients are never stored. Terms iterate in ascending
/// graded-lex order, so the leading term is the last one.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

fn same_ring(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl SparsePoly {
    pub fn zero(vars: &Vars) -> Self {
        SparsePoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: impl Into<Rational>) -> Self {
        let c = c.into();
        let mut p = Self::zero(vars);
        if c != 0 {
            p.terms.insert(Monomial(vec![0; vars.len()]), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, 1)
    }

    /// The variable with index `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, 1)
    }

    pub fn var_named(vars: &Vars, name: &str) -> Self {
        let i = vars.iter().position(|v| v == name).unwrap_or_else(|| panic!("unknown variable {name}"));
        Self::var(vars, i)
    }

    pub fn monomial(vars: &Vars, exps: Vec<u32>, c: impl Into<Rational>) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let c = c.into();
        let mut p = Self::zero(vars);
        if c != 0 {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn from_coeffs(vars: &Vars, var: usize, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            if *c != 0 {
                let mut e = vec![0; vars.len()];
                e[var] = k as u32;
                p.terms.insert(Monomial(e), c.clone());
            }
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::new());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    /// Lowest exponent of `var` among the terms (the valuation at var = 0).
    pub fn valuation_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &SparsePoly) {
        assert!(
            same_ring(&self.vars, &other.vars),
            "polynomials over different variable sets: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.check_ring(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.check_ring(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), Rational::from(-c));
        }
        r
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), Rational::from(-c))).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> SparsePoly {
        if *k == 0 {
            return Self::zero(&self.vars);
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), Rational::from(c * k))).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.check_ring(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut acc: std::collections::HashMap<Vec<u32>, Rational> = std::collections::HashMap::new();
        let mut prod = Rational::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                prod.assign(ca * cb);
                match acc.get_mut(&e) {
                    Some(v) => *v += &prod,
                    None => {
                        acc.insert(e, prod.clone());
                    }
                }
            }
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (Monomial(e), c)).collect(),
        }
    }

    /// Multiplies by a single monomial `c·x^e`.
    pub fn mul_monomial(&self, exps: &[u32], c: &Rational) -> SparsePoly {
        if *c == 0 {
            return Self::zero(&self.vars);
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| {
                    (Monomial(m.0.iter().zip(exps).map(|(x, y)| x + y).collect()), Rational::from(a * c))
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self, var: usize) -> SparsePoly {
        let mut r = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[var];
            if k > 0 {
                let mut e = m.0.clone();
                e[var] -= 1;
                r.terms.insert(Monomial(e), Rational::from(c * k));
            }
        }
        r
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t *= Rational::from(x.pow(k as i32));
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes the rational `value` for variable `var`; the variable stays
    /// in the ring with exponent zero.
    pub fn eval_var(&self, var: usize, value: &Rational) -> SparsePoly {
        let mut r = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[var];
            let mut e = m.0.clone();
            e[var] = 0;
            let t = if k == 0 { c.clone() } else { Rational::from(c * Rational::from(value.pow(k as i32))) };
            r.add_term(Monomial(e), t);
        }
        r
    }

    /// Coefficients in `var`: `self = Σ_k out[k]·var^k`, each `out[k]` free of `var`.
    pub fn to_univariate(&self, var: usize) -> Vec<SparsePoly> {
        let d = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(&self.vars); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut e = m.0.clone();
            e[var] = 0;
            out[k].terms.insert(Monomial(e), c.clone());
        }
        out
    }

    pub fn from_univariate(vars: &Vars, var: usize, coeffs: &[SparsePoly]) -> SparsePoly {
        let mut r = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                let mut e = m.0.clone();
                e[var] += k as u32;
                r.add_term(Monomial(e), a.clone());
            }
        }
        r
    }

    /// Composition: replaces `var` by the polynomial `value` (same ring).
    pub fn substitute(&self, var: usize, value: &SparsePoly) -> SparsePoly {
        self.check_ring(value);
        let coeffs = self.to_univariate(var);
        let mut acc = Self::zero(&self.vars);
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    /// Exact rational coefficients in ascending powers of the single variable
    /// `var`; panics if another variable occurs.
    pub fn univariate_coeffs(&self, var: usize) -> Vec<Rational> {
        let d = match self.degree_in(var) {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut out = vec![Rational::new(); d + 1];
        for (m, c) in &self.terms {
            for (j, &k) in m.0.iter().enumerate() {
                assert!(j == var || k == 0, "polynomial is not univariate in {}", self.vars[var]);
            }
            out[m.0[var] as usize] = c.clone();
        }
        out
    }

    /// Reorders variables: exponent `i` of the result is exponent `perm[i]` of self.
    pub fn permute(&self, perm: &[usize]) -> SparsePoly {
        assert_eq!(perm.len(), self.nvars());
        SparsePoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(perm.iter().map(|&j| m.0[j]).collect()), c.clone()))
                .collect(),
        }
    }

    /// Re-expresses the polynomial over another variable list containing all
    /// variables that actually occur.
    pub fn to_ring(&self, target: &Vars) -> Result<SparsePoly, ExactError> {
        let map: Vec<Option<usize>> =
            self.vars.iter().map(|v| target.iter().position(|w| w == v)).collect();
        let mut r = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    let j = map[i].ok_or_else(|| ExactError::IncompatibleVariables(self.vars[i].clone()))?;
                    e[j] = k;
                }
            }
            r.add_term(Monomial(e), c.clone());
        }
        Ok(r)
    }

    /// Scales to make the graded-lex leading coefficient one.
    pub fn monic(&self) -> SparsePoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rational::from(c.recip_ref());
                self.scale(&inv)
            }
        }
    }

    /// Integer-coefficient multiple with coprime coefficients and positive
    /// leading coefficient, plus the factor used: `self·k`.
    pub fn primitive_integer(&self) -> (SparsePoly, Rational) {
        if self.is_zero() {
            return (self.clone(), Rational::from(1));
        }
        let mut lcm_den = Integer::from(1);
        let mut gcd_num = Integer::new();
        for c in self.terms.values() {
            lcm_den.lcm_mut(c.denom());
            gcd_num.gcd_mut(c.numer());
        }
        let mut k = Rational::from((lcm_den, gcd_num));
        if self.leading_coeff() < 0 {
            k = -k;
        }
        (self.scale(&k), k)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &SparsePoly) -> Option<SparsePoly> {
        self.check_ring(other);
        assert!(!other.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&Rational::from(c.recip_ref())));
        }
        let (lm, lc) = {
            let (m, c) = other.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let lc_inv = Rational::from(lc.recip_ref());
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((m, c)) = rem.leading_term() {
            if !m.0.iter().zip(&lm.0).all(|(a, b)| a >= b) {
                return None;
            }
            let e: Vec<u32> = m.0.iter().zip(&lm.0).map(|(a, b)| a - b).collect();
            let q = Rational::from(c * &lc_inv);
            rem = rem.sub(&other.mul_monomial(&e, &q));
            quot.add_term(Monomial(e), q);
        }
        Some(quot)
    }

    /// Pseudo-remainder of `self` by `other` with respect to `var`.
    fn prem(&self, other: &SparsePoly, var: usize) -> SparsePoly {
        let db = other.degree_in(var).unwrap();
        let coeffs_b = other.to_univariate(var);
        let lcb = coeffs_b[db as usize].clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree_in(var) {
            if r.is_zero() || dr < db {
                break;
            }
            let lcr = r.to_univariate(var)[dr as usize].clone();
            let mut shift = vec![0; self.nvars()];
            shift[var] = dr - db;
            let t = other.mul(&lcr).mul_monomial(&shift, &Rational::from(1));
            r = r.mul(&lcb).sub(&t);
        }
        r
    }

    /// Content with respect to `var`: gcd of the coefficients in `var`.
    pub fn content_in(&self, var: usize) -> SparsePoly {
        let mut g = Self::zero(&self.vars);
        for c in self.to_univariate(var) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                return Self::one(&self.vars);
            }
        }
        g
    }

    /// Largest power of `var` dividing all terms, with the cofactor.
    pub fn split_power(&self, var: usize) -> (u32, SparsePoly) {
        let v = self.valuation_in(var).unwrap_or(0);
        if v == 0 {
            return (0, self.clone());
        }
        let mut r = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e[var] -= v;
            r.terms.insert(Monomial(e), c.clone());
        }
        (v, r)
    }
}

/// Greatest common divisor, normalized monic in graded-lex order.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    a.check_ring(b);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return SparsePoly::one(&a.vars);
    }
    if a == b {
        return a.monic();
    }
    // Cheap divisibility shortcuts.
    if a.num_terms() <= b.num_terms() {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }
    // Monomial factors split off first.
    let n = a.nvars();
    let mut mono = vec![0u32; n];
    let mut a1 = a.clone();
    let mut b1 = b.clone();
    for v in 0..n {
        let (ka, ra) = a1.split_power(v);
        let (kb, rb) = b1.split_power(v);
        mono[v] = ka.min(kb);
        a1 = ra;
        b1 = rb;
    }
    let g = gcd_rec(&a1, &b1);
    g.mul_monomial(&mono, &Rational::from(1)).monic()
}

fn main_var(a: &SparsePoly, b: &SparsePoly) -> Option<usize> {
    // Prefer the variable of highest degree so the recursion stays shallow.
    (0..a.nvars())
        .filter(|&v| a.involves(v) || b.involves(v))
        .max_by_key(|&v| a.degree_in(v).unwrap_or(0).max(b.degree_in(v).unwrap_or(0)))
}

fn gcd_rec(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return SparsePoly::one(&a.vars);
    }
    let x = match main_var(a, b) {
        Some(x) => x,
        None => return SparsePoly::one(&a.vars),
    };
    let others: Vec<usize> = (0..a.nvars()).filter(|&v| v != x && (a.involves(v) || b.involves(v))).collect();
    if others.is_empty() {
        return euclid_univariate(a, b, x);
    }
    if !a.involves(x) {
        return gcd(a, &b.content_in(x));
    }
    if !b.involves(x) {
        return gcd(b, &a.content_in(x));
    }
    let ca = a.content_in(x);
    let cb = b.content_in(x);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.degree_in(x) < q.degree_in(x) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = p.prem(&q, x);
        if r.is_zero() {
            break;
        }
        if !r.involves(x) {
            q = SparsePoly::one(&a.vars);
            break;
        }
        let rc = r.content_in(x);
        p = q;
        q = r.div_exact(&rc).unwrap().monic();
    }
    let qc = q.content_in(x);
    let q = q.div_exact(&qc).unwrap();
    c.mul(&q).monic()
}

fn euclid_univariate(a: &SparsePoly, b: &SparsePoly, x: usize) -> SparsePoly {
    let mut p = a.monic();
    let mut q = b.monic();
    if p.degree_in(x) < q.degree_in(x) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = rem_univariate(&p, &q, x);
        p = q;
        q = r.monic();
    }
    p.monic()
}

fn rem_univariate(p: &SparsePoly, q: &SparsePoly, x: usize) -> SparsePoly {
    let dq = q.degree_in(x).unwrap();
    let lq_inv = Rational::from(q.leading_coeff().recip_ref());
    let mut r = p.clone();
    while let Some(dr) = r.degree_in(x) {
        if r.is_zero() || dr < dq {
            break;
        }
        let lr = r.leading_coeff();
        let mut e = vec![0; p.nvars()];
        e[x] = dr - dq;
        r = r.sub(&q.mul_monomial(&e, &Rational::from(&lr * &lq_inv)));
    }
    r
}

/// Exact division with remainder in one variable over ℚ.
pub fn div_rem_univariate(p: &SparsePoly, q: &SparsePoly, x: usize) -> (SparsePoly, SparsePoly) {
    let dq = q.degree_in(x).expect("nonzero divisor");
    let lq_inv = Rational::from(q.leading_coeff().recip_ref());
    let mut r = p.clone();
    let mut quot = SparsePoly::zero(&p.vars);
    while let Some(dr) = r.degree_in(x) {
        if r.is_zero() || dr < dq {
            break;
        }
        let lr = r.leading_coeff();
        let mut e = vec![0; p.nvars()];
        e[x] = dr - dq;
        let k = Rational::from(&lr * &lq_inv);
        r = r.sub(&q.mul_monomial(&e, &k));
        quot.add_term(Monomial(e), k);
    }
    (quot, r)
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (v, &k) in self.vars.iter().zip(&m.0) {
                match k {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{k}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly({self})")
    }
}

macro_rules! poly_ops {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl std::ops::$tr<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: &SparsePoly) -> SparsePoly {
                SparsePoly::$inner(self, rhs)
            }
        }
        impl std::ops::$tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: SparsePoly) -> SparsePoly {
                SparsePoly::$inner(&self, &rhs)
            }
        }
        impl std::ops::$tr<&SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: &SparsePoly) -> SparsePoly {
                SparsePoly::$inner(&self, rhs)
            }
        }
    };
}

poly_ops!(Add, add, add);
poly_ops!(Sub, sub, sub);
poly_ops!(Mul, mul, mul);

impl std::ops::Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly::neg(self)
    }
}

impl std::ops::Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly::neg(&self)
    }
}
