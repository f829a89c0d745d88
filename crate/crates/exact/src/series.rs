use std::fmt;

use rug::{Assign, Rational};

use crate::poly::SparsePoly;

/// Truncated power series `Σ_{n<order} c_n t^n` over ℚ.
///
/// Coefficients at and beyond `order` are unknown; no operation reads them.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalSeries {
    var: String,
    coeffs: Vec<Rational>,
}

impl FormalSeries {
    pub fn new(var: &str, coeffs: Vec<Rational>) -> Self {
        FormalSeries { var: var.to_string(), coeffs }
    }

    pub fn zero(var: &str, order: usize) -> Self {
        Self::new(var, vec![Rational::new(); order])
    }

    pub fn one(var: &str, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order > 0 {
            s.coeffs[0] = Rational::from(1);
        }
        s
    }

    /// The series of a univariate polynomial, truncated.
    pub fn from_poly(p: &SparsePoly, var_index: usize, order: usize) -> Self {
        let c = p.univariate_coeffs(var_index);
        let mut s = Self::zero(&p.vars()[var_index], order);
        for (k, x) in c.into_iter().enumerate().take(order) {
            s.coeffs[k] = x;
        }
        s
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(&self.var, self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &FormalSeries) -> FormalSeries {
        let n = self.order().min(other.order());
        Self::new(&self.var, (0..n).map(|k| Rational::from(&self.coeffs[k] + &other.coeffs[k])).collect())
    }

    pub fn sub(&self, other: &FormalSeries) -> FormalSeries {
        let n = self.order().min(other.order());
        Self::new(&self.var, (0..n).map(|k| Rational::from(&self.coeffs[k] - &other.coeffs[k])).collect())
    }

    pub fn neg(&self) -> FormalSeries {
        Self::new(&self.var, self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn scale(&self, k: &Rational) -> FormalSeries {
        Self::new(&self.var, self.coeffs.iter().map(|c| Rational::from(c * k)).collect())
    }

    pub fn mul(&self, other: &FormalSeries) -> FormalSeries {
        let n = self.order().min(other.order());
        let mut out = vec![Rational::new(); n];
        let mut t = Rational::new();
        for i in 0..n {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..(n - i) {
                if other.coeffs[j] == 0 {
                    continue;
                }
                t.assign(&self.coeffs[i] * &other.coeffs[j]);
                out[i + j] += &t;
            }
        }
        Self::new(&self.var, out)
    }

    pub fn pow(&self, k: u32) -> FormalSeries {
        let mut r = Self::one(&self.var, self.order());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Multiplies by `t^k`; the known range grows by `k`.
    pub fn shift(&self, k: usize) -> FormalSeries {
        let mut c = vec![Rational::new(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(&self.var, c)
    }

    /// Derivative; one fewer coefficient is known.
    pub fn derivative(&self) -> FormalSeries {
        Self::new(
            &self.var,
            (1..self.order()).map(|n| Rational::from(&self.coeffs[n] * n as u32)).collect(),
        )
    }

    /// Antiderivative with constant term zero; one more coefficient is known.
    pub fn integral(&self) -> FormalSeries {
        let mut c = vec![Rational::new()];
        c.extend(self.coeffs.iter().enumerate().map(|(n, x)| Rational::from(x / (n as u32 + 1))));
        Self::new(&self.var, c)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Option<FormalSeries> {
        let n = self.order();
        if n == 0 || self.coeffs[0] == 0 {
            return None;
        }
        let inv0 = Rational::from(self.coeffs[0].recip_ref());
        let mut out = vec![Rational::new(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            let mut s = Rational::new();
            for j in 1..=k {
                if self.coeffs[j] != 0 {
                    s += Rational::from(&self.coeffs[j] * &out[k - j]);
                }
            }
            out[k] = -s * &inv0;
        }
        Some(Self::new(&self.var, out))
    }

    /// Compositional inverse of a series `a_1 t + a_2 t² + …` with `a_1 ≠ 0`.
    pub fn reversion(&self) -> Option<FormalSeries> {
        let n = self.order();
        if n < 2 || self.coeffs[0] != 0 || self.coeffs[1] == 0 {
            return None;
        }
        // Newton-free Lagrange-style iteration: solve f(g(s)) = s term by term.
        let mut g = vec![Rational::new(); n];
        g[1] = Rational::from(self.coeffs[1].recip_ref());
        for k in 2..n {
            let gs = FormalSeries::new(&self.var, g.clone());
            let comp = self.compose(&gs);
            let err = comp.coeffs[k].clone();
            g[k] = -err * Rational::from(self.coeffs[1].recip_ref());
        }
        Some(Self::new(&self.var, g))
    }

    /// `self(inner(t))` for `inner` with zero constant term.
    pub fn compose(&self, inner: &FormalSeries) -> FormalSeries {
        assert!(inner.order() == 0 || inner.coeffs[0] == 0, "inner series must vanish at 0");
        let n = self.order().min(inner.order());
        let mut acc = Self::zero(&self.var, n);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul(&inner.truncate(n));
            acc.coeffs[0] += c;
        }
        acc
    }
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                parts.push(format!("{c}*{}^{n}", self.var));
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O({}^{})", parts.join(" + "), self.var, self.order())
    }
}

/// `t^ρ · Σ_k F_k(t)·log^k(t)`, each `F_k` a [`FormalSeries`] of the same
/// order `N`; the sum is known up to, not including, `t^{ρ+N}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogSeries {
    pub exponent: Rational,
    pub comps: Vec<FormalSeries>,
}

impl LogSeries {
    pub fn new(exponent: Rational, comps: Vec<FormalSeries>) -> Self {
        assert!(!comps.is_empty(), "a log series needs at least one component");
        let n = comps[0].order();
        assert!(comps.iter().all(|c| c.order() == n), "components must share one order");
        LogSeries { exponent, comps }
    }

    pub fn from_series(s: FormalSeries) -> Self {
        LogSeries { exponent: Rational::new(), comps: vec![s] }
    }

    pub fn var(&self) -> &str {
        self.comps[0].var()
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn log_degree(&self) -> usize {
        self.comps.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Exclusive upper end of the known exponent range.
    pub fn known_to(&self) -> Rational {
        Rational::from(&self.exponent + self.order() as u32)
    }

    /// Re-expresses with a smaller base exponent `e` (ρ − e must be a
    /// nonnegative integer).
    fn lower_to(&self, e: &Rational) -> LogSeries {
        let d = Rational::from(&self.exponent - e);
        assert!(d.is_integer() && d >= 0, "exponents differ by a non-integer");
        let k = d.numer().to_usize().unwrap();
        LogSeries { exponent: e.clone(), comps: self.comps.iter().map(|c| c.shift(k)).collect() }
    }

    fn pad_logs(&self, len: usize) -> Vec<FormalSeries> {
        let mut c = self.comps.clone();
        while c.len() < len {
            c.push(FormalSeries::zero(self.var(), self.order()));
        }
        c
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        let e = if self.exponent <= other.exponent { self.exponent.clone() } else { other.exponent.clone() };
        let a = self.lower_to(&e);
        let b = other.lower_to(&e);
        let len = a.comps.len().max(b.comps.len());
        let (ca, cb) = (a.pad_logs(len), b.pad_logs(len));
        LogSeries::new(e, ca.iter().zip(&cb).map(|(x, y)| x.add(y)).collect())
    }

    pub fn neg(&self) -> LogSeries {
        LogSeries { exponent: self.exponent.clone(), comps: self.comps.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> LogSeries {
        LogSeries { exponent: self.exponent.clone(), comps: self.comps.iter().map(|c| c.scale(k)).collect() }
    }

    pub fn mul(&self, other: &LogSeries) -> LogSeries {
        let n = self.order().min(other.order());
        let len = self.comps.len() + other.comps.len() - 1;
        let mut comps = vec![FormalSeries::zero(self.var(), n); len];
        for (i, a) in self.comps.iter().enumerate() {
            for (j, b) in other.comps.iter().enumerate() {
                comps[i + j] = comps[i + j].add(&a.mul(b));
            }
        }
        LogSeries::new(Rational::from(&self.exponent + &other.exponent), comps)
    }

    /// Multiplies by `t^k` for an integer `k ≥ 0`.
    pub fn mul_t_power(&self, k: u32) -> LogSeries {
        LogSeries { exponent: Rational::from(&self.exponent + k), comps: self.comps.clone() }
    }

    /// Multiplies by a polynomial in the series variable.
    pub fn mul_poly(&self, p: &[Rational]) -> LogSeries {
        let n = self.order();
        let mut ps = vec![Rational::new(); n];
        for (k, c) in p.iter().enumerate().take(n) {
            ps[k] = c.clone();
        }
        let ps = FormalSeries::new(self.var(), ps);
        LogSeries { exponent: self.exponent.clone(), comps: self.comps.iter().map(|c| c.mul(&ps)).collect() }
    }

    /// d/dt by the product rule, term by term:
    /// `d(t^{ρ+n} L^k) = (ρ+n) t^{ρ+n−1} L^k + k t^{ρ+n−1} L^{k−1}`.
    pub fn derivative(&self) -> LogSeries {
        let n = self.order();
        let len = self.comps.len();
        let mut comps = vec![FormalSeries::zero(self.var(), n); len];
        for k in 0..len {
            let src = &self.comps[k];
            let mut dst = comps[k].coeffs.clone();
            for m in 0..n {
                if src.coeffs[m] != 0 {
                    let f = Rational::from(&self.exponent + m as u32);
                    dst[m] += Rational::from(&src.coeffs[m] * &f);
                }
            }
            comps[k] = FormalSeries::new(self.var(), dst);
            if k > 0 {
                let mut lower = comps[k - 1].coeffs.clone();
                for m in 0..n {
                    if src.coeffs[m] != 0 {
                        lower[m] += Rational::from(&src.coeffs[m] * k as u32);
                    }
                }
                comps[k - 1] = FormalSeries::new(self.var(), lower);
            }
        }
        LogSeries::new(Rational::from(&self.exponent - 1u32), comps)
    }
}
