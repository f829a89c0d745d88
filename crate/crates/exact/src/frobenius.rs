//! Frobenius bases at regular singular points.
//!
//! After localizing and clearing denominators, `L = Σ p_i(s) D^i` is written
//! as `s^m Σ_k s^k R_k(θ)` with `θ = s·d/ds`. On `s^a log^l s`, `θ` acts as
//! `a + N` where `(N c)_l = (l+1) c_{l+1}`, so the coefficient vectors of a
//! solution satisfy `R_0(ρ+n+N) c_n = −Σ_{k≥1} R_k(ρ+n−k+N) c_{n−k}`.

use rug::Rational;

use crate::diffop::{falling_factorial_poly, rational_roots, DiffOperator, Point};
use crate::series::{FormalSeries, LogSeries};
use crate::ExactError;

/// `L` localized at `point` with polynomial coefficients, as dense
/// coefficient lists in the local variable.
pub fn local_polynomial_coeffs(op: &DiffOperator, point: &Point) -> Vec<Vec<Rational>> {
    op.localize(point).clear_denominators().iter().map(|p| p.univariate_coeffs(0)).collect()
}

/// The `R_k` of the module docs, together with `m`.
fn theta_form(p: &[Vec<Rational>], point: &Point) -> Result<(i64, Vec<Vec<Rational>>), ExactError> {
    let n = p.len() - 1;
    let ord = |c: &Vec<Rational>| c.iter().position(|x| *x != 0).map(|v| v as i64);
    let m = p
        .iter()
        .enumerate()
        .filter_map(|(i, c)| ord(c).map(|v| v - i as i64))
        .min()
        .unwrap();
    if ord(&p[n]).unwrap() - n as i64 != m {
        return Err(ExactError::IrregularSingular { point: point.to_string() });
    }
    let kmax = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(i, c)| c.len() as i64 - 1 - m - i as i64)
        .max()
        .unwrap()
        .max(0) as usize;
    let mut r = vec![vec![Rational::new(); n + 1]; kmax + 1];
    for (i, c) in p.iter().enumerate() {
        let f = falling_factorial_poly(i);
        for (e, x) in c.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            let k = (e as i64 - m - i as i64) as usize;
            for (j, fj) in f.iter().enumerate() {
                r[k][j] += Rational::from(x * fj);
            }
        }
    }
    Ok((m, r))
}

/// Taylor coefficients `R^{(j)}(a)/j!`.
fn taylor(poly: &[Rational], a: &Rational) -> Vec<Rational> {
    let mut p = poly.to_vec();
    let mut out = Vec::with_capacity(p.len());
    while !p.is_empty() {
        // Synthetic division by (x − a): remainder is the next coefficient.
        let n = p.len() - 1;
        let mut q = vec![Rational::new(); n];
        let mut carry = Rational::new();
        for k in (0..p.len()).rev() {
            carry = Rational::from(&carry * a) + &p[k];
            if k > 0 {
                q[k - 1] = carry.clone();
            }
        }
        out.push(carry);
        p = q;
    }
    out
}

/// `(l+1)(l+2)…(l+j)`.
fn rising(l: usize, j: usize) -> u64 {
    ((l + 1)..=(l + j)).map(|x| x as u64).product()
}

/// `R(a+N)·c` for a polynomial given by its Taylor coefficients at `a`.
fn apply_shifted(t: &[Rational], c: &[Rational]) -> Vec<Rational> {
    let len = c.len();
    (0..len)
        .map(|l| {
            let mut s = Rational::new();
            for (j, tj) in t.iter().enumerate() {
                if l + j >= len {
                    break;
                }
                if *tj != 0 && c[l + j] != 0 {
                    s += Rational::from(tj * &c[l + j]) * rising(l, j);
                }
            }
            s
        })
        .collect()
}

/// Solves `R_0(a+N) c = rhs`, leaving the free components at zero.
fn solve_shifted(t: &[Rational], rhs: &[Rational]) -> Vec<Rational> {
    let len = rhs.len();
    let mu = t.iter().position(|x| *x != 0).expect("indicial polynomial is zero");
    let mut c = vec![Rational::new(); len];
    for l in (0..len).rev() {
        if l + mu >= len {
            assert!(rhs[l] == 0, "log length exceeded while solving the recurrence");
            continue;
        }
        let mut s = rhs[l].clone();
        for j in (mu + 1)..t.len() {
            if l + j < len && t[j] != 0 {
                s -= Rational::from(&t[j] * &c[l + j]) * rising(l, j);
            }
        }
        c[l + mu] = s / (Rational::from(&t[mu] * rising(l, mu)));
    }
    c
}

/// Frobenius basis of `op` at `point` with `order` terms per series.
///
/// For each distinct exponent `ρ` of multiplicity `μ` there are `μ` solutions
/// `s^ρ(log^l s + …)`, `l < μ`; log terms appear where `ρ + n` meets a larger
/// exponent. The local variable keeps the operator's variable name.
pub fn series_solve(op: &DiffOperator, point: &Point, order: usize) -> Result<Vec<LogSeries>, ExactError> {
    let p = local_polynomial_coeffs(op, point);
    let (_, r) = theta_form(&p, point)?;
    let roots = rational_roots(&r[0])?;
    let len = op.order();
    let var = op.vars()[0].clone();
    let mut distinct: Vec<(Rational, usize)> = Vec::new();
    for x in roots {
        match distinct.last_mut() {
            Some((y, k)) if *y == x => *k += 1,
            _ => distinct.push((x, 1)),
        }
    }
    let mut out = Vec::new();
    for (rho, mu) in &distinct {
        for start in 0..*mu {
            let mut cs: Vec<Vec<Rational>> = Vec::with_capacity(order);
            let mut c0 = vec![Rational::new(); len];
            c0[start] = Rational::from(1);
            cs.push(c0);
            for n in 1..order {
                let mut rhs = vec![Rational::new(); len];
                for k in 1..r.len().min(n + 1) {
                    let a = Rational::from(rho + (n - k) as u32);
                    let t = taylor(&r[k], &a);
                    for (x, y) in rhs.iter_mut().zip(apply_shifted(&t, &cs[n - k])) {
                        *x -= y;
                    }
                }
                let a = Rational::from(rho + n as u32);
                cs.push(solve_shifted(&taylor(&r[0], &a), &rhs));
            }
            let top = (0..len).rev().find(|&l| cs.iter().any(|c| c[l] != 0)).unwrap_or(0);
            let comps = (0..=top)
                .map(|l| FormalSeries::new(&var, cs.iter().map(|c| c[l].clone()).collect()))
                .collect();
            if order == 0 {
                out.push(LogSeries::new(rho.clone(), vec![FormalSeries::zero(&var, 0)]));
            } else {
                out.push(LogSeries::new(rho.clone(), comps));
            }
        }
    }
    Ok(out)
}

/// Applies the localized, denominator-cleared operator to `y` by direct
/// differentiation of the log series.
pub fn residual(op: &DiffOperator, point: &Point, y: &LogSeries) -> LogSeries {
    let p = local_polynomial_coeffs(op, point);
    let mut dy = y.clone();
    let mut acc: Option<LogSeries> = None;
    for (i, c) in p.iter().enumerate() {
        if i > 0 {
            dy = dy.derivative();
        }
        if c.iter().all(|x| *x == 0) {
            continue;
        }
        let term = dy.mul_poly(c);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap()
}
