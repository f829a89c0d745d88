//! Dense complex linear algebra at working precision.

use rug::Float;

use crate::{cmp_abs, ComplexValue};

/// Singular values (descending) and right singular vectors of an m×n matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular_values: Vec<Float>,
    /// `v[k]` is the right singular vector belonging to `singular_values[k]`.
    pub v: Vec<Vec<ComplexValue>>,
}

/// One-sided Jacobi SVD. Rows are `a[i]`; all rows must have the same length.
pub fn svd(a: &[Vec<ComplexValue>]) -> Svd {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let prec = a.first().and_then(|r| r.first()).map_or(128, |x| x.prec());
    // Work on columns.
    let mut cols: Vec<Vec<ComplexValue>> =
        (0..n).map(|j| (0..m).map(|i| a[i][j].clone()).collect()).collect();
    let mut v: Vec<Vec<ComplexValue>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { ComplexValue::one(prec) } else { ComplexValue::zero(prec) })
                .collect()
        })
        .collect();
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 4));
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm2(&cols[p], prec);
                let beta = norm2(&cols[q], prec);
                let gamma = inner(&cols[p], &cols[q], prec);
                let g_abs = gamma.abs();
                if g_abs.is_zero() {
                    continue;
                }
                let scale = Float::with_val(prec, &alpha * &beta).sqrt();
                if g_abs <= Float::with_val(prec, &eps * &scale) {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the inner product is real.
                let phase = gamma.scale_float(&Float::with_val(prec, 1 / &g_abs)).conj();
                for x in cols[q].iter_mut() {
                    *x *= &phase;
                }
                for x in v[q].iter_mut() {
                    *x *= &phase;
                }
                let zeta = Float::with_val(prec, &beta - &alpha) / Float::with_val(prec, 2 * &g_abs);
                let root = Float::with_val(prec, 1 + Float::with_val(prec, zeta.square_ref())).sqrt();
                let denom = Float::with_val(prec, zeta.abs_ref()) + &root;
                let mut t = Float::with_val(prec, 1) / denom;
                if zeta.is_sign_negative() {
                    t = -t;
                }
                let c = Float::with_val(prec, 1) / Float::with_val(prec, 1 + Float::with_val(prec, t.square_ref())).sqrt();
                let s = Float::with_val(prec, &c * &t);
                rotate(&mut cols, p, q, &c, &s);
                rotate(&mut v, p, q, &c, &s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(Float, usize)> = cols.iter().enumerate().map(|(j, c)| (norm2(c, prec).sqrt(), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Svd {
        singular_values: order.iter().map(|(s, _)| s.clone()).collect(),
        v: order.iter().map(|(_, j)| v[*j].clone()).collect(),
    }
}

fn rotate(cols: &mut [Vec<ComplexValue>], p: usize, q: usize, c: &Float, s: &Float) {
    let len = cols[p].len();
    for i in 0..len {
        let ap = cols[p][i].clone();
        let aq = cols[q][i].clone();
        cols[p][i] = ap.scale_float(c) - aq.scale_float(s);
        cols[q][i] = ap.scale_float(s) + aq.scale_float(c);
    }
}

fn norm2(x: &[ComplexValue], prec: u32) -> Float {
    let mut acc = Float::new(prec);
    for e in x {
        acc += e.norm_sqr();
    }
    acc
}

fn inner(x: &[ComplexValue], y: &[ComplexValue], prec: u32) -> ComplexValue {
    let mut acc = ComplexValue::zero(prec);
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// Least-singular right vector after scaling every column to unit norm.
///
/// Returns the vector in the original coordinates together with the relative
/// singular values `σ_k/σ_max` of the equilibrated matrix (descending).
pub fn equilibrated_null_vector(a: &[Vec<ComplexValue>]) -> (Vec<ComplexValue>, Vec<f64>) {
    let n = a.first().map_or(0, |r| r.len());
    let prec = a.first().and_then(|r| r.first()).map_or(128, |x| x.prec());
    let scales: Vec<Float> = (0..n)
        .map(|j| {
            let mut s = Float::new(prec);
            for row in a {
                s += row[j].norm_sqr();
            }
            let s = s.sqrt();
            if s.is_zero() {
                Float::with_val(prec, 1)
            } else {
                s
            }
        })
        .collect();
    let scaled: Vec<Vec<ComplexValue>> = a
        .iter()
        .map(|row| {
            row.iter()
                .zip(&scales)
                .map(|(x, s)| x.scale_float(&Float::with_val(prec, 1 / s)))
                .collect()
        })
        .collect();
    let d = svd(&scaled);
    let smax = d.singular_values[0].to_f64();
    let rel = d.singular_values.iter().map(|s| if smax > 0.0 { s.to_f64() / smax } else { 0.0 }).collect();
    let last = d.v.last().unwrap();
    let vec = last
        .iter()
        .zip(&scales)
        .map(|(x, s)| x.scale_float(&Float::with_val(prec, 1 / s)))
        .collect();
    (vec, rel)
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting; `None` if
/// a pivot vanishes exactly.
pub fn solve(a: &[Vec<ComplexValue>], b: &[ComplexValue]) -> Option<Vec<ComplexValue>> {
    let n = b.len();
    let mut m: Vec<Vec<ComplexValue>> = a.iter().map(|r| r.clone()).collect();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| cmp_abs(&m[i][k], &m[j][k]))?;
        if m[piv][k].is_zero() {
            return None;
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in (k + 1)..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
            let t = &f * &rhs[k];
            rhs[i] -= t;
        }
    }
    let mut x = vec![ComplexValue::zero(rhs[0].prec()); n];
    for k in (0..n).rev() {
        let mut s = rhs[k].clone();
        for j in (k + 1)..n {
            s -= &m[k][j] * &x[j];
        }
        x[k] = s / &m[k][k];
    }
    Some(x)
}
