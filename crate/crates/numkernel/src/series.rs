use crate::{ComplexValue, NumError, PrecisionPolicy};

/// A truncated sum together with the number of terms it used.
#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub value: ComplexValue,
    pub terms: usize,
}

/// Sums `term(0) + term(1) + …` until `tail(N)`, a bound on the absolute
/// remainder after `N` terms, drops below `tol`. At least one term is always
/// taken.
pub fn sum_series_tol<T, B>(
    prec: u32,
    tol: f64,
    cap: usize,
    mut term: T,
    mut tail: B,
) -> Result<SeriesSum, NumError>
where
    T: FnMut(usize) -> ComplexValue,
    B: FnMut(usize) -> f64,
{
    let mut acc = ComplexValue::zero(prec);
    for n in 0..cap {
        acc += term(n);
        if tail(n + 1) < tol {
            return Ok(SeriesSum { value: acc, terms: n + 1 });
        }
    }
    Err(NumError::NonConvergent { terms: cap })
}

/// [`sum_series_tol`] with the policy's series tolerance and term cap.
pub fn sum_series<T, B>(policy: &PrecisionPolicy, term: T, tail: B) -> Result<SeriesSum, NumError>
where
    T: FnMut(usize) -> ComplexValue,
    B: FnMut(usize) -> f64,
{
    sum_series_tol(policy.bits(), policy.series_tol(), policy.term_cap(), term, tail)
}

/// Remainder bound for `Σ_{n≥N} C·n^k·r^n` with `0 ≤ r < 1`, valid once the
/// term ratio `((N+1)/N)^k·r` is below one; infinite otherwise.
pub fn poly_geometric_tail(c: f64, k: i32, r: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let ratio = ((nf + 1.0) / nf).powi(k) * r;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let log_head = c.ln() + (k as f64) * nf.ln() + nf * r.ln();
    log_head.exp() / (1.0 - ratio)
}
