//! Jacobi theta constants, Eisenstein series and the elliptic `J` with
//! `J(i) = 1`.

use rug::ops::Pow;
use rug::{Float, Rational};

use hilbk3_exact::FormalSeries;
use hilbk3_numkernel::{pi, poly_geometric_tail, sum_series_tol, ComplexValue, PrecisionPolicy};

use crate::points::UHPoint;
use crate::Result;

/// Extra mantissa bits carried internally and dropped on return.
pub const GUARD_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    T00,
    T01,
    T10,
}

/// `Σ_n exp(iπ(n+a/2)²z + iπ(n+a/2)b)`.
pub fn jacobi_theta(kind: ThetaKind, z: &UHPoint, policy: &PrecisionPolicy) -> ComplexValue {
    let prec = policy.bits() + GUARD_BITS;
    let zz = z.z().with_prec(prec);
    let y = zz.im_f64();
    // Terms beyond |n + a/2| ≥ N are below e^{−πyN²} and decay geometrically,
    // so N² ≥ bits·ln 2/(πy) reaches the truncation tolerance.
    let ln_tol = -(prec as f64) * std::f64::consts::LN_2;
    let n_max = ((-ln_tol / (std::f64::consts::PI * y)).sqrt()).ceil() as i64 + 2;
    let one = ComplexValue::one(prec);
    let acc = match kind {
        ThetaKind::T00 | ThetaKind::T01 => {
            // 1 + 2Σ_{n≥1} (±1)^n q^{n²}, q = e^{iπz}
            let q = ComplexValue::exp_i_pi_complex(&zz);
            let q2 = q.square();
            let mut term = q.clone();
            let mut step = &q * &q2;
            let mut s = ComplexValue::zero(prec);
            for n in 1..=n_max {
                if kind == ThetaKind::T01 && n % 2 == 1 {
                    s -= &term;
                } else {
                    s += &term;
                }
                term *= &step;
                step *= &q2;
            }
            one + s.scale_i64(2)
        }
        ThetaKind::T10 => {
            // 2Σ_{n≥0} q^{(n+1/2)²} = 2q^{1/4} Σ q^{n(n+1)}
            let q = ComplexValue::exp_i_pi_complex(&zz);
            let q4 = ComplexValue::exp_i_pi_complex(&zz.scale(&Rational::from((1, 4))));
            let q2 = q.square();
            let mut term = ComplexValue::one(prec);
            let mut step = q2.clone();
            let mut s = ComplexValue::zero(prec);
            for _ in 0..=n_max {
                s += &term;
                term *= &step;
                step *= &q2;
            }
            (q4 * s).scale_i64(2)
        }
    };
    acc.with_prec(policy.bits())
}

/// `σ_k(n)`.
pub fn divisor_sigma(n: u64, k: u32) -> u64 {
    let mut s = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += d.pow(k);
            let e = n / d;
            if e != d {
                s += e.pow(k);
            }
        }
        d += 1;
    }
    s
}

#[derive(Clone, Debug)]
pub struct Eisenstein {
    pub e4: ComplexValue,
    pub e6: ComplexValue,
    /// `G₂³ − 27G₃² = (64π¹²/27)(E₄³ − E₆²)`
    pub delta: ComplexValue,
    pub j: ComplexValue,
}

fn eisenstein_at(prec: u32, q: &ComplexValue, tol: f64, cap: usize) -> Result<(ComplexValue, ComplexValue)> {
    let r = q.abs_f64();
    let mut qn = ComplexValue::one(prec);
    let mut powers = vec![qn.clone()];
    let mut get = |n: usize| -> ComplexValue {
        while powers.len() <= n {
            qn *= q;
            powers.push(qn.clone());
        }
        powers[n].clone()
    };
    // σ₃(n) ≤ ζ(3)n³ and σ₅(n) ≤ ζ(5)n⁵.
    let s3 = sum_series_tol(
        prec,
        tol,
        cap,
        |n| if n == 0 { ComplexValue::zero(prec) } else { get(n).scale_i64(divisor_sigma(n as u64, 3) as i64) },
        |n| poly_geometric_tail(1.21, 3, r, n.max(1)),
    )?;
    let mut qn = ComplexValue::one(prec);
    let mut powers = vec![qn.clone()];
    let mut get = |n: usize| -> ComplexValue {
        while powers.len() <= n {
            qn *= q;
            powers.push(qn.clone());
        }
        powers[n].clone()
    };
    let s5 = sum_series_tol(
        prec,
        tol,
        cap,
        |n| if n == 0 { ComplexValue::zero(prec) } else { get(n).scale_i64(divisor_sigma(n as u64, 5) as i64) },
        |n| poly_geometric_tail(1.04, 5, r, n.max(1)),
    )?;
    let one = ComplexValue::one(prec);
    Ok((&one + s3.value.scale_i64(240), one - s5.value.scale_i64(504)))
}

/// `E₄, E₆` by divisor-sum q-expansions, then `Δ` and `J`.
pub fn eisenstein_and_j(z: &UHPoint, policy: &PrecisionPolicy) -> Result<Eisenstein> {
    let prec = policy.bits() + GUARD_BITS;
    let zz = z.z().with_prec(prec);
    let q = ComplexValue::exp_i_pi_complex(&zz.scale_i64(2));
    let (e4, e6) = eisenstein_at(prec, &q, policy.truncation_tol() / 1024.0, policy.term_cap())?;
    let e43 = e4.powu(3);
    let diff = &e43 - &e6.square();
    let p = pi(prec);
    let c = ComplexValue::from_real(Float::with_val(prec, p.pow(12u32)) * 64u32 / 27u32);
    let delta = &diff * &c;
    let j = &e43 / &diff;
    let r = |x: ComplexValue| x.with_prec(policy.bits());
    Ok(Eisenstein { e4: r(e4), e6: r(e6), delta: r(delta), j: r(j) })
}

pub fn j_function(z: &UHPoint, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    Ok(eisenstein_and_j(z, policy)?.j)
}

/// `|(1/1728)(3/4π⁴)³Δ − 2⁻⁸θ₀₀⁸θ₀₁⁸θ₁₀⁸|` relative to the larger side.
pub fn theta_delta_identity(z: &UHPoint, policy: &PrecisionPolicy) -> Result<f64> {
    let prec = policy.bits() + GUARD_BITS;
    let hp = PrecisionPolicy::new(prec)?;
    let e = eisenstein_and_j(z, &hp)?;
    let p = pi(prec);
    let k = Float::with_val(prec, 3u32) / (Float::with_val(prec, p.pow(4u32)) * 4u32);
    let k3 = Float::with_val(prec, k.pow(3u32)) / 1728u32;
    let lhs = e.delta.scale_float(&k3);
    let t = jacobi_theta(ThetaKind::T00, z, &hp) * jacobi_theta(ThetaKind::T01, z, &hp) * jacobi_theta(ThetaKind::T10, z, &hp);
    let rhs = t.powu(8).scale(&Rational::from((1, 256)));
    Ok(lhs.rel_diff(&rhs))
}

/// A Laurent series `Σ_k c_k q^{k + leading_exponent}`, known for the
/// stored coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub leading_exponent: i64,
    pub coeffs: Vec<Rational>,
}

impl QExpansion {
    /// The coefficient of `q^e`.
    pub fn coeff(&self, e: i64) -> Option<&Rational> {
        let k = e - self.leading_exponent;
        if k < 0 {
            return None;
        }
        self.coeffs.get(k as usize)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluates the truncated sum at `z` (`q = e^{2πiz}`).
    pub fn eval(&self, z: &UHPoint) -> ComplexValue {
        let prec = z.prec();
        let q = ComplexValue::exp_i_pi_complex(&z.z().scale_i64(2));
        let mut acc = ComplexValue::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc * &q + ComplexValue::from_rational(prec, c);
        }
        acc * q.powi(self.leading_exponent as i32)
    }
}

fn eisenstein_series(k: u32, order: usize) -> FormalSeries {
    let (c, e): (i64, u32) = if k == 4 { (240, 3) } else { (-504, 5) };
    let mut v = vec![Rational::from(1)];
    v.extend((1..order).map(|n| Rational::from(c * divisor_sigma(n as u64, e) as i64)));
    FormalSeries::new("q", v)
}

/// `E₄` and `E₆` as exact q-series with `order` coefficients.
pub fn eisenstein_qseries(order: usize) -> (FormalSeries, FormalSeries) {
    (eisenstein_series(4, order), eisenstein_series(6, order))
}

/// `1728·J = E₄³/((E₄³ − E₆²)/1728)/…` by exact series division, starting at
/// `q⁻¹`, with `order` coefficients.
pub fn j_qexpansion(order: usize) -> QExpansion {
    assert!(order >= 1, "order must be positive");
    let n = order + 1;
    let (e4, e6) = eisenstein_qseries(n);
    let e43 = e4.pow(3);
    let diff = e43.sub(&e6.pow(2));
    // diff = 1728q·D(q) with D(0) = 1
    let d: Vec<Rational> = diff.coeffs()[1..].iter().map(|c| Rational::from(c / 1728u32)).collect();
    let d = FormalSeries::new("q", d);
    let quotient = e43.truncate(order).mul(&d.inverse().expect("leading coefficient 1"));
    QExpansion { leading_exponent: -1, coeffs: quotient.coeffs().to_vec() }
}
