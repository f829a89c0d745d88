//! Generalized hypergeometric series, the Gauss equation `E(1/12, 5/12, 1)`,
//! the restricted period equation with its factorization `W₄ = W₁∘W₃`, and
//! the Schwarz map `t ↦ z₀` inverting `1/J`.

use rug::ops::Pow;
use rug::{Float, Rational};

use hilbk3_exact::{
    residual, series_solve, vars, DiffOperator, FormalSeries, LogSeries, Point, RationalFunction, Vars,
};
use hilbk3_numkernel::{pi, ComplexValue, NumError, PrecisionPolicy};

use crate::classical::{j_qexpansion, GUARD_BITS};
use crate::forms::diagonal_xj;
use crate::points::UHPoint;
use crate::{Error, Result};

/// Parameters of `ₚF_q(upper; lower; t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergeomParams {
    upper: Vec<Rational>,
    lower: Vec<Rational>,
}

impl HypergeomParams {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Result<Self> {
        if let Some(b) = lower.iter().find(|b| b.is_integer() && **b <= 0) {
            return Err(Error::OutsideDomain(format!("lower parameter {b} is a nonpositive integer")));
        }
        Ok(HypergeomParams { upper, lower })
    }

    /// From `(numerator, denominator)` pairs.
    pub fn from_pairs(upper: &[(i64, i64)], lower: &[(i64, i64)]) -> Result<Self> {
        let r = |v: &[(i64, i64)]| v.iter().map(|&p| Rational::from(p)).collect();
        Self::new(r(upper), r(lower))
    }

    /// `₂F₁(1/12, 5/12; 1; t)`.
    pub fn gauss() -> Self {
        Self::from_pairs(&[(1, 12), (5, 12)], &[(1, 1)]).unwrap()
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    /// `c_{n+1}/c_n = Π(a_i+n) / (Π(b_j+n)·(n+1))`.
    fn ratio(&self, n: usize) -> Rational {
        let mut r = Rational::from(1);
        for a in &self.upper {
            r *= Rational::from(a + n as u32);
        }
        for b in &self.lower {
            r /= Rational::from(b + n as u32);
        }
        r / (n as u32 + 1)
    }

    /// Exact coefficients `c₀, …, c_{order−1}` in the variable `t`.
    pub fn series(&self, order: usize) -> FormalSeries {
        let mut c = Vec::with_capacity(order);
        let mut x = Rational::from(1);
        for n in 0..order {
            c.push(x.clone());
            x *= self.ratio(n);
        }
        FormalSeries::new("t", c)
    }

    /// Numeric value for `|t| < 1` by the Pochhammer recurrence.
    ///
    /// For `n ≥ N` and `p ≤ q + 1` the term ratio is at most
    /// `ρ_N = |t|·Π(1+|a_i|/N)/Π(1−|b_j|/N)`, so the tail after `N` terms is
    /// below `|c_N t^N|·ρ_N/(1−ρ_N)` once `ρ_N < 1`.
    pub fn eval(&self, t: &ComplexValue, policy: &PrecisionPolicy) -> Result<ComplexValue> {
        let cap = policy.term_cap();
        if self.upper.len() > self.lower.len() + 1 {
            return Err(NumError::NonConvergent { terms: 0 }.into());
        }
        let prec = policy.bits() + GUARD_BITS;
        let tt = t.with_prec(prec);
        let at = tt.abs_f64();
        let ua: Vec<f64> = self.upper.iter().map(|a| a.to_f64().abs()).collect();
        let lb: Vec<f64> = self.lower.iter().map(|b| b.to_f64().abs()).collect();
        let tol = policy.truncation_tol();
        let mut acc = ComplexValue::zero(prec);
        let mut term = ComplexValue::one(prec);
        for n in 0..cap {
            acc += &term;
            term = (&term * &tt).scale(&self.ratio(n));
            let m = (n + 1) as f64;
            if lb.iter().all(|b| *b < m) {
                let rho = at * ua.iter().map(|a| 1.0 + a / m).product::<f64>()
                    / lb.iter().map(|b| 1.0 - b / m).product::<f64>();
                let scale = acc.abs_f64().max(f64::MIN_POSITIVE);
                if term.is_zero() || (rho < 1.0 && term.abs_f64() * rho / (1.0 - rho) < tol * scale) {
                    return Ok((acc + term).with_prec(policy.bits()));
                }
            }
        }
        Err(NumError::NonConvergent { terms: cap }.into())
    }
}

fn ring_t() -> Vars {
    vars(&["t"])
}

fn ring_x() -> Vars {
    vars(&["X"])
}

fn parse_op(v: &Vars, coeffs: &[&str]) -> DiffOperator {
    DiffOperator::parse(v, coeffs).expect("operator literal parses")
}

/// `t(1−t)u″ + (1 − 3t/2)u′ − (5/144)u`.
pub fn gauss_operator() -> DiffOperator {
    parse_op(&ring_t(), &["-5/144", "1-3/2*t", "t*(1-t)"])
}

/// The restricted period equation in `X`, the operators `W₄, W₃, W₁` in
/// `t = 27X/25`, and the third-order equation for the derivatives.
#[derive(Clone, Debug)]
pub struct RestrictedODE {
    pub restricted: DiffOperator,
    pub w4: DiffOperator,
    pub w3: DiffOperator,
    pub w1: DiffOperator,
    pub restdiff3: DiffOperator,
}

const DEN_X: &str = "(81*X^2-1155*X+1000)";
const DEN_T: &str = "(72*t^2*(t-1)*(5*t-72))";

pub fn restricted_operator() -> DiffOperator {
    parse_op(
        &ring_x(),
        &[
            "0",
            &format!("15*(3*X-80)/(8*X^2*{DEN_X})"),
            &format!("(2034*X^2-40680*X+8000)/(8*X^2*{DEN_X})"),
            &format!("3*(243*X^2-4060*X+2000)/(2*X*{DEN_X})"),
            "1",
        ],
    )
}

pub fn build_restricted_operators() -> RestrictedODE {
    let t = ring_t();
    let w4 = parse_op(
        &t,
        &[
            "0",
            &format!("(25*t-720)/{DEN_T}"),
            &format!("2*(565*t^2-12204*t+2592)/{DEN_T}"),
            &format!("(1620*t^3-29232*t^2+15552*t)/{DEN_T}"),
            "1",
        ],
    );
    let w3 = parse_op(&t, &["(72-5*t)/(72*t^3*(t-1))", "(5*t-36)/(36*t^2*(t-1))", "3/(2*(t-1))", "1"]);
    let w1 = parse_op(&t, &["(15*t^2-298*t+216)/(t*(t-1)*(5*t-72))", "1"]);
    let restdiff3 = parse_op(
        &t,
        &[
            &format!("(25*t-720)/{DEN_T}"),
            &format!("(1130*t^2-24408*t+5184)/{DEN_T}"),
            &format!("(1620*t^3-29232*t^2+15552*t)/{DEN_T}"),
            "1",
        ],
    );
    RestrictedODE { restricted: restricted_operator(), w4, w3, w1, restdiff3 }
}

/// The operator `L` in `X` rewritten in `t` with `X = k·t`: since
/// `d/dX = k⁻¹ d/dt`, the coefficient of `D^i` becomes `a_i(kt)·k^{−i}`.
pub fn rescale_variable(op: &DiffOperator, k: &Rational, target: &Vars) -> Result<DiffOperator> {
    let both = vars(&[op.vars()[0].as_str(), target[0].as_str()]);
    let kt = RationalFunction::var(&both, 1).scale(k);
    let kinv = Rational::from(k.recip_ref());
    let mut out = Vec::with_capacity(op.order() + 1);
    for (i, a) in op.coeffs().iter().enumerate() {
        let lifted = a.to_ring(&both)?.substitute(0, &kt)?;
        let scaled = lifted.scale(&Rational::from(kinv.clone().pow(i as u32)));
        out.push(scaled.to_ring(target)?);
    }
    Ok(DiffOperator::new(out)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    /// `W₁∘W₃ = W₄` coefficientwise.
    pub w4_is_w1_w3: bool,
    /// The restricted equation under `X = 25t/27` equals `W₄` after
    /// normalizing the leading coefficient.
    pub transport_matches: bool,
    /// `W₄ = W₃′ ∘ D` where `W₃′` is the derivative equation.
    pub restdiff3_matches: bool,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.w4_is_w1_w3 && self.transport_matches && self.restdiff3_matches
    }
}

pub fn check_factorization(ops: &RestrictedODE) -> Result<FactorizationReport> {
    let transported = rescale_variable(&ops.restricted, &Rational::from((25, 27)), ops.w4.vars())?;
    Ok(FactorizationReport {
        w4_is_w1_w3: ops.w1.compose(&ops.w3) == ops.w4,
        transport_matches: transported.equivalent(&ops.w4),
        restdiff3_matches: ops.restdiff3.compose(&DiffOperator::d(ops.w4.vars())) == ops.w4,
    })
}

/// Local exponents at each point, sorted with multiplicity.
pub fn riemann_scheme(op: &DiffOperator, points: &[Point]) -> Result<Vec<(Point, Vec<Rational>)>> {
    points.iter().map(|p| Ok((p.clone(), op.indicial_exponents(p)?))).collect()
}

/// Singular points of the restricted equation: `0, 25/27, 40/3, ∞`.
pub fn restricted_singular_points() -> Vec<Point> {
    vec![
        Point::Finite(Rational::new()),
        Point::Finite(Rational::from((25, 27))),
        Point::Finite(Rational::from((40, 3))),
        Point::Infinity,
    ]
}

/// Exponents stated for the restricted equation, in the order of
/// [`restricted_singular_points`].
pub fn expected_restricted_scheme() -> Vec<Vec<Rational>> {
    let q = |v: &[(i64, i64)]| v.iter().map(|&p| Rational::from(p)).collect::<Vec<_>>();
    vec![
        q(&[(0, 1), (1, 1), (1, 1), (1, 1)]),
        q(&[(0, 1), (1, 2), (1, 1), (2, 1)]),
        q(&[(0, 1), (1, 1), (2, 1), (4, 1)]),
        q(&[(-5, 6), (-1, 2), (-1, 6), (0, 1)]),
    ]
}

#[derive(Clone, Debug)]
pub struct SymmetricSquareReport {
    pub order: usize,
    /// `(name, log degree, W₃ residual vanishes)` for `t·y₁², t·y₁y₂, t·y₂²`.
    pub products: Vec<(&'static str, usize, bool)>,
    /// `s₂² = s₁s₃` as truncated log series.
    pub quadratic_relation: bool,
}

impl SymmetricSquareReport {
    pub fn passed(&self) -> bool {
        self.quadratic_relation
            && self.products.iter().enumerate().all(|(k, (_, deg, ok))| *ok && *deg == k)
    }
}

/// Frobenius basis `y₁ = F`, `y₂ = log(t)·F + …` of the Gauss equation at 0.
pub fn gauss_frobenius_basis(order: usize) -> Result<(LogSeries, LogSeries)> {
    let mut sols = series_solve(&gauss_operator(), &Point::Finite(Rational::new()), order)?;
    if sols.len() != 2 {
        return Err(Error::EliminationFailed(format!("expected 2 Frobenius solutions, got {}", sols.len())));
    }
    let y2 = sols.pop().unwrap();
    let y1 = sols.pop().unwrap();
    Ok((y1, y2))
}

pub fn verify_symmetric_square(order: usize) -> Result<SymmetricSquareReport> {
    assert!(order >= 10, "order must be at least 10");
    let ops = build_restricted_operators();
    let (y1, y2) = gauss_frobenius_basis(order)?;
    let s1 = y1.mul(&y1).mul_t_power(1);
    let s2 = y1.mul(&y2).mul_t_power(1);
    let s3 = y2.mul(&y2).mul_t_power(1);
    let origin = Point::Finite(Rational::new());
    let check = |s: &LogSeries| residual(&ops.w3, &origin, s).comps.iter().all(|c| c.is_zero());
    let products = vec![
        ("t*y1^2", s1.log_degree(), check(&s1)),
        ("t*y1*y2", s2.log_degree(), check(&s2)),
        ("t*y2^2", s3.log_degree(), check(&s3)),
    ];
    let quadratic_relation = s2.mul(&s2) == s1.mul(&s3);
    Ok(SymmetricSquareReport { order, products, quadratic_relation })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClausenReport {
    pub order: usize,
    /// `₃F₂(1/6,1/2,5/6;1,1;t) = ₂F₁(1/12,5/12;1;t)²`.
    pub clausen: bool,
    /// The derivative equation annihilates `S(t)`.
    pub restdiff3_kills_s: bool,
    /// `t·₃F₂(…;1,2;t) + (1/5)t·₃F₂(7/6,…;1,2;t) = (6/5)t·₃F₂(…;1,1;t)`.
    pub antiderivative: bool,
    /// `d/dt` of the antiderivative is `S(t)`.
    pub derivative_consistency: bool,
    /// `W₃` annihilates `(6/5)t·F²`.
    pub w3_kills_integral: bool,
}

impl ClausenReport {
    pub fn passed(&self) -> bool {
        self.clausen
            && self.restdiff3_kills_s
            && self.antiderivative
            && self.derivative_consistency
            && self.w3_kills_integral
    }
}

/// `S(t) = ₃F₂(1/6,1/2,5/6;1,1;t) + (1/5)·₃F₂(7/6,1/2,5/6;1,1;t)`.
pub fn s_series(order: usize) -> FormalSeries {
    let a = HypergeomParams::from_pairs(&[(1, 6), (1, 2), (5, 6)], &[(1, 1), (1, 1)]).unwrap();
    let b = HypergeomParams::from_pairs(&[(7, 6), (1, 2), (5, 6)], &[(1, 1), (1, 1)]).unwrap();
    a.series(order).add(&b.series(order).scale(&Rational::from((1, 5))))
}

pub fn verify_clausen_and_s(order: usize) -> Result<ClausenReport> {
    assert!(order >= 10, "order must be at least 10");
    let ops = build_restricted_operators();
    let f = HypergeomParams::gauss().series(order);
    let f32_11 = HypergeomParams::from_pairs(&[(1, 6), (1, 2), (5, 6)], &[(1, 1), (1, 1)])?.series(order);
    let clausen = f32_11 == f.mul(&f);

    let s = s_series(order);
    let origin = Point::Finite(Rational::new());
    let r = residual(&ops.restdiff3, &origin, &LogSeries::from_series(s.clone()));
    let restdiff3_kills_s = r.is_zero();

    // One more coefficient so that t·F(t) is known to the same order.
    let a = HypergeomParams::from_pairs(&[(1, 6), (1, 2), (5, 6)], &[(1, 1), (2, 1)])?.series(order);
    let b = HypergeomParams::from_pairs(&[(7, 6), (1, 2), (5, 6)], &[(1, 1), (2, 1)])?.series(order);
    let lhs = a.add(&b.scale(&Rational::from((1, 5)))).shift(1);
    let rhs = f32_11.scale(&Rational::from((6, 5))).shift(1);
    let antiderivative = lhs == rhs;
    let derivative_consistency = lhs.derivative().truncate(order) == s.truncate(order);
    let w3_kills_integral = residual(&ops.w3, &origin, &LogSeries::from_series(rhs)).is_zero();
    Ok(ClausenReport { order, clausen, restdiff3_kills_s, antiderivative, derivative_consistency, w3_kills_integral })
}

/// `1/J = 1728q/(1 + 744q + 196884q² + …)` as an exact series in `q`.
pub fn inverse_j_series(order: usize) -> FormalSeries {
    let p = FormalSeries::new("q", j_qexpansion(order).coeffs);
    let inv = p.inverse().expect("constant term 1").scale(&Rational::from(1728));
    inv.shift(1).truncate(order)
}

/// The compositional inverse `q(t)` of [`inverse_j_series`].
pub fn schwarz_seed_series(order: usize) -> FormalSeries {
    let mut s = inverse_j_series(order).reversion().expect("linear coefficient 1728");
    s = FormalSeries::new("t", s.coeffs().to_vec());
    s
}

/// Terms of the `1728J` expansion needed at `q = e^{−2π}`: the coefficients
/// grow like `e^{4π√k}`, so `2πk − 4π√k` must exceed the working bits.
fn q_order(bits: u32) -> usize {
    let need = bits as f64 * std::f64::consts::LN_2 + 8.0;
    let tau = 2.0 * std::f64::consts::PI;
    (2..).find(|&k| tau * k as f64 - 2.0 * tau * (k as f64).sqrt() > need).unwrap()
}

/// `(P(q), P′(q))` by Horner for `P = Σ c_k q^k`.
fn horner_with_derivative(c: &[Float], q: &Float) -> (Float, Float) {
    let prec = q.prec();
    let mut p = Float::with_val(prec, 0);
    let mut dp = Float::with_val(prec, 0);
    for ck in c.iter().rev() {
        dp = Float::with_val(prec, &dp * q) + &p;
        p = Float::with_val(prec, &p * q) + ck;
    }
    (p, dp)
}

/// The branch of `σ(t) = y₂/y₁` on `(0, 1)` with `1/J(σ(t)) = t`,
/// `σ(0⁺) = i∞` and `σ(1⁻) = i`.
///
/// Writing `1/J = g(q) = 1728q/P(q)`, `g` increases from `0` to `1` on
/// `(0, e^{−2π}]`. The root is seeded from the reversed series and polished
/// by Newton on `g`, falling back to bisection when a step leaves the
/// bracket.
pub fn schwarz_map(t: &Float, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let prec = policy.bits() + GUARD_BITS;
    if !(*t > 0 && *t < 1) {
        return Err(Error::OutsideDomain(format!("t = {} is not in (0, 1)", t.to_f64())));
    }
    let t = Float::with_val(prec, t);
    let two_pi = Float::with_val(prec, pi(prec) * 2u32);
    let n = q_order(prec);
    let coeffs: Vec<Float> = j_qexpansion(n).coeffs.iter().map(|c| Float::with_val(prec, c)).collect();
    let g = |q: &Float| -> (Float, Float) {
        let (p, dp) = horner_with_derivative(&coeffs, q);
        let val = Float::with_val(prec, q * 1728u32) / &p;
        let num = Float::with_val(prec, &p - Float::with_val(prec, q * &dp)) * 1728u32;
        let der = num / Float::with_val(prec, p.square_ref());
        (val, der)
    };
    let mut lo = Float::with_val(prec, 0);
    let mut hi = Float::with_val(prec, -&two_pi).exp();
    let mut q = if t < 0.9 {
        let seed = schwarz_seed_series(24);
        let mut acc = Float::with_val(prec, 0);
        for c in seed.coeffs().iter().rev() {
            acc = Float::with_val(prec, &acc * &t) + Float::with_val(prec, c);
        }
        acc
    } else {
        Float::with_val(prec, &hi * 0.99)
    };
    if !(q > lo && q < hi) {
        q = Float::with_val(prec, &hi / 2u32);
    }
    let stop = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8));
    let max_iter = 400;
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let (v, d) = g(&q);
        let f = Float::with_val(prec, &v - &t);
        last = f.to_f64().abs();
        if f > 0 {
            hi = q.clone();
        } else {
            lo = q.clone();
        }
        let mut next = Float::with_val(prec, &q - Float::with_val(prec, &f / &d));
        if !(next > lo && next < hi) || d.is_zero() {
            next = Float::with_val(prec, &lo + &hi) / 2u32;
        }
        let step = Float::with_val(prec, &next - &q).abs();
        q = next;
        if step <= Float::with_val(prec, &q * &stop) {
            let y = Float::with_val(prec, -q.ln()) / &two_pi;
            if y < 1 {
                return Err(Error::OutsideDomain("Newton left the fundamental branch".into()));
            }
            return Ok(ComplexValue::from_parts(Float::with_val(policy.bits(), 0), Float::with_val(policy.bits(), y)));
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: last })
}

#[derive(Clone, Debug)]
pub struct DiagonalTheoremReport {
    /// `|X(z,z)·J(z) − 25/27|` per sample.
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl DiagonalTheoremReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| *r < self.tol)
    }
}

/// `X(z,z) = (25/27)·1/J(z)` at each sample.
pub fn verify_diagonal_x(samples: &[UHPoint], policy: &PrecisionPolicy) -> Result<DiagonalTheoremReport> {
    let want = ComplexValue::from_rational(policy.bits(), &Rational::from((25, 27)));
    let residuals = samples
        .iter()
        .map(|z| Ok(diagonal_xj(z, policy)?.dist(&want)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagonalTheoremReport { residuals, tol: policy.verify_tol() })
}
