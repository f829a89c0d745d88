//! Genus-two theta constants on the image of `ψ: ℍ×ℍ → 𝔖₂` and Müller's
//! modular forms built from them.

use rug::Rational;

use hilbk3_numkernel::{ComplexValue, PrecisionPolicy, QuadraticConstants};

use crate::classical::GUARD_BITS;
use crate::points::{Generator, UHPPair};
use crate::{Error, Result};

/// A symmetric matrix `[[σ₁, σ₂], [σ₂, σ₃]]` with positive-definite
/// imaginary part.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    pub s1: ComplexValue,
    pub s2: ComplexValue,
    pub s3: ComplexValue,
}

impl SiegelPoint {
    pub fn new(s1: ComplexValue, s2: ComplexValue, s3: ComplexValue) -> Result<Self> {
        let (a, b, c) = (s1.im_f64(), s2.im_f64(), s3.im_f64());
        if !(a > 0.0 && a * c - b * b > 0.0) {
            return Err(Error::InvalidPoint(format!("Im Z = [[{a}, {b}], [{b}, {c}]] is not positive definite")));
        }
        Ok(SiegelPoint { s1, s2, s3 })
    }

    pub fn prec(&self) -> u32 {
        self.s1.prec()
    }

    /// Least eigenvalue of `Im Z`.
    pub fn lambda_min(&self) -> f64 {
        let (a, b, c) = (self.s1.im_f64(), self.s2.im_f64(), self.s3.im_f64());
        ((a + c) - ((a - c).powi(2) + 4.0 * b * b).sqrt()) / 2.0
    }

    /// `−σ₁ + σ₂ + σ₃`, which vanishes on the image of [`psi`].
    pub fn slice_relation(&self) -> ComplexValue {
        &self.s2 + &self.s3 - &self.s1
    }

    fn with_prec(&self, prec: u32) -> Self {
        SiegelPoint { s1: self.s1.with_prec(prec), s2: self.s2.with_prec(prec), s3: self.s3.with_prec(prec) }
    }
}

/// `ψ(z₁,z₂) = (1/2√5)[[(1+√5)z₁−(1−√5)z₂, 2(z₁−z₂)], [2(z₁−z₂), (−1+√5)z₁+(1+√5)z₂]]`.
pub fn psi(p: &UHPPair) -> SiegelPoint {
    let prec = p.prec();
    let k = QuadraticConstants::new(prec);
    let one = ComplexValue::one(prec);
    let d = k.sqrt5.scale_i64(2).recip();
    let s1 = (&p.z1 * (&one + &k.sqrt5) - &p.z2 * (&one - &k.sqrt5)) * &d;
    let s2 = (&p.z1 - &p.z2).scale_i64(2) * &d;
    let s3 = (&p.z1 * (&k.sqrt5 - &one) + &p.z2 * (&one + &k.sqrt5)) * &d;
    // Im ψ is positive definite whenever Im z₁, Im z₂ > 0.
    SiegelPoint { s1, s2, s3 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThetaCharacteristic {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

impl ThetaCharacteristic {
    pub fn new(a: [u8; 2], b: [u8; 2]) -> Self {
        assert!(a.iter().chain(&b).all(|&x| x < 2), "characteristic entries lie in {{0,1}}");
        ThetaCharacteristic { a, b }
    }

    pub fn is_even(&self) -> bool {
        (self.a[0] * self.b[0] + self.a[1] * self.b[1]) % 2 == 0
    }

    fn a_class(&self) -> usize {
        (self.a[0] * 2 + self.a[1]) as usize
    }
}

/// The characteristic `(a; b)` attached to `θ_j`.
pub fn characteristic(j: usize) -> ThetaCharacteristic {
    const T: [([u8; 2], [u8; 2]); 10] = [
        ([0, 0], [0, 0]),
        ([1, 1], [0, 0]),
        ([0, 0], [1, 1]),
        ([1, 1], [1, 1]),
        ([0, 1], [0, 0]),
        ([1, 0], [0, 0]),
        ([0, 0], [0, 1]),
        ([1, 0], [0, 1]),
        ([0, 0], [1, 0]),
        ([0, 1], [1, 0]),
    ];
    let (a, b) = T[j];
    ThetaCharacteristic::new(a, b)
}

/// Smallest `R` with `exp(−πλ(R−1)²)` below `2^−bits`.
pub fn truncation_radius(lambda_min: f64, bits: u32) -> i64 {
    let ln_tol = -(bits as f64) * std::f64::consts::LN_2;
    let r = 1.0 + (-ln_tol / (std::f64::consts::PI * lambda_min)).sqrt();
    r.ceil() as i64
}

/// `S[a][c] = Σ_{h ≡ c mod 2} exp(πi·ᵗ(h+a/2)Z(h+a/2))` over the box
/// `|h_i| ≤ R`, with `a` and `c` encoded as `2x₁ + x₂`.
fn partial_sums(z: &SiegelPoint, radius: i64) -> Vec<[ComplexValue; 4]> {
    let prec = z.prec();
    let half = Rational::from((1, 2));
    let step3 = ComplexValue::exp_i_pi_complex(&z.s3.scale_i64(2));
    (0..4usize)
        .map(|ac| {
            let (a1, a2) = ((ac >> 1) as i64, (ac & 1) as i64);
            let mut s: [ComplexValue; 4] = std::array::from_fn(|_| ComplexValue::zero(prec));
            for h1 in -radius..=radius {
                let x1 = Rational::from(h1) + Rational::from(a1) * &half;
                let x2 = Rational::from(-radius) + Rational::from(a2) * &half;
                // first term of the row by direct exponentiation
                let q = Rational::from(&x1 * &x1);
                let qx = Rational::from(&x1 * &x2) * 2u32;
                let q2 = Rational::from(&x2 * &x2);
                let arg = z.s1.scale(&q) + z.s2.scale(&qx) + z.s3.scale(&q2);
                let mut term = ComplexValue::exp_i_pi_complex(&arg);
                // ratio for x₂ → x₂+1 is e^{iπ(2σ₂x₁ + σ₃(2x₂+1))}
                let r_arg = z.s2.scale(&Rational::from(&x1 * 2u32)) + z.s3.scale(&(Rational::from(&x2 * 2u32) + 1u32));
                let mut ratio = ComplexValue::exp_i_pi_complex(&r_arg);
                for h2 in -radius..=radius {
                    let c = (h1.rem_euclid(2) * 2 + h2.rem_euclid(2)) as usize;
                    s[c] += &term;
                    term *= &ratio;
                    ratio *= &step3;
                }
            }
            s
        })
        .collect()
}

fn combine(s: &[[ComplexValue; 4]], ch: &ThetaCharacteristic) -> ComplexValue {
    let row = &s[ch.a_class()];
    let mut acc = ComplexValue::zero(row[0].prec());
    for (c, v) in row.iter().enumerate() {
        let (c1, c2) = ((c >> 1) as u8, (c & 1) as u8);
        if (c1 * ch.b[0] + c2 * ch.b[1]) % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

/// `ϑ(Z; a, b) = Σ_{g∈ℤ²} exp(πi(ᵗ(g+a/2)Z(g+a/2) + ᵗg·b))`.
pub fn siegel_theta(z: &SiegelPoint, ch: &ThetaCharacteristic, policy: &PrecisionPolicy) -> ComplexValue {
    let prec = policy.bits() + GUARD_BITS;
    let zz = z.with_prec(prec);
    let r = truncation_radius(zz.lambda_min(), prec);
    combine(&partial_sums(&zz, r), ch).with_prec(policy.bits())
}

/// All ten `θ_j(z₁,z₂) = ϑ(ψ(z₁,z₂); a_j, b_j)` at `prec` bits, from one
/// pass over the lattice.
fn theta_all_at(p: &UHPPair, prec: u32) -> [ComplexValue; 10] {
    let pp = UHPPair { z1: p.z1.with_prec(prec), z2: p.z2.with_prec(prec) };
    let z = psi(&pp);
    let r = truncation_radius(z.lambda_min(), prec);
    let s = partial_sums(&z, r);
    std::array::from_fn(|j| combine(&s, &characteristic(j)))
}

pub fn theta_all(p: &UHPPair, policy: &PrecisionPolicy) -> [ComplexValue; 10] {
    theta_all_at(p, policy.bits() + GUARD_BITS).map(|t| t.with_prec(policy.bits()))
}

pub fn theta_j(j: usize, p: &UHPPair, policy: &PrecisionPolicy) -> ComplexValue {
    siegel_theta(&psi(p), &characteristic(j), policy)
}

/// `g₂, s₅, s₆, s₁₀ = s₅², s₁₅`.
#[derive(Clone, Debug)]
pub struct MuellerForms {
    pub g2: ComplexValue,
    pub s5: ComplexValue,
    pub s6: ComplexValue,
    pub s10: ComplexValue,
    pub s15: ComplexValue,
}

impl MuellerForms {
    pub fn with_prec(&self, prec: u32) -> Self {
        MuellerForms {
            g2: self.g2.with_prec(prec),
            s5: self.s5.with_prec(prec),
            s6: self.s6.with_prec(prec),
            s10: self.s10.with_prec(prec),
            s15: self.s15.with_prec(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.g2.prec()
    }
}

/// `s₁₅ = −2⁻¹⁸ Σ ± (θ_aθ_a′)⁹(θ_bθ_b′)⁵θ_cθ_c′`, one entry per monomial.
pub const S15_TABLE: [(i8, &str, &str, &str); 30] = [
    (1, "07", "18", "24"),
    (-1, "25", "16", "09"),
    (1, "58", "03", "46"),
    (-1, "09", "25", "16"),
    (1, "09", "16", "25"),
    (-1, "67", "23", "89"),
    (1, "18", "24", "07"),
    (-1, "24", "18", "07"),
    (-1, "46", "03", "58"),
    (-1, "24", "07", "18"),
    (-1, "89", "67", "23"),
    (-1, "07", "24", "18"),
    (1, "89", "23", "67"),
    (-1, "49", "13", "57"),
    (1, "16", "09", "25"),
    (-1, "03", "46", "58"),
    (1, "16", "25", "09"),
    (-1, "46", "58", "03"),
    (-1, "25", "09", "16"),
    (-1, "57", "49", "13"),
    (1, "67", "89", "23"),
    (1, "58", "46", "03"),
    (1, "57", "13", "49"),
    (-1, "23", "89", "67"),
    (1, "18", "07", "24"),
    (1, "03", "58", "46"),
    (1, "23", "67", "89"),
    (1, "49", "57", "13"),
    (-1, "13", "57", "49"),
    (1, "13", "49", "57"),
];

fn prod(t: &[ComplexValue; 10], idx: &str) -> ComplexValue {
    let mut acc = ComplexValue::one(t[0].prec());
    for c in idx.bytes() {
        acc *= &t[(c - b'0') as usize];
    }
    acc
}

/// Müller's forms from the ten theta constants.
pub fn mueller_from_thetas(t: &[ComplexValue; 10]) -> MuellerForms {
    let g2 = prod(t, "0145") - prod(t, "1279") - prod(t, "3478") + prod(t, "0268") + prod(t, "3569");
    let s6 = ["012478", "012569", "034568", "236789", "134579"]
        .iter()
        .fold(ComplexValue::zero(t[0].prec()), |a, i| a + prod(t, i).square())
        .scale(&Rational::from((1, 256)));
    let s5 = prod(t, "0123456789").scale(&Rational::from((1, 64)));
    let s10 = s5.square();
    let mut s15 = ComplexValue::zero(t[0].prec());
    for (sg, a, b, c) in S15_TABLE {
        let m = prod(t, a).powu(9) * prod(t, b).powu(5) * prod(t, c);
        if sg > 0 {
            s15 += m;
        } else {
            s15 -= m;
        }
    }
    let s15 = s15.scale(&Rational::from((-1, 1i64 << 18)));
    MuellerForms { g2, s5, s6, s10, s15 }
}

/// Müller's forms at working precision plus guard bits.
pub fn mueller_forms_guarded(p: &UHPPair, policy: &PrecisionPolicy) -> MuellerForms {
    mueller_from_thetas(&theta_all_at(p, policy.bits() + GUARD_BITS))
}

pub fn mueller_forms(p: &UHPPair, policy: &PrecisionPolicy) -> MuellerForms {
    mueller_forms_guarded(p, policy).with_prec(policy.bits())
}

/// The seven monomials subtracted from `s₁₅²` in Müller's relation.
pub fn mueller_relation_terms(f: &MuellerForms) -> [ComplexValue; 7] {
    let (g2, s6, s10) = (&f.g2, &f.s6, &f.s10);
    let q = |n: i64, d: i64| Rational::from((n, d));
    [
        s10.powu(3).scale_i64(3125),
        (g2.square() * s6 * s10.square()).scale(&q(-125, 2)),
        (g2.powu(5) * s10.square()).scale(&q(1, 16)),
        (g2 * s6.powu(3) * s10).scale(&q(225, 2)),
        (g2.powu(4) * s6.square() * s10).scale(&q(-1, 8)),
        s6.powu(5).scale_i64(-54),
        (g2.powu(3) * s6.powu(4)).scale(&q(1, 16)),
    ]
}

/// `|s₁₅² − Σ terms|` relative to the largest monomial.
pub fn mueller_relation_residual_of(f: &MuellerForms) -> f64 {
    let lhs = f.s15.square();
    let terms = mueller_relation_terms(f);
    let scale = terms.iter().map(|t| t.abs_f64()).fold(lhs.abs_f64(), f64::max);
    let m = terms.iter().fold(lhs, |a, t| a - t);
    if scale == 0.0 {
        0.0
    } else {
        m.abs_f64() / scale
    }
}

pub fn verify_mueller_relation(p: &UHPPair, policy: &PrecisionPolicy) -> f64 {
    mueller_relation_residual_of(&mueller_forms_guarded(p, policy))
}

/// Relative residuals of the transformation laws at one point.
#[derive(Clone, Debug)]
pub struct ModularityReport {
    pub translate_1: f64,
    pub translate_eps: f64,
    pub inversion_g2: f64,
    pub inversion_s6: f64,
    pub inversion_s5: f64,
    pub s5_antisymmetry: f64,
    pub swap_g2: f64,
    pub swap_s6: f64,
}

impl ModularityReport {
    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("translate_1", self.translate_1),
            ("translate_eps", self.translate_eps),
            ("inversion_g2", self.inversion_g2),
            ("inversion_s6", self.inversion_s6),
            ("inversion_s5", self.inversion_s5),
            ("s5_antisymmetry", self.s5_antisymmetry),
            ("swap_g2", self.swap_g2),
            ("swap_s6", self.swap_s6),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

pub fn verify_modularity(p: &UHPPair, policy: &PrecisionPolicy) -> ModularityReport {
    let f = mueller_forms_guarded(p, policy);
    let at = |g: Generator| mueller_forms_guarded(&p.act(g), policy);
    let t1 = at(Generator::G1);
    let te = at(Generator::G2);
    let inv = at(Generator::G3);
    let sw = at(Generator::Tau);
    let both = |a: &ComplexValue, b: &ComplexValue, c: &ComplexValue, d: &ComplexValue| a.rel_diff(b).max(c.rel_diff(d));
    let prec = f.prec();
    let w = p.z1.with_prec(prec) * p.z2.with_prec(prec);
    ModularityReport {
        translate_1: both(&t1.g2, &f.g2, &t1.s6, &f.s6),
        translate_eps: both(&te.g2, &f.g2, &te.s6, &f.s6),
        inversion_g2: inv.g2.rel_diff(&(&f.g2 * w.powu(2))),
        inversion_s6: inv.s6.rel_diff(&(&f.s6 * w.powu(6))),
        inversion_s5: inv.s5.rel_diff(&(&f.s5 * w.powu(5))),
        s5_antisymmetry: sw.s5.rel_diff(&-&f.s5),
        swap_g2: sw.g2.rel_diff(&f.g2),
        swap_s6: sw.s6.rel_diff(&f.s6),
    }
}
