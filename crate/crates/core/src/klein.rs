//! Klein's icosahedral invariants on ℙ² and their degree-30 relation.

use hilbk3_exact::{vars, SparsePoly, Vars};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};

use crate::numeval::eval_complex;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct IcosahedralInvariants {
    pub a: SparsePoly,
    pub b: SparsePoly,
    pub c: SparsePoly,
    pub d: SparsePoly,
}

const A_SRC: &str = "z0^2 + z1*z2";
const B_SRC: &str = "8*z0^4*z1*z2 - 2*z0^2*z1^2*z2^2 + z1^3*z2^3 - z0*(z1^5 + z2^5)";
const C_SRC: &str = "320*z0^6*z1^2*z2^2 - 160*z0^4*z1^3*z2^3 + 20*z0^2*z1^4*z2^4 + 6*z1^5*z2^5 \
     - 4*z0*(z1^5 + z2^5)*(32*z0^4 - 20*z0^2*z1*z2 + 5*z1^2*z2^2) + z1^10 + z2^10";
// Stated as 12·𝔇.
const D12_SRC: &str = "(z1^5 - z2^5)*(-1024*z0^10 + 3840*z0^8*z1*z2 - 3840*z0^6*z1^2*z2^2 \
     + 1200*z0^4*z1^3*z2^3 - 100*z0^2*z1^4*z2^4 + z1^5*z2^5) \
     + z0*(z1^10 - z2^10)*(352*z0^4 - 160*z0^2*z1*z2 + 10*z1^2*z2^2) + (z1^15 - z2^15)";

pub fn zeta_ring() -> Vars {
    vars(&["z0", "z1", "z2"])
}

pub fn build_invariants() -> IcosahedralInvariants {
    let r = zeta_ring();
    let p = |s: &str| SparsePoly::parse(&r, s).expect("invariant literal");
    IcosahedralInvariants {
        a: p(A_SRC),
        b: p(B_SRC),
        c: p(C_SRC),
        d: p(D12_SRC).scale(&rug::Rational::from((1, 12))),
    }
}

/// `144D² − (−1728B⁵ + 720ACB³ − 80A²C²B + 64A³(5B² − AC)² + C³)`.
pub fn relation(a: &SparsePoly, b: &SparsePoly, c: &SparsePoly, d: &SparsePoly) -> SparsePoly {
    let k = |n: i64| rug::Rational::from(n);
    let b3 = b.pow(3);
    let inner = b.pow(2).scale(&k(5)).sub(&a.mul(c));
    let rhs = b3.mul(&b.pow(2)).scale(&k(-1728))
        .add(&a.mul(c).mul(&b3).scale(&k(720)))
        .sub(&a.pow(2).mul(&c.pow(2)).mul(b).scale(&k(80)))
        .add(&a.pow(3).mul(&inner.pow(2)).scale(&k(64)))
        .add(&c.pow(3));
    d.pow(2).scale(&k(144)).sub(&rhs)
}

#[derive(Clone, Debug)]
pub struct KleinCheck {
    pub exact_zero: bool,
    pub residual: SparsePoly,
}

pub fn verify_klein_relation() -> KleinCheck {
    let inv = build_invariants();
    let residual = relation(&inv.a, &inv.b, &inv.c, &inv.d);
    KleinCheck { exact_zero: residual.is_zero(), residual }
}

/// The affine right-hand side `144Z` in terms of `X = B/A³`, `Y = C/A⁵`.
pub fn affine_relation_rhs(x: &ComplexValue, y: &ComplexValue) -> ComplexValue {
    let x2 = x.square();
    let x3 = &x2 * x;
    let x5 = &x3 * &x2;
    let y2 = y.square();
    let inner = x2.scale_i64(5) - y;
    x5.scale_i64(-1728) + (&x3 * y).scale_i64(720) - (x * &y2).scale_i64(80) + inner.square().scale_i64(64) + &y2 * y
}

#[derive(Clone, Debug)]
pub struct AffineCoords {
    pub x: ComplexValue,
    pub y: ComplexValue,
    pub z: ComplexValue,
}

/// `(X, Y, Z) = (B/A³, C/A⁵, D²/A¹⁵)`.
pub fn affine_coords(inv: &IcosahedralInvariants, zeta: &[ComplexValue; 3], policy: &PrecisionPolicy) -> Result<AffineCoords> {
    let a = eval_complex(&inv.a, zeta);
    let scale: f64 = zeta.iter().map(|z| z.abs_f64()).fold(0.0, f64::max).powi(2);
    if a.abs_f64() <= policy.verify_tol() * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateChart(a.abs_f64()));
    }
    let b = eval_complex(&inv.b, zeta);
    let c = eval_complex(&inv.c, zeta);
    let d = eval_complex(&inv.d, zeta);
    let a3 = a.powu(3);
    let a5 = &a3 * &a.square();
    let a15 = a5.powu(3);
    Ok(AffineCoords { x: b / a3, y: c / a5, z: d.square() / a15 })
}
