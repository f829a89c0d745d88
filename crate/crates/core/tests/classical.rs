use hilbk3::classical::{
    divisor_sigma, eisenstein_and_j, j_function, j_qexpansion, jacobi_theta, theta_delta_identity, ThetaKind,
};
use hilbk3::UHPoint;
use hilbk3_numkernel::rug::{Float, Rational};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use proptest::prelude::*;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(160).unwrap()
}

fn pt(re: f64, im: f64) -> UHPoint {
    UHPoint::from_f64(policy().bits(), re, im).unwrap()
}

#[test]
fn theta_at_i_matches_agm() {
    let p = policy();
    let t00 = jacobi_theta(ThetaKind::T00, &pt(0.0, 1.0), &p);
    let prec = p.bits();
    let s = Float::with_val(prec, 0.5f64).sqrt();
    let agm = Float::with_val(prec, Float::with_val(prec, 1).agm_ref(&s));
    let want = ComplexValue::from_real(agm.recip());
    assert!(t00.square().rel_diff(&want) < 1e-40);
    let t01 = jacobi_theta(ThetaKind::T01, &pt(0.0, 1.0), &p);
    let t10 = jacobi_theta(ThetaKind::T10, &pt(0.0, 1.0), &p);
    assert!(t01.rel_diff(&t10) < 1e-40);
}

#[test]
fn jacobi_quartic() {
    let p = policy();
    for (x, y) in [(0.3, 0.8), (-0.45, 0.2), (0.1, 2.5)] {
        let z = pt(x, y);
        let a = jacobi_theta(ThetaKind::T00, &z, &p).powu(4);
        let b = jacobi_theta(ThetaKind::T01, &z, &p).powu(4) + jacobi_theta(ThetaKind::T10, &z, &p).powu(4);
        assert!(a.rel_diff(&b) < 1e-38, "({x},{y}): {}", a.rel_diff(&b));
    }
}

#[test]
fn special_values_of_j() {
    let p = policy();
    let one = ComplexValue::one(p.bits());
    assert!(j_function(&pt(0.0, 1.0), &p).unwrap().dist(&one) < 1e-40);
    let rho = pt(-0.5, 3f64.sqrt() / 2.0);
    // f64 input point carries ~1e-16 error, and J has a triple zero at ρ.
    assert!(j_function(&rho, &p).unwrap().abs_f64() < 1e-30);
    let want = ComplexValue::from_rational(p.bits(), &Rational::from((1331, 8)));
    assert!(j_function(&pt(0.0, 2.0), &p).unwrap().dist(&want) < 1e-35);
}

/// `g₂ = 60Σ'ω⁻⁴`, `g₃ = 140Σ'ω⁻⁶` summed over a square box in f64.
fn lattice_j(x: f64, y: f64, n: i64) -> (f64, f64) {
    let (mut g4r, mut g4i, mut g6r, mut g6i) = (0.0, 0.0, 0.0, 0.0);
    for a in -n..=n {
        for b in -n..=n {
            if a == 0 && b == 0 {
                continue;
            }
            let (wr, wi) = (a as f64 + b as f64 * x, b as f64 * y);
            let m = wr * wr + wi * wi;
            let (ir, ii) = (wr / m, -wi / m);
            let (i2r, i2i) = (ir * ir - ii * ii, 2.0 * ir * ii);
            let (i4r, i4i) = (i2r * i2r - i2i * i2i, 2.0 * i2r * i2i);
            g4r += i4r;
            g4i += i4i;
            g6r += i4r * i2r - i4i * i2i;
            g6i += i4r * i2i + i4i * i2r;
        }
    }
    let c = |r: f64, i: f64| (r, i);
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let g2 = c(60.0 * g4r, 60.0 * g4i);
    let g3 = c(140.0 * g6r, 140.0 * g6i);
    let g23 = mul(mul(g2, g2), g2);
    let g32 = mul(g3, g3);
    let den = (g23.0 - 27.0 * g32.0, g23.1 - 27.0 * g32.1);
    let dm = den.0 * den.0 + den.1 * den.1;
    ((g23.0 * den.0 + g23.1 * den.1) / dm, (g23.1 * den.0 - g23.0 * den.1) / dm)
}

#[test]
fn j_agrees_with_lattice_sums() {
    let p = policy();
    for (x, y) in [(0.0, 2.0), (0.21, 1.3), (-0.4, 0.95)] {
        let j = j_function(&pt(x, y), &p).unwrap();
        let (lr, li) = lattice_j(x, y, 300);
        let d = ((j.re_f64() - lr).powi(2) + (j.im_f64() - li).powi(2)).sqrt();
        // The box tail is O(N⁻²).
        assert!(d / j.abs_f64().max(1.0) < 1e-3, "({x},{y}): {d}");
    }
}

#[test]
fn theta_product_is_discriminant() {
    let p = policy();
    for (x, y) in [(0.0, 1.0), (0.37, 0.6), (-0.2, 1.9)] {
        let r = theta_delta_identity(&pt(x, y), &p).unwrap();
        assert!(r < p.verify_tol(), "({x},{y}): {r}");
    }
}

#[test]
fn eisenstein_lambert_form() {
    // E₄ = 1 + 240Σ n³qⁿ/(1−qⁿ), summed independently of the divisor sums.
    let p = policy();
    let z = pt(0.13, 0.7);
    let prec = p.bits() + 32;
    let q = ComplexValue::exp_i_pi_complex(&z.z().with_prec(prec).scale_i64(2));
    let one = ComplexValue::one(prec);
    let mut e4 = one.clone();
    let mut e6 = one.clone();
    let mut qn = one.clone();
    for n in 1..400i64 {
        qn *= &q;
        let l = &qn / (&one - &qn);
        e4 += l.scale_i64(240 * n.pow(3));
        e6 -= l.scale_i64(504 * n.pow(5));
    }
    let e = eisenstein_and_j(&z, &p).unwrap();
    assert!(e.e4.rel_diff(&e4) < 1e-40);
    assert!(e.e6.rel_diff(&e6) < 1e-40);
}

#[test]
fn j_qexpansion_coefficients() {
    let e = j_qexpansion(5);
    let c = |k: i64| e.coeff(k).unwrap().clone();
    assert_eq!(e.leading_exponent, -1);
    assert_eq!(c(-1), 1);
    assert_eq!(c(0), 744);
    assert_eq!(c(1), 196884);
    assert_eq!(c(2), 21493760);
    assert_eq!(c(3), 864299970);
    // Truncation never changes known coefficients.
    let longer = j_qexpansion(12);
    assert_eq!(&longer.coeffs[..5], &e.coeffs[..]);
}

#[test]
fn truncated_qexpansion_evaluates_j() {
    let p = policy();
    let z = pt(0.1, 2.0);
    let e = j_qexpansion(60).eval(&z);
    let j = j_function(&z, &p).unwrap().scale_i64(1728);
    assert!(e.rel_diff(&j) < 1e-40);
}

#[test]
fn sigma_small_values() {
    assert_eq!(divisor_sigma(1, 3), 1);
    assert_eq!(divisor_sigma(6, 3), 1 + 8 + 27 + 216);
    assert_eq!(divisor_sigma(9, 5), 1 + 243 + 59049);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn j_is_modular(x in -0.5f64..0.5, y in 0.9f64..2.5) {
        let p = policy();
        let z = pt(x, y);
        let j = j_function(&z, &p).unwrap();
        let t = UHPoint::new(z.z() + ComplexValue::one(p.bits())).unwrap();
        let s = UHPoint::new(-z.z().recip()).unwrap();
        prop_assert!(j_function(&t, &p).unwrap().rel_diff(&j) < 1e-35);
        prop_assert!(j_function(&s, &p).unwrap().rel_diff(&j) < 1e-35);
    }

    #[test]
    fn theta_weight_half(x in -0.5f64..0.5, y in 0.9f64..2.5) {
        // θ₀₀(−1/z)² = −iz·θ₀₀(z)²
        let p = policy();
        let z = pt(x, y);
        let s = UHPoint::new(-z.z().recip()).unwrap();
        let lhs = jacobi_theta(ThetaKind::T00, &s, &p).square();
        let rhs = -(z.z().mul_i()) * jacobi_theta(ThetaKind::T00, &z, &p).square();
        prop_assert!(lhs.rel_diff(&rhs) < 1e-38);
    }
}
