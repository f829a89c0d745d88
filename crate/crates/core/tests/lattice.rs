use hilbk3::lattice::*;
use hilbk3::{Generator, UHPPair};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cofactor_det(a: &IntMatrix) -> i64 {
    if a.len() == 1 {
        return a[0][0];
    }
    (0..a.len())
        .map(|j| {
            let minor: IntMatrix = a[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * a[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn samples(seed: u64, n: usize, prec: u32) -> Vec<UHPPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            UHPPair::from_f64(
                prec,
                (rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0)),
                (rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0)),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn gram_matrix_determinants() {
    assert_eq!(det(&form_a()), 5);
    assert_eq!(cofactor_det(&form_a()), 5);
    assert_eq!(det(&form_ax()), -2);
    assert_eq!(form_a(), transpose(&form_a()));
}

#[test]
fn three_generators_orthogonal_as_printed() {
    let a = form_a();
    for g in [Generator::G1, Generator::G3, Generator::Tau] {
        assert!(is_orthogonal(&printed_generator(g), &a), "{g}");
    }
}

#[test]
fn printed_g2_is_not_orthogonal() {
    let a = form_a();
    assert!(!is_orthogonal(&printed_generator(Generator::G2), &a));
    assert!(is_orthogonal(&corrected_g2(), &a));
    assert_eq!(det(&corrected_g2()).abs(), 1);
}

#[test]
fn tau_is_an_involution() {
    let t = printed_generator(Generator::Tau);
    assert_eq!(mat_mul(&t, &t), identity(4));
}

#[test]
fn diagonal_generators_preserve_ax() {
    for g in mx_generators() {
        assert!(is_orthogonal(&g, &form_ax()));
    }
}

#[test]
fn j_lands_on_quadric_in_positive_cone() {
    let p = PrecisionPolicy::default();
    for s in samples(3, 5, p.bits()) {
        let xi = j_map(&s);
        assert!(quadric_value(&xi).abs_f64() < p.verify_tol());
        let h = hermitian_value(&xi);
        let expected = ComplexValue::from_real(rug::Float::with_val(p.bits(), s.z1.im() * s.z2.im()) * 4u32);
        assert!(h.rel_diff(&expected) < p.verify_tol());
    }
    let s = UHPPair::from_f64(p.bits(), (0.0, 1.2), (0.0, 0.7)).unwrap();
    assert!((hermitian_value(&j_map(&s)).re_f64() - 4.0 * 1.2 * 0.7).abs() < 1e-12);
}

#[test]
fn anchor_point() {
    let p = PrecisionPolicy::default();
    let s = UHPPair::from_f64(p.bits(), (0.0, 1.0), (0.0, 1.0)).unwrap();
    let xi = j_map(&s);
    let target = [(1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 0.0)].map(|(a, b)| ComplexValue::from_f64(p.bits(), a, b));
    assert!(projective_distance(&xi, &target) < p.verify_tol());
    assert!(xi[0].dist(&ComplexValue::from_i64(p.bits(), -1)) < p.verify_tol());
}

#[test]
fn one_convention_explains_all_generators() {
    let p = PrecisionPolicy::default();
    let pts = samples(5, 5, p.bits());
    let rep = detect_convention(&generator, &pts, p.verify_tol()).unwrap();
    assert_eq!(rep.convention, Convention::Direct);
    for (_, r) in rep.residuals {
        assert!(r < p.verify_tol());
    }
}

#[test]
fn printed_matrices_admit_no_convention() {
    let p = PrecisionPolicy::default();
    let pts = samples(5, 3, p.bits());
    let e = detect_convention(&printed_generator, &pts, p.verify_tol()).unwrap_err();
    assert_eq!(e, hilbk3::Error::NoConventionMatches("g2".into()));
}

#[test]
fn identity_intertwines_trivially() {
    let p = PrecisionPolicy::default();
    let pts = samples(9, 2, p.bits());
    let swapped: Vec<UHPPair> = pts.iter().map(|s| s.swap()).collect();
    // τ twice is the identity.
    let tt = mat_mul(&printed_generator(Generator::Tau), &printed_generator(Generator::Tau));
    assert_eq!(intertwining_residual(Generator::Tau, &tt, Convention::Direct, &swapped), intertwining_residual(Generator::Tau, &identity(4), Convention::Direct, &swapped));
    for s in &pts {
        assert_eq!(projective_distance(&j_map(s), &j_map(s)), 0.0);
    }
}
