use hilbk3::forms::{
    apply_matrix, diagonal_xj, k2_poly, k3, klein_moduli_residual, match_projective_maps, modular_invariance,
    moduli_xyz, newton_invert, ModuliPoint, NewtonOptions,
};
use hilbk3::{Error, Generator, UHPPair, UHPoint};
use hilbk3_numkernel::rug::ops::Pow;
use hilbk3_numkernel::rug::{Integer, Rational};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(128).unwrap()
}

fn pair(z1: (f64, f64), z2: (f64, f64)) -> UHPPair {
    UHPPair::from_f64(policy().bits(), z1, z2).unwrap()
}

#[test]
fn constants_are_exact() {
    let want = Rational::from((Integer::from(2).pow(26) * Integer::from(5).pow(10), Integer::from(9)));
    assert_eq!(k3(), want);
}

#[test]
fn diagonal_y_vanishes_and_xj() {
    let pol = policy();
    let u = UHPoint::from_f64(pol.bits(), 0.0, 1.3).unwrap();
    let m = moduli_xyz(&UHPPair::diagonal(&u), &pol).unwrap();
    assert!(m.y.abs_f64() < pol.verify_tol() * m.x.abs_f64().max(1.0));
    let want = ComplexValue::from_rational(pol.bits(), &Rational::from((25, 27)));
    for (x, y) in [(0.0, 1.3), (0.31, 0.95), (-0.44, 1.7), (0.12, 0.6)] {
        let u = UHPoint::from_f64(pol.bits(), x, y).unwrap();
        let r = diagonal_xj(&u, &pol).unwrap();
        assert!(r.dist(&want) < pol.verify_tol(), "({x},{y}): {}", r.dist(&want));
    }
}

#[test]
fn klein_relation_on_moduli() {
    let pol = policy();
    for (a, b) in [((0.0, 1.1), (0.0, 0.8)), ((0.3, 1.0), (-0.25, 1.2))] {
        let m = moduli_xyz(&pair(a, b), &pol).unwrap();
        assert!(klein_moduli_residual(&m) < pol.verify_tol());
    }
}

#[test]
fn invariance_at_fixed_points() {
    let pol = policy();
    let cases = [
        (Generator::Tau, (0.0, 1.1), (0.0, 1.6)),
        (Generator::G3, (0.0, 0.9), (0.0, 1.2)),
        (Generator::G2, (0.1, 1.0), (0.2, 1.1)),
        (Generator::G1, (0.1, 1.0), (0.2, 1.1)),
    ];
    for (g, a, b) in cases {
        let r = modular_invariance(&pair(a, b), g, &pol).unwrap();
        assert!(r < pol.verify_tol(), "{g}: {r}");
    }
}

#[test]
fn frak_x_membership() {
    let p = 128;
    let c = |x: i64, y: i64| (ComplexValue::from_i64(p, x), ComplexValue::from_i64(p, y));
    let (x, y) = c(0, -64);
    assert!(k2_poly(&x, &y).abs_f64() == 0.0);
    assert!(!ModuliPoint::new(x, y, 1e-20).in_frak_x);
    let (x, y) = c(1, 0);
    assert!(!ModuliPoint::new(x, y, 1e-20).in_frak_x);
    let (x, y) = c(1, 1);
    assert!(ModuliPoint::new(x, y, 1e-20).in_frak_x);
}

#[test]
fn newton_round_trip() {
    let pol = policy();
    let z = pair((0.0, 1.2), (0.0, 0.9));
    let m = moduli_xyz(&z, &pol).unwrap();
    let target = ModuliPoint::new(m.x.clone(), m.y.clone(), pol.verify_tol());
    let guess = pair((0.01, 1.19), (-0.008, 0.91));
    let r = newton_invert(&target, &guess, &pol, &NewtonOptions::default()).unwrap();
    assert!(r.residual < pol.verify_tol());
    let back = moduli_xyz(&r.z, &pol).unwrap();
    assert!(back.x.dist(&m.x) < 1e-15 && back.y.dist(&m.y) < 1e-15);
    let d = r.z.z1.dist(&z.z1).max(r.z.z2.dist(&z.z2));
    let ds = r.z.z1.dist(&z.z2).max(r.z.z2.dist(&z.z1));
    assert!(d.min(ds) < 1e-8);
}

#[test]
fn newton_diagonal_stays_diagonal() {
    let pol = policy();
    let u = UHPoint::from_f64(pol.bits(), 0.05, 1.1).unwrap();
    let m = moduli_xyz(&UHPPair::diagonal(&u), &pol).unwrap();
    let target = ModuliPoint::new(m.x.clone(), ComplexValue::zero(pol.bits()), pol.verify_tol());
    let g = UHPoint::from_f64(pol.bits(), 0.06, 1.08).unwrap();
    let r = newton_invert(&target, &UHPPair::diagonal(&g), &pol, &NewtonOptions::default()).unwrap();
    assert!(r.z.z1.dist(&r.z.z2) < 1e-8);
    assert!(r.z.z1.dist(u.z()) < 1e-8);
}

#[test]
fn newton_off_diagonal_target_from_diagonal_guess() {
    let pol = policy();
    let m = moduli_xyz(&pair((0.0, 1.2), (0.0, 0.9)), &pol).unwrap();
    let target = ModuliPoint::new(m.x.clone(), m.y.clone(), pol.verify_tol());
    let g = UHPoint::from_f64(pol.bits(), 0.0, 1.05).unwrap();
    match newton_invert(&target, &UHPPair::diagonal(&g), &pol, &NewtonOptions::default()) {
        Err(Error::JacobianSingular) | Err(Error::NoConvergence { .. }) => {}
        Ok(r) => {
            let back = moduli_xyz(&r.z, &pol).unwrap();
            assert!(back.x.dist(&m.x).max(back.y.dist(&m.y)) < 1e-15);
            assert!(r.z.z1.dist(&r.z.z2) > 1e-6);
        }
        Err(e) => panic!("unexpected error {e}"),
    }
}

fn random_vec(rng: &mut ChaCha8Rng, prec: u32) -> Vec<ComplexValue> {
    (0..4).map(|_| ComplexValue::from_f64(prec, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn projective_identity_and_random_matrix() {
    let prec = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a: Vec<_> = (0..12).map(|_| random_vec(&mut rng, prec)).collect();
    let r = match_projective_maps(&a, &a, 4, 1e-20).unwrap();
    let s = &r.g[0][0];
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { s.clone() } else { ComplexValue::zero(prec) };
            assert!(r.g[i][j].dist(&want) < 1e-30 * s.abs_f64());
        }
    }
    let m: Vec<Vec<ComplexValue>> = (0..4).map(|_| random_vec(&mut rng, prec)).collect();
    let b: Vec<_> = a.iter().map(|v| apply_matrix(&m, v).iter().map(|x| x.scale_i64(3)).collect()).collect();
    let r = match_projective_maps(&a, &b, 4, 1e-20).unwrap();
    assert!(r.holdout_residual < 1e-8);
    let ratio = &r.g[1][2] / &m[1][2];
    for i in 0..4 {
        for j in 0..4 {
            assert!(r.g[i][j].dist(&(&m[i][j] * &ratio)) < 1e-25 * ratio.abs_f64());
        }
    }
}

#[test]
fn projective_underdetermined() {
    let prec = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a: Vec<_> = (0..6).map(|_| random_vec(&mut rng, prec)).collect();
    // four fitting samples give 12 independent conditions on 16 unknowns
    assert!(matches!(match_projective_maps(&a, &a, 2, 1e-20), Err(Error::RankDeficient { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn xyz_invariant_under_generators(x1 in -0.4f64..0.4, y1 in 0.8f64..1.4, x2 in -0.4f64..0.4, y2 in 0.8f64..1.4) {
        let pol = policy();
        let p = pair((x1, y1), (x2, y2));
        for g in Generator::ALL {
            let r = modular_invariance(&p, g, &pol).unwrap();
            prop_assert!(r < pol.verify_tol(), "{}: {}", g, r);
        }
        let m = moduli_xyz(&p, &pol).unwrap();
        prop_assert!(klein_moduli_residual(&m) < pol.verify_tol());
    }

    #[test]
    fn xj_on_diagonal(x in -0.5f64..0.5, y in 0.8f64..1.8) {
        let pol = policy();
        let u = UHPoint::from_f64(pol.bits(), x, y).unwrap();
        let want = ComplexValue::from_rational(pol.bits(), &Rational::from((25, 27)));
        prop_assert!(diagonal_xj(&u, &pol).unwrap().dist(&want) < pol.verify_tol());
    }
}
