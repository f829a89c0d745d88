use hilbk3::forms::ModuliPoint;
use hilbk3::hypergeometric::{build_restricted_operators, restricted_operator, rescale_variable};
use hilbk3::pde::{
    build_pde, developing_map_match, eliminate_to_restricted_ode, find_preimage, fit_quadric, pde_ring,
    pivot_polynomial, quadric_image_test, sample_points, singular_distance, singular_factor, taylor_solution,
    JetBasisSolution, PDESystem, TaylorSolution, FIT_NULL_TOL, base_change_residual, transport_matrix,
};
use hilbk3::lattice::form_a;
use hilbk3::Error;
use nalgebra::{Matrix4, SymmetricEigen};
use hilbk3_exact::{vars, RationalFunction, SparsePoly};
use hilbk3_numkernel::rug::Rational;
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn base() -> (Rational, Rational) {
    (q(1, 10), q(1, 10))
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::new(128).unwrap()
}

/// Both equations applied to a Taylor polynomial through rational-function
/// arithmetic in global coordinates. Returns the numerators moved back to
/// local coordinates; the denominators do not vanish at the base.
fn residual_numerators(pde: &PDESystem, s: &TaylorSolution) -> [SparsePoly; 2] {
    let ring = pde_ring();
    let (x0, y0) = &s.base;
    let back_x = SparsePoly::parse(&ring, &format!("X - {x0}")).unwrap();
    let back_y = SparsePoly::parse(&ring, &format!("Y - {y0}")).unwrap();
    let u = s.local_poly().substitute(0, &back_x).substitute(1, &back_y);
    let u = RationalFunction::from_poly(u);
    let d = |a: usize, b: usize| {
        let mut v = u.clone();
        for _ in 0..a {
            v = v.derivative(0);
        }
        for _ in 0..b {
            v = v.derivative(1);
        }
        v
    };
    let r1 = d(2, 0)
        .sub(&pde.l1.mul(&d(1, 1)))
        .sub(&pde.a1.mul(&d(1, 0)))
        .sub(&pde.b1.mul(&d(0, 1)))
        .sub(&pde.p1.mul(&u));
    let r2 = d(0, 2)
        .sub(&pde.m1.mul(&d(1, 1)))
        .sub(&pde.c1.mul(&d(1, 0)))
        .sub(&pde.d1.mul(&d(0, 1)))
        .sub(&pde.q1.mul(&u));
    let fwd_x = SparsePoly::parse(&ring, &format!("X + {x0}")).unwrap();
    let fwd_y = SparsePoly::parse(&ring, &format!("Y + {y0}")).unwrap();
    [r1, r2].map(|r| {
        assert_ne!(r.den().eval(&[x0.clone(), y0.clone()]), 0);
        r.num().substitute(0, &fwd_x).substitute(1, &fwd_y)
    })
}

fn min_degree(p: &SparsePoly) -> Option<u32> {
    p.terms().map(|(m, _)| m.degree()).min()
}

#[test]
fn coefficients_share_the_factor_k() {
    let pde = build_pde();
    let k = singular_factor();
    for (name, c) in pde.coefficients() {
        assert!(c.den().div_exact(&k).is_some(), "{name}");
    }
    let ring = pde_ring();
    let l1 = RationalFunction::new(
        SparsePoly::parse(&ring, "-20*(4*X^2 + 3*X*Y - 4*Y)").unwrap(),
        k.clone(),
    )
    .unwrap();
    assert_eq!(pde.l1, l1);
    assert_eq!(pde.q1.den(), &SparsePoly::parse(&ring, "X*Y*(36*X^2 - 32*X - Y)").unwrap().monic());
}

#[test]
fn pivot_is_proportional_to_k2() {
    let pde = build_pde();
    let ring = pde_ring();
    let det = RationalFunction::one(&ring).sub(&pde.l1.mul(&pde.m1));
    let k = singular_factor();
    let want = RationalFunction::new(
        pivot_polynomial().neg(),
        SparsePoly::parse(&ring, "Y").unwrap().mul(&k).mul(&k),
    )
    .unwrap();
    assert_eq!(det, want);
    // The same polynomial as (X, Y) ↦ K₂ in the forms module.
    let x = vars(&["X", "Y"]);
    let alt = SparsePoly::parse(&x, "1728*X^5 - 720*X^3*Y + 80*X*Y^2 - 64*(5*X^2 - Y)^2 - Y^3").unwrap();
    assert_eq!(pivot_polynomial(), alt);
}

#[test]
fn elimination_gives_the_restricted_equation() {
    let e = eliminate_to_restricted_ode(&build_pde()).unwrap();
    assert!(e.no_zeroth_order_term);
    assert_eq!(e.full.len(), 5);
    assert!(e.restricted.equivalent(&restricted_operator()));
    // and through X = 25t/27 the fourth-order operator in t
    let ops = build_restricted_operators();
    let t = rescale_variable(&e.restricted, &q(25, 27), ops.w4.vars()).unwrap();
    assert!(t.equivalent(&ops.w4));
}

#[test]
fn taylor_solution_satisfies_both_equations() {
    let pde = build_pde();
    let order = 8;
    let jets = [q(1, 1), q(-2, 3), q(5, 7), q(1, 2)];
    let s = taylor_solution(&pde, &base(), &jets, order).unwrap();
    assert_eq!(s.jets(), jets);
    let unit = taylor_solution(&pde, &base(), &[q(1, 1), q(0, 1), q(0, 1), q(0, 1)], order).unwrap();
    for r in residual_numerators(&pde, &unit).iter().chain(&residual_numerators(&pde, &s)) {
        assert!(min_degree(r).map_or(true, |d| d as usize > order - 2), "{:?}", min_degree(r));
    }
}

#[test]
fn taylor_solutions_are_linear_in_jets() {
    let pde = build_pde();
    let basis = JetBasisSolution::new(&pde, &base(), 7).unwrap();
    assert_eq!(basis.jet_rank(), 4);
    let jets = [q(3, 1), q(-1, 1), q(2, 5), q(7, 1)];
    let s = taylor_solution(&pde, &base(), &jets, 7).unwrap();
    for i in 0..=7 {
        for j in 0..=(7 - i) {
            let mut want = Rational::new();
            for (k, b) in basis.solutions.iter().enumerate() {
                want += Rational::from(&jets[k] * &b.coeffs[i][j]);
            }
            assert_eq!(s.coeffs[i][j], want, "({i}, {j})");
        }
    }
}

#[test]
fn singular_bases_are_rejected() {
    let pde = build_pde();
    let jets = [q(1, 1), q(0, 1), q(0, 1), q(0, 1)];
    // the diagonal Y = 0, the curve K = 0 through (1, 4), and X = 0
    for b in [(q(1, 2), q(0, 1)), (q(1, 1), q(4, 1)), (q(0, 1), q(1, 3))] {
        assert!(matches!(taylor_solution(&pde, &b, &jets, 5), Err(Error::OutsideDomain(_))), "{b:?}");
    }
}

#[test]
fn taylor_numerics_match_the_local_polynomial() {
    let pde = build_pde();
    let s = taylor_solution(&pde, &base(), &[q(1, 1), q(1, 3), q(-1, 5), q(2, 1)], 6).unwrap();
    let prec = 128;
    let x = ComplexValue::from_f64(prec, 0.11, 0.003);
    let y = ComplexValue::from_f64(prec, 0.095, -0.002);
    // Horner evaluation against summing the shifted polynomial.
    let poly = s.local_poly();
    let dx = &x - ComplexValue::from_rational(prec, &s.base.0);
    let dy = &y - ComplexValue::from_rational(prec, &s.base.1);
    let mut want = ComplexValue::zero(prec);
    for (m, c) in poly.terms() {
        let mut t = ComplexValue::from_rational(prec, c);
        for _ in 0..m.0[0] {
            t = t * &dx;
        }
        for _ in 0..m.0[1] {
            t = t * &dy;
        }
        want += t;
    }
    assert!(s.eval(&x, &y).dist(&want) < 1e-30);
    let jets = s.jets_at(&ComplexValue::from_rational(prec, &s.base.0), &ComplexValue::from_rational(prec, &s.base.1));
    for (a, b) in jets.iter().zip(s.jets()) {
        assert!(a.dist(&ComplexValue::from_rational(prec, &b)) < 1e-30);
    }
}

#[test]
fn singular_distance_at_base() {
    let d = singular_distance(&base());
    assert!(d > 0.0 && d <= 0.1);
    for (x, y) in sample_points(&base(), d / 64.0, 20, 64) {
        let r = x.dist(&ComplexValue::from_f64(64, 0.1, 0.0)).max(y.dist(&ComplexValue::from_f64(64, 0.1, 0.0)));
        assert!(r <= d / 64.0 * (1.0 + 1e-12));
    }
}

#[test]
fn image_lies_on_a_nondegenerate_quadric() {
    let basis = JetBasisSolution::new(&build_pde(), &base(), 14).unwrap();
    let fit = quadric_image_test(&basis, 30, 10, &policy()).unwrap();
    assert_eq!(fit.rank, 4);
    assert!(fit.holdout_residual < 1e-6, "{}", fit.holdout_residual);
    // Real base point and real Taylor coefficients: the quadric is real.
    assert!(fit.imaginary_part < 1e-6, "{}", fit.imaginary_part);
    // Projectively equivalent to A over ℝ: same signature up to overall sign.
    let a = form_a();
    let eig = SymmetricEigen::new(Matrix4::from_fn(|i, j| a[i][j] as f64)).eigenvalues;
    let pos = eig.iter().filter(|&&x| x > 0.0).count();
    let neg = eig.iter().filter(|&&x| x < 0.0).count();
    assert!(fit.signature == (pos, neg) || fit.signature == (neg, pos), "{:?} vs ({pos}, {neg})", fit.signature);
    // the smaller configuration: 14 fitting samples and 6 held out
    let small = quadric_image_test(&basis, 14, 6, &policy()).unwrap();
    assert_eq!(small.rank, 4);
    assert!(small.holdout_residual < 1e-6, "{}", small.holdout_residual);
}

#[test]
fn quadric_fit_negative_control() {
    // Replacing the third solution by its square destroys the relation.
    let basis = JetBasisSolution::new(&build_pde(), &base(), 14).unwrap();
    let r = singular_distance(&basis.base) / 64.0;
    let values: Vec<Vec<ComplexValue>> = sample_points(&basis.base, r, 40, 128)
        .iter()
        .map(|(x, y)| {
            let mut v = basis.eval(x, y);
            v[2] = v[2].square();
            v
        })
        .collect();
    match fit_quadric(&values, 10, FIT_NULL_TOL) {
        Err(Error::RankDeficient { nullity }) => assert_ne!(nullity, 1),
        Ok(f) => assert!(f.holdout_residual > 1e-6, "{}", f.holdout_residual),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn developing_map_is_projectively_j() {
    let pol = policy();
    let target = ModuliPoint::new(
        ComplexValue::from_rational(pol.bits(), &q(1, 10)),
        ComplexValue::from_rational(pol.bits(), &q(1, 10)),
        pol.verify_tol(),
    );
    let z = find_preimage(&target, &pol).unwrap();
    assert!((z.z1.re_f64() - 0.5).abs() < 1e-12 && (z.z2.re_f64() - 0.5).abs() < 1e-12);
    let basis = JetBasisSolution::new(&build_pde(), &base(), 14).unwrap();
    let m = developing_map_match(&basis, &z, 16, 8, &pol).unwrap();
    assert!(m.matched.holdout_residual < 1e-5, "{}", m.matched.holdout_residual);
    // ten samples, three held out
    let m10 = developing_map_match(&basis, &z, 7, 3, &pol).unwrap();
    assert!(m10.matched.holdout_residual < 1e-5, "{}", m10.matched.holdout_residual);

    // A second base reached by continuing the branch from the first.
    let base2 = (q(11, 100), q(1, 10));
    let basis2 = JetBasisSolution::new(&build_pde(), &base2, 14).unwrap();
    let m2 = developing_map_match(&basis2, &m.base_preimage, 16, 8, &pol).unwrap();
    assert!(m2.matched.holdout_residual < 1e-5);
    let long = JetBasisSolution::new(&build_pde(), &base(), 30).unwrap();
    let t = transport_matrix(&long, &base2, pol.bits());
    let r = base_change_residual(&m.matched.g, &t, &m2.matched.g);
    assert!(r < 1e-8, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn reduction_is_consistent_at_random_bases(xn in 1i64..40, yn in 1i64..40, s in prop::bool::ANY) {
        let x = q(if s { xn } else { -xn }, 37);
        let y = q(yn, 41);
        let b = (x, y);
        prop_assume!(singular_distance(&b) > 0.0);
        let jets = [q(1, 1), q(2, 1), q(-3, 1), q(1, 7)];
        let s = taylor_solution(&build_pde(), &b, &jets, 8);
        prop_assert!(s.is_ok(), "{:?}", s.err());
        for r in residual_numerators(&build_pde(), &s.unwrap()) {
            prop_assert!(min_degree(&r).map_or(true, |d| d > 6));
        }
    }
}
