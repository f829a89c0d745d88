use hilbk3_exact::{vars, DiffOperator, ExactError, Point, RationalFunction, SparsePoly, Vars};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

fn t() -> Vars {
    vars(&["t"])
}

fn op(coeffs: &[&str]) -> DiffOperator {
    DiffOperator::parse(&t(), coeffs).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn w3() -> DiffOperator {
    op(&["(72-5*t)/(72*t^3*(t-1))", "(5*t-36)/(36*t^2*(t-1))", "3/(2*(t-1))", "1"])
}

fn w1() -> DiffOperator {
    op(&["(15*t^2-298*t+216)/(t*(t-1)*(5*t-72))", "1"])
}

fn w4() -> DiffOperator {
    op(&[
        "0",
        "(25*t-720)/(72*t^2*(t-1)*(5*t-72))",
        "(565*t^2-12204*t+2592)/(36*t^2*(t-1)*(5*t-72))",
        "(1620*t^3-29232*t^2+15552*t)/(72*t^2*(t-1)*(5*t-72))",
        "1",
    ])
}

fn restricted() -> DiffOperator {
    DiffOperator::parse(
        &vars(&["X"]),
        &[
            "0",
            "15*(3*X-80)/(8*X^2*(81*X^2-1155*X+1000))",
            "(2034*X^2-40680*X+8000)/(8*X^2*(81*X^2-1155*X+1000))",
            "3*(243*X^2-4060*X+2000)/(2*X*(81*X^2-1155*X+1000))",
            "1",
        ],
    )
    .unwrap()
}

fn gauss() -> DiffOperator {
    op(&["-5/144", "1-3/2*t", "t*(1-t)"])
}

fn exps(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

#[test]
fn d_composed_with_d() {
    let d = DiffOperator::d(&t());
    assert_eq!(d.compose(&d), op(&["0", "0", "1"]));
}

#[test]
fn telescoping_product() {
    let a = op(&["1", "1"]);
    let b = op(&["-1", "1"]);
    assert_eq!(a.compose(&b), op(&["-1", "0", "1"]));
}

#[test]
fn multiplication_does_not_commute_with_d() {
    // D∘t = t·D + 1
    let d = DiffOperator::d(&t());
    let mt = op(&["t"]);
    assert_eq!(d.compose(&mt), op(&["1", "t"]));
}

#[test]
fn w1_after_w3_is_w4() {
    let c = w1().compose(&w3());
    assert_eq!(c, w4());
    assert_eq!(c.clear_denominators(), w4().clear_denominators());
}

#[test]
fn restricted_equation_rescales_to_w4() {
    let x = vars(&["X"]);
    // X = 25t/27, d/dX = (27/25) d/dt
    let sub = RationalFunction::parse(&x, "25/27*X").unwrap();
    let k = q(27, 25);
    let coeffs: Vec<RationalFunction> = restricted()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut f = c.substitute(0, &sub).unwrap();
            for _ in i..4 {
                f = f.scale(&Rational::from(k.recip_ref()));
            }
            f.to_ring(&x).unwrap()
        })
        .collect();
    let renamed: Vec<RationalFunction> = w4()
        .coeffs()
        .iter()
        .map(|c| RationalFunction::parse(&x, &c.to_string().replace('t', "X")).unwrap())
        .collect();
    assert_eq!(coeffs, renamed);
}

#[test]
fn euler_operator_exponents() {
    assert_eq!(op(&["0", "0", "1"]).indicial_exponents(&Point::Finite(q(0, 1))).unwrap(), exps(&[(0, 1), (1, 1)]));
}

#[test]
fn gauss_riemann_scheme() {
    let g = gauss();
    assert_eq!(g.indicial_exponents(&Point::Finite(q(0, 1))).unwrap(), exps(&[(0, 1), (0, 1)]));
    assert_eq!(g.indicial_exponents(&Point::Finite(q(1, 1))).unwrap(), exps(&[(0, 1), (1, 2)]));
    assert_eq!(g.indicial_exponents(&Point::Infinity).unwrap(), exps(&[(1, 12), (5, 12)]));
}

#[test]
fn restricted_equation_riemann_scheme() {
    let r = restricted();
    let at = |p: Point| r.indicial_exponents(&p).unwrap();
    assert_eq!(at(Point::Finite(q(0, 1))), exps(&[(0, 1), (1, 1), (1, 1), (1, 1)]));
    assert_eq!(at(Point::Finite(q(25, 27))), exps(&[(0, 1), (1, 2), (1, 1), (2, 1)]));
    assert_eq!(at(Point::Finite(q(40, 3))), exps(&[(0, 1), (1, 1), (2, 1), (4, 1)]));
    assert_eq!(at(Point::Infinity), exps(&[(-5, 6), (-1, 2), (-1, 6), (0, 1)]));
}

#[test]
fn w3_exponents_at_zero() {
    assert_eq!(w3().indicial_exponents(&Point::Finite(q(0, 1))).unwrap(), exps(&[(1, 1), (1, 1), (1, 1)]));
}

#[test]
fn irregular_point_is_reported() {
    let e = op(&["1", "t^2"]).indicial_exponents(&Point::Finite(q(0, 1)));
    assert!(matches!(e, Err(ExactError::IrregularSingular { .. })));
}

#[test]
fn irrational_exponents_are_reported() {
    let e = op(&["2", "t", "t^2"]).indicial_exponents(&Point::Finite(q(0, 1)));
    assert!(matches!(e, Err(ExactError::NonRationalRoot { .. })));
}

#[test]
fn ordinary_point_has_consecutive_exponents() {
    assert_eq!(w4().indicial_exponents(&Point::Finite(q(1, 2))).unwrap(), exps(&[(0, 1), (1, 1), (2, 1), (3, 1)]));
}

#[test]
fn zero_operator_rejected() {
    assert_eq!(DiffOperator::parse(&t(), &["0", "0"]).unwrap_err(), ExactError::ZeroOperator);
}

fn random_poly(rng: &mut ChaCha8Rng, deg: u32) -> SparsePoly {
    let c: Vec<Rational> = (0..=deg).map(|_| q(rng.gen_range(-5..6), rng.gen_range(1..4))).collect();
    SparsePoly::from_coeffs(&t(), 0, &c)
}

fn random_operator(rng: &mut ChaCha8Rng) -> DiffOperator {
    let order = rng.gen_range(0..=3);
    let mut coeffs = Vec::new();
    for i in 0..=order {
        let deg = rng.gen_range(0..3);
        let num = random_poly(rng, deg);
        let den = if rng.gen_bool(0.5) { random_poly(rng, 1) } else { SparsePoly::one(&t()) };
        let mut f = RationalFunction::new(num, den).unwrap_or_else(|_| RationalFunction::one(&t()));
        if i == order && f.is_zero() {
            f = RationalFunction::one(&t());
        }
        coeffs.push(f);
    }
    DiffOperator::new(coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn composition_matches_nested_application(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_operator(&mut rng);
        let r = random_operator(&mut rng);
        let c = p.compose(&r);
        prop_assert_eq!(c.order(), p.order() + r.order());
        for _ in 0..5 {
            let d = rng.gen_range(0..6);
            let u = RationalFunction::from_poly(random_poly(&mut rng, d));
            prop_assert_eq!(c.apply(&u), p.apply(&r.apply(&u)));
        }
    }
}
