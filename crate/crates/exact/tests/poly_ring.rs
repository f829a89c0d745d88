use hilbk3_exact::{gcd, vars, RationalFunction, SparsePoly, Vars};
use proptest::prelude::*;
use rug::Rational;

fn ring() -> Vars {
    vars(&["z0", "z1", "z2"])
}

fn p(src: &str) -> SparsePoly {
    SparsePoly::parse(&ring(), src).unwrap()
}

#[test]
fn product_with_zero_vanishes() {
    assert!(p("z0^2+z1*z2").mul(&SparsePoly::zero(&ring())).is_zero());
}

#[test]
fn binomial_square() {
    let a = p("z0^2+z1*z2");
    assert_eq!(a.pow(2), p("z0^4+2*z0^2*z1*z2+z1^2*z2^2"));
    assert_eq!(a.pow(2).num_terms(), 3);
}

#[test]
fn display_round_trips() {
    let a = p("3*z0^2*z1 - 1/2 + 7/3*z2^5");
    assert_eq!(p(&a.to_string()), a);
}

#[test]
fn decimals_parse_exactly() {
    let a = p("0.25*z0");
    assert_eq!(a.coeff(&[1, 0, 0]), Rational::from((1, 4)));
}

#[test]
fn gcd_recovers_common_factor() {
    let g = p("z0*z1 - 3*z2^2 + 1");
    let a = g.mul(&p("z0^3 + z2"));
    let b = g.mul(&p("z1^2 - z0*z2 + 2"));
    assert_eq!(gcd(&a, &b).monic(), g.monic());
}

#[test]
fn gcd_of_coprime_is_constant() {
    assert!(gcd(&p("z0^2+z1"), &p("z1^3-z2")).is_constant());
}

#[test]
fn gcd_with_monomial_factors() {
    let a = p("z0^3*z1*(z2+1)");
    let b = p("z0*z1^2*(z2+1)^2");
    assert_eq!(gcd(&a, &b).monic(), p("z0*z1*(z2+1)").monic());
}

#[test]
fn rational_function_reduces() {
    let r = vars(&["X", "Y"]);
    let f = RationalFunction::parse(&r, "(X^2-Y^2)/(2*X+2*Y)").unwrap();
    assert_eq!(f, RationalFunction::parse(&r, "X/2 - Y/2").unwrap());
    assert!(f.is_polynomial());
}

#[test]
fn rational_function_sum_cancels() {
    let r = vars(&["t"]);
    let a = RationalFunction::parse(&r, "1/(t-1) - 1/(t+1)").unwrap();
    assert_eq!(a, RationalFunction::parse(&r, "2/(t^2-1)").unwrap());
}

#[test]
fn derivative_of_quotient() {
    let r = vars(&["t"]);
    let f = RationalFunction::parse(&r, "t/(1-t)").unwrap();
    assert_eq!(f.derivative(0), RationalFunction::parse(&r, "1/(1-t)^2").unwrap());
}

fn arb_poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), -6i64..7, 1u32..4), 0..6).prop_map(|terms| {
        SparsePoly::from_terms(
            &ring(),
            terms.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], Rational::from((n, d)))),
        )
    })
}

proptest! {
    #[test]
    fn multiplication_is_associative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn multiplication_distributes(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn addition_commutes_and_cancels(a in arb_poly(), b in arb_poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in arb_poly(), b in arb_poly(), x in -5i64..5, y in -5i64..5, z in 1i64..5) {
        let pt = [Rational::from(x), Rational::from(y), Rational::from((1, z))];
        prop_assert_eq!(a.mul(&b).eval(&pt), a.eval(&pt) * b.eval(&pt));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in arb_poly(), b in arb_poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a));
    }
}
