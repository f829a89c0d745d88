//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are printed on success as well.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hilbk3::classical::{jacobi_theta, ThetaKind};
use hilbk3::fibrations::classify_fibers;
use hilbk3::forms::{diagonal_xj, klein_moduli_residual, moduli_xyz, ModuliPoint};
use hilbk3::hypergeometric::{
    build_restricted_operators, check_factorization, expected_restricted_scheme, restricted_operator,
    restricted_singular_points, riemann_scheme, verify_clausen_and_s, verify_symmetric_square,
};
use hilbk3::klein::verify_klein_relation;
use hilbk3::lattice::{
    corrected_g2, detect_convention, form_a, generator, is_orthogonal, j_map, printed_generator, projective_distance,
};
use hilbk3::pde::{build_pde, developing_map_match, eliminate_to_restricted_ode, find_preimage, quadric_image_test, JetBasisSolution};
use hilbk3::theta::{mueller_forms, verify_mueller_relation};
use hilbk3::{Generator, UHPPair, UHPoint};
use hilbk3_numkernel::rug::Rational;
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, with the reason.
const KNOWN_FAILURES: &[(usize, &str)] =
    &[(9, "the printed g2 matrix does not preserve A; the corrected matrix is reported separately")];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if let Some(l) = limit {
        if el > l {
            o.pass = false;
        }
        o.detail = format!("{}; {:.2}s (limit {}s)", o.detail, el.as_secs_f64(), l.as_secs());
    }
    o
}

fn seeded_points(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0))).collect()
}

fn c1() -> Outcome {
    let k = verify_klein_relation();
    outcome(k.exact_zero, format!("residual has {} terms", k.residual.num_terms()))
}

fn c2() -> Outcome {
    let ops = build_restricted_operators();
    match check_factorization(&ops) {
        Ok(r) => outcome(r.w4_is_w1_w3, format!("W4 = W1∘W3: {}", r.w4_is_w1_w3)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c3() -> Outcome {
    match eliminate_to_restricted_ode(&build_pde()) {
        Ok(e) => {
            let same = e.restricted == restricted_operator().monic();
            outcome(same && e.no_zeroth_order_term, format!("coefficients equal: {same}; a0(X,0) = 0: {}", e.no_zeroth_order_term))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c4() -> Outcome {
    match riemann_scheme(&restricted_operator(), &restricted_singular_points()) {
        Ok(s) => {
            let got: Vec<Vec<Rational>> = s.into_iter().map(|(_, e)| e).collect();
            let ok = got == expected_restricted_scheme();
            let show: Vec<String> =
                got.iter().map(|e| format!("{{{}}}", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
            outcome(ok, show.join(" "))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c5() -> Outcome {
    let sq = verify_symmetric_square(40);
    let cl = verify_clausen_and_s(40);
    match (sq, cl) {
        (Ok(sq), Ok(cl)) => outcome(
            sq.passed() && cl.clausen,
            format!("Clausen to t^40: {}; W3(t·y_i·y_j) = 0 for log degrees 0, 1, 2: {}", cl.clausen, sq.passed()),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

fn c6(policy: &PrecisionPolicy) -> Outcome {
    let b = policy.bits();
    let want = ComplexValue::from_rational(b, &Rational::from((25, 27)));
    let pts = seeded_points(6, 20);
    let mut diag: f64 = 0.0;
    for &(x, y) in &pts[..10] {
        match diagonal_xj(&UHPoint::from_f64(b, x, y).unwrap(), policy) {
            Ok(v) => diag = diag.max(v.dist(&want)),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let (mut klein, mut mueller): (f64, f64) = (0.0, 0.0);
    for k in 0..10 {
        let p = UHPPair::from_f64(b, pts[k], pts[10 + k]).unwrap();
        match moduli_xyz(&p, policy) {
            Ok(m) => klein = klein.max(klein_moduli_residual(&m)),
            Err(e) => return outcome(false, e.to_string()),
        }
        mueller = mueller.max(verify_mueller_relation(&p, policy));
    }
    outcome(
        diag < 1e-8 && klein < 1e-8 && mueller < 1e-8,
        format!("|XJ - 25/27| {diag:.1e}, 144Z relation {klein:.1e}, Müller relation {mueller:.1e}"),
    )
}

fn c7(policy: &PrecisionPolicy) -> Outcome {
    let b = policy.bits();
    let f = mueller_forms(&UHPPair::from_f64(b, (0.0, 8.0), (0.0, 8.0)).unwrap(), policy);
    let g2 = f.g2.dist(&ComplexValue::one(b));
    let u = UHPoint::from_f64(b, 0.0, 1.3).unwrap();
    let f = mueller_forms(&UHPPair::diagonal(&u), policy);
    let s10 = f.s10.abs_f64() / f.s6.abs_f64().powf(5.0 / 3.0);
    let u = UHPoint::from_f64(b, 0.0, 0.9).unwrap();
    let f = mueller_forms(&UHPPair::diagonal(&u), policy);
    let t = jacobi_theta(ThetaKind::T00, &u, policy)
        * jacobi_theta(ThetaKind::T01, &u, policy)
        * jacobi_theta(ThetaKind::T10, &u, policy);
    let s6 = f.s6.rel_diff(&t.powu(8).scale(&Rational::from((1, 128))));
    outcome(
        g2 < 1e-6 && s10 < 1e-10 && s6 < 1e-10,
        format!("|g2(8i,8i) - 1| {g2:.1e}, |s10|/|s6|^(5/3) {s10:.1e}, s6 vs theta product {s6:.1e}"),
    )
}

fn c8() -> Outcome {
    let cases = [((1, 1), "IV* + 5I1 + I5*"), ((1, 0), "III* + 3I1 + I6*"), ((0, -64), "IV* + 3I1 + I2 + I5*")];
    let mut ok = true;
    let mut notes = Vec::new();
    for ((x, y), want) in cases {
        match classify_fibers(&Rational::from(x), &Rational::from(y)) {
            Ok(c) => {
                ok &= c.summary() == want && c.euler_total == 24;
                notes.push(format!("({x},{y}) {}", c.summary()));
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    match classify_fibers(&Rational::new(), &Rational::new()) {
        Ok(c) => {
            ok &= c.euler_total < 24 && !c.is_k3();
            notes.push(format!("(0,0) euler {}", c.euler_total));
        }
        Err(e) => return outcome(false, e.to_string()),
    }
    // every K3 point of a small rational grid sums to 24
    let mut count = 0;
    for xn in -4i64..=4 {
        for yn in -6i64..=6 {
            if xn == 0 && yn == 0 {
                continue;
            }
            let c = classify_fibers(&Rational::from((xn, 2)), &Rational::from((yn * 11, 3))).unwrap();
            if c.is_k3() {
                ok &= c.euler_total == 24;
                count += 1;
            }
        }
    }
    notes.push(format!("{count} grid points total 24"));
    outcome(ok, notes.join("; "))
}

fn c9(policy: &PrecisionPolicy) -> Outcome {
    let a = form_a();
    let orth: Vec<(Generator, bool)> = Generator::ALL.iter().map(|&g| (g, is_orthogonal(&printed_generator(g), &a))).collect();
    let all_orth = orth.iter().all(|(_, o)| *o);
    let pts: Vec<UHPPair> = {
        let p = seeded_points(9, 10);
        (0..5).map(|k| UHPPair::from_f64(policy.bits(), p[k], p[5 + k]).unwrap()).collect()
    };
    let conv = detect_convention(&printed_generator, &pts, 1e-8);
    let s = UHPPair::from_f64(policy.bits(), (0.0, 1.0), (0.0, 1.0)).unwrap();
    let target = [(1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 0.0)].map(|(x, y)| ComplexValue::from_f64(policy.bits(), x, y));
    let anchor = projective_distance(&j_map(&s), &target);
    let bad: Vec<&str> = orth.iter().filter(|(_, o)| !o).map(|(g, _)| g.name()).collect();
    outcome(
        all_orth && conv.is_ok() && anchor < 1e-8,
        format!(
            "printed matrices preserving A: {}/4 (failing: {}); convention: {}; j(i,i) distance {anchor:.1e}",
            orth.len() - bad.len(),
            if bad.is_empty() { "none".into() } else { bad.join(",") },
            match &conv {
                Ok(r) => r.convention.name().to_string(),
                Err(e) => e.to_string(),
            }
        ),
    )
}

/// The same checks with `g̃₂` replaced by its corrected form.
fn c9_corrected(policy: &PrecisionPolicy) -> String {
    let ok = is_orthogonal(&corrected_g2(), &form_a()) && Generator::ALL.iter().all(|&g| is_orthogonal(&generator(g), &form_a()));
    let p = seeded_points(9, 10);
    let pts: Vec<UHPPair> = (0..5).map(|k| UHPPair::from_f64(policy.bits(), p[k], p[5 + k]).unwrap()).collect();
    match detect_convention(&generator, &pts, 1e-8) {
        Ok(r) => format!(
            "with corrected g2: all preserve A: {ok}; convention {}; worst residual {:.1e}",
            r.convention.name(),
            r.residuals.iter().map(|x| x.1).fold(0.0, f64::max)
        ),
        Err(e) => format!("with corrected g2: all preserve A: {ok}; {e}"),
    }
}

fn c10(policy: &PrecisionPolicy) -> Outcome {
    let b = policy.bits();
    let base = (Rational::from((1, 10)), Rational::from((1, 10)));
    let basis = match JetBasisSolution::new(&build_pde(), &base, 14) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let fit = match quadric_image_test(&basis, 30, 10, policy) {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("quadric: {e}")),
    };
    let target = ModuliPoint::new(
        ComplexValue::from_rational(b, &base.0),
        ComplexValue::from_rational(b, &base.1),
        policy.verify_tol(),
    );
    let dev = find_preimage(&target, policy).and_then(|z| developing_map_match(&basis, &z, 16, 8, policy));
    let dev = match dev {
        Ok(d) => d,
        Err(e) => return outcome(false, format!("developing map: {e}")),
    };
    let h = dev.matched.holdout_residual;
    outcome(
        fit.rank == 4 && fit.holdout_residual < 1e-6 && h < 1e-5,
        format!(
            "quadric rank {}, holdout {:.1e}, signature {:?}; projective match holdout {h:.1e}",
            fit.rank, fit.holdout_residual, fit.signature
        ),
    )
}

fn main() -> ExitCode {
    let p128 = PrecisionPolicy::new(128).unwrap();
    let p256 = p128.doubled();
    let s = Duration::from_secs;
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "Klein relation", timed(Some(s(10)), c1)),
        (2, "operator factorization", timed(Some(s(1)), c2)),
        (3, "PDE to ODE restriction", timed(Some(s(60)), c3)),
        (4, "Riemann scheme", timed(None, c4)),
        (5, "Clausen and symmetric square", timed(None, c5)),
        (6, "main theorem constants", timed(Some(s(30)), || c6(&p128))),
        (7, "boundary values", timed(None, || c7(&p128))),
        (8, "fiber classification", timed(None, c8)),
        (9, "monodromy constants", timed(None, || c9(&p128))),
        (10, "developing map", timed(Some(s(300)), || c10(&p128))),
    ];
    // Doubling the mantissa must leave every numeric verdict unchanged and
    // keep the attainable ones passing.
    let numeric: [(usize, Outcome); 4] =
        [(6, c6(&p256)), (7, c7(&p256)), (9, c9(&p256)), (10, c10(&p256))];
    let mut same = true;
    let mut notes = Vec::new();
    for (k, o) in &numeric {
        let at128 = results.iter().find(|r| r.0 == *k).unwrap().2.pass;
        let known = KNOWN_FAILURES.iter().any(|f| f.0 == *k);
        same &= o.pass == at128 && (o.pass || known);
        notes.push(format!("{k}: {}", if o.pass { "pass" } else { "fail" }));
    }
    results.push((11, "precision consistency at 256 bits", outcome(same, notes.join(", "))));

    let mut unexpected = 0;
    for (k, name, o) in &results {
        let known = KNOWN_FAILURES.iter().find(|f| f.0 == *k);
        println!("criterion {k:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if *k == 9 {
            println!("             {}", c9_corrected(&p128));
        }
        match (o.pass, known) {
            (false, Some((_, why))) => println!("             known failure: {why}"),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    println!("{}/{} criteria pass", results.iter().filter(|r| r.2.pass).count(), results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
