//! The named verification suites.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hilbk3::classical::j_function;
use hilbk3::fibrations::classify_fibers;
use hilbk3::forms::{diagonal_xj, klein_moduli_residual, modular_invariance, moduli_xyz, ModuliPoint};
use hilbk3::hypergeometric::{
    build_restricted_operators, check_factorization, expected_restricted_scheme, restricted_operator,
    restricted_singular_points, riemann_scheme, schwarz_map, verify_clausen_and_s, verify_symmetric_square,
};
use hilbk3::klein::verify_klein_relation;
use hilbk3::lattice::{
    corrected_g2, detect_convention, form_a, form_ax, generator, is_orthogonal, j_map, mx_generators, printed_generator,
    projective_distance,
};
use hilbk3::pde::{
    base_change_residual, build_pde, developing_map_match, eliminate_to_restricted_ode, find_preimage,
    quadric_image_test, transport_matrix, JetBasisSolution,
};
use hilbk3::theta::{verify_modularity, verify_mueller_relation};
use hilbk3::{Error, Generator, UHPPair, UHPoint};
use hilbk3_numkernel::rug::{Float, Rational};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};

use crate::report::{Recorder, Residual, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Klein,
    Mueller,
    MainTheorem,
    Transformations,
    Factorization,
    RiemannScheme,
    Clausen,
    JTheorem,
    PdeRestriction,
    Quadric,
    DevelopingMap,
    Monodromy,
    Fibers,
    All,
}

impl Suite {
    pub const EACH: [Suite; 13] = [
        Suite::Klein,
        Suite::Mueller,
        Suite::MainTheorem,
        Suite::Transformations,
        Suite::Factorization,
        Suite::RiemannScheme,
        Suite::Clausen,
        Suite::JTheorem,
        Suite::PdeRestriction,
        Suite::Quadric,
        Suite::DevelopingMap,
        Suite::Monodromy,
        Suite::Fibers,
    ];

    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

pub struct Context {
    pub policy: PrecisionPolicy,
    pub seed: u64,
    pub timings: bool,
    /// Sample points per numeric check family.
    pub samples: usize,
}

impl Context {
    /// Points of the box `Re ∈ [−1/2, 1/2]`, `Im ∈ [0.8, 2]`, from a
    /// generator seeded by the global seed and the suite.
    fn points(&self, suite: Suite, n: usize) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((suite as u64 + 1) << 32));
        (0..n).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0))).collect()
    }

    fn pairs(&self, suite: Suite) -> Vec<UHPPair> {
        let p = self.points(suite, 2 * self.samples);
        let b = self.policy.bits();
        (0..self.samples).map(|k| UHPPair::from_f64(b, p[2 * k], p[2 * k + 1]).expect("box lies in ℍ")).collect()
    }

    fn diagonal(&self, suite: Suite) -> Vec<UHPoint> {
        let b = self.policy.bits();
        self.points(suite, self.samples).into_iter().map(|(x, y)| UHPoint::from_f64(b, x, y).expect("box lies in ℍ")).collect()
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

pub fn run_suite(s: Suite, ctx: &Context) -> VerificationReport {
    let mut r = Recorder::new(ctx.timings);
    let pol = &ctx.policy;
    let tol = pol.verify_tol();
    match s {
        Suite::All => unreachable!("expanded by the caller"),
        Suite::Klein => {
            r.exact("relation_is_zero_polynomial", || Ok::<_, Error>(verify_klein_relation().exact_zero));
        }
        Suite::Mueller => {
            for (k, p) in ctx.pairs(s).iter().enumerate() {
                r.below(format!("relation@{k}"), tol, || Ok::<_, Error>(verify_mueller_relation(p, pol)));
                let rep = verify_modularity(p, pol);
                for (name, v) in rep.entries() {
                    r.below(format!("{name}@{k}"), tol, || Ok::<_, Error>(v));
                }
            }
        }
        Suite::MainTheorem => {
            let want = ComplexValue::from_rational(pol.bits(), &q(25, 27));
            for (k, z) in ctx.diagonal(s).iter().enumerate() {
                r.below(format!("diagonal_xj@{k}"), tol, || Ok::<_, Error>(diagonal_xj(z, pol)?.dist(&want)));
                r.below(format!("diagonal_y@{k}"), tol, || {
                    let m = moduli_xyz(&UHPPair::diagonal(z), pol)?;
                    Ok::<_, Error>(m.y.abs_f64() / m.x.abs_f64().max(1.0))
                });
            }
            for (k, p) in ctx.pairs(s).iter().enumerate() {
                r.below(format!("z_relation@{k}"), tol, || Ok::<_, Error>(klein_moduli_residual(&moduli_xyz(p, pol)?)));
            }
        }
        Suite::Transformations => {
            for (k, p) in ctx.pairs(s).iter().enumerate() {
                for g in Generator::ALL {
                    r.below(format!("{g}@{k}"), tol, || modular_invariance(p, g, pol));
                }
            }
        }
        Suite::Factorization => {
            let ops = build_restricted_operators();
            match check_factorization(&ops) {
                Ok(f) => {
                    r.exact("w4_equals_w1_after_w3", || Ok::<_, Error>(f.w4_is_w1_w3));
                    r.exact("restricted_equation_in_t_is_w4", || Ok::<_, Error>(f.transport_matches));
                    r.exact("restdiff3_after_d_is_w4", || Ok::<_, Error>(f.restdiff3_matches));
                }
                Err(e) => r.exact("factorization", || Err::<bool, _>(e)),
            }
        }
        Suite::RiemannScheme => match riemann_scheme(&restricted_operator(), &restricted_singular_points()) {
            Ok(got) => {
                for ((p, e), want) in got.iter().zip(expected_restricted_scheme()) {
                    r.check(format!("exponents_at_{p}"), || {
                        let shown = e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                        Ok::<_, Error>((*e == want, Residual::Exact, Some(shown)))
                    });
                }
            }
            Err(e) => r.exact("riemann_scheme", || Err::<bool, _>(e)),
        },
        Suite::Clausen => {
            r.exact("clausen_to_order_40", || Ok::<_, Error>(verify_clausen_and_s(40)?.clausen));
            r.exact("s_series_to_order_40", || Ok::<_, Error>(verify_clausen_and_s(40)?.passed()));
            r.exact("symmetric_square_to_order_40", || Ok::<_, Error>(verify_symmetric_square(40)?.passed()));
        }
        Suite::JTheorem => {
            // X(σ(t), σ(t)) = 25t/27 along the Schwarz branch σ = (1/J)⁻¹.
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ ((s as u64 + 1) << 32));
            for k in 0..ctx.samples {
                let t: f64 = rng.gen_range(0.05..0.95);
                r.below(format!("x_on_schwarz_branch@{k}"), tol, || {
                    let z = schwarz_map(&Float::with_val(pol.bits(), t), pol)?;
                    let z = UHPoint::new(z)?;
                    let tt = j_function(&z, pol)?.recip();
                    let m = moduli_xyz(&UHPPair::diagonal(&z), pol)?;
                    Ok::<_, Error>(m.x.dist(&tt.scale(&q(25, 27))))
                });
            }
        }
        Suite::PdeRestriction => match eliminate_to_restricted_ode(&build_pde()) {
            Ok(e) => {
                r.exact("equals_restricted_equation", || Ok::<_, Error>(e.restricted == restricted_operator().monic()));
                r.exact("no_zeroth_order_term", || Ok::<_, Error>(e.no_zeroth_order_term));
                r.exact("w4_under_x_equals_25t_over_27", || {
                    let ops = build_restricted_operators();
                    let t = hilbk3::hypergeometric::rescale_variable(&e.restricted, &q(25, 27), ops.w4.vars())?;
                    Ok::<_, Error>(t.equivalent(&ops.w4))
                });
            }
            Err(e) => r.exact("elimination", || Err::<bool, _>(e)),
        },
        Suite::Quadric => {
            let base = (q(1, 10), q(1, 10));
            match JetBasisSolution::new(&build_pde(), &base, 14).and_then(|b| quadric_image_test(&b, 30, 10, pol)) {
                Ok(f) => {
                    r.below("holdout_residual", 1e-6, || Ok::<_, Error>(f.holdout_residual));
                    r.check("rank", || Ok::<_, Error>((f.rank == 4, Residual::Exact, Some(f.rank.to_string()))));
                    r.check("signature", || {
                        let ok = f.signature == (2, 2);
                        Ok::<_, Error>((ok, Residual::Exact, Some(format!("{:?}", f.signature))))
                    });
                }
                Err(e) => r.exact("quadric_fit", || Err::<bool, _>(e)),
            }
        }
        Suite::DevelopingMap => developing_map_suite(&mut r, pol),
        Suite::Monodromy => {
            let a = form_a();
            for g in Generator::ALL {
                r.exact(format!("printed_{g}_preserves_a"), || Ok::<_, Error>(is_orthogonal(&printed_generator(g), &a)));
            }
            r.exact("corrected_g2_preserves_a", || Ok::<_, Error>(is_orthogonal(&corrected_g2(), &a)));
            for (k, m) in mx_generators().iter().enumerate() {
                r.exact(format!("mx_generator_{k}_preserves_ax"), || Ok::<_, Error>(is_orthogonal(m, &form_ax())));
            }
            let pts = ctx.pairs(s);
            r.check("convention_printed", || {
                detect_convention(&printed_generator, &pts, tol).map(|c| {
                    let worst = c.residuals.iter().map(|x| x.1).fold(0.0, f64::max);
                    (true, Residual::Value(worst), Some(c.convention.name().to_string()))
                })
            });
            r.check("convention_corrected", || {
                detect_convention(&generator, &pts, tol).map(|c| {
                    let worst = c.residuals.iter().map(|x| x.1).fold(0.0, f64::max);
                    (true, Residual::Value(worst), Some(c.convention.name().to_string()))
                })
            });
            r.below("anchor_j_i_i", tol, || {
                let s = UHPPair::from_f64(pol.bits(), (0.0, 1.0), (0.0, 1.0))?;
                let target =
                    [(1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 0.0)].map(|(x, y)| ComplexValue::from_f64(pol.bits(), x, y));
                Ok::<_, Error>(projective_distance(&j_map(&s), &target))
            });
        }
        Suite::Fibers => {
            for ((x, y), want) in [((1, 1), "IV* + 5I1 + I5*"), ((1, 0), "III* + 3I1 + I6*"), ((0, -64), "IV* + 3I1 + I2 + I5*")] {
                r.check(format!("config_{x}_{y}"), || {
                    let c = classify_fibers(&q(x, 1), &q(y, 1))?;
                    Ok::<_, Error>((c.summary() == want && c.euler_total == 24, Residual::Exact, Some(c.summary())))
                });
            }
            r.check("config_0_0_not_k3", || {
                let c = classify_fibers(&q(0, 1), &q(0, 1))?;
                Ok::<_, Error>((c.euler_total < 24 && !c.is_k3(), Residual::Exact, Some(format!("euler {}", c.euler_total))))
            });
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ ((s as u64 + 1) << 32));
            for k in 0..ctx.samples {
                let x = q(rng.gen_range(-20..=20), rng.gen_range(1..=6));
                let y = q(rng.gen_range(-200..=200), rng.gen_range(1..=6));
                r.check(format!("euler_24@{k}"), || {
                    let c = classify_fibers(&x, &y)?;
                    let ok = c.euler_total == 24 || (x == 0 && y == 0);
                    Ok::<_, Error>((ok, Residual::Exact, Some(format!("({x},{y}) {}", c.summary()))))
                });
            }
        }
    }
    r.finish(&s.name())
}

fn developing_map_suite(r: &mut Recorder, pol: &PrecisionPolicy) {
    let b = pol.bits();
    let base = (q(1, 10), q(1, 10));
    let base2 = (q(11, 100), q(1, 10));
    let run = || -> Result<(f64, f64, f64), Error> {
        let basis = JetBasisSolution::new(&build_pde(), &base, 14)?;
        let target =
            ModuliPoint::new(ComplexValue::from_rational(b, &base.0), ComplexValue::from_rational(b, &base.1), pol.verify_tol());
        let z = find_preimage(&target, pol)?;
        let m1 = developing_map_match(&basis, &z, 16, 8, pol)?;
        let basis2 = JetBasisSolution::new(&build_pde(), &base2, 14)?;
        let m2 = developing_map_match(&basis2, &m1.base_preimage, 16, 8, pol)?;
        let long = JetBasisSolution::new(&build_pde(), &base, 30)?;
        let t = transport_matrix(&long, &base2, b);
        Ok((m1.matched.holdout_residual, m2.matched.holdout_residual, base_change_residual(&m1.matched.g, &t, &m2.matched.g)))
    };
    match run() {
        Ok((h1, h2, g)) => {
            r.below("holdout_residual_base_1", 1e-5, || Ok::<_, Error>(h1));
            r.below("holdout_residual_base_2", 1e-5, || Ok::<_, Error>(h2));
            r.below("same_g_after_base_change", 1e-8, || Ok::<_, Error>(g));
        }
        Err(e) => r.exact("developing_map", || Err::<bool, _>(e)),
    }
}
