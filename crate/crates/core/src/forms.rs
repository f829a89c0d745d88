//! The Hilbert modular functions `X, Y, Z`, their local inversion and
//! projective matching of sampled maps into `ℙ³`.

use rug::{Float, Integer, Rational};

use hilbk3_numkernel::svd::equilibrated_null_vector;
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};

use crate::classical::{j_function, GUARD_BITS};
use crate::lattice::projective_distance;
use crate::points::{Generator, UHPPair, UHPoint};
use crate::theta::{mueller_forms_guarded, MuellerForms};
use crate::{Error, Result};

/// `2⁵·5²`
pub fn k1() -> Rational {
    Rational::from(800)
}

/// `2¹⁰·5⁵`
pub fn k2() -> Rational {
    Rational::from(3_200_000)
}

/// `2²⁶·5¹⁰/3²`
pub fn k3() -> Rational {
    Rational::from((Integer::from(1u64 << 26) * Integer::from(9_765_625u64), Integer::from(9)))
}

/// `1728X⁵ − 720X³Y + 80XY² − 64(5X²−Y)² − Y³`; its zero set is `K₂`.
pub fn k2_poly(x: &ComplexValue, y: &ComplexValue) -> ComplexValue {
    let x2 = x.square();
    let t = x2.scale_i64(5) - y;
    x.powu(5).scale_i64(1728) - (x.powu(3) * y).scale_i64(720) + (x * y.square()).scale_i64(80)
        - t.square().scale_i64(64)
        - y.powu(3)
}

/// A point of the affine chart in `(X, Y)`.
#[derive(Clone, Debug)]
pub struct ModuliPoint {
    pub x: ComplexValue,
    pub y: ComplexValue,
    /// `Y ≠ 0` and off `K₂`, each judged against `tol`.
    pub in_frak_x: bool,
}

impl ModuliPoint {
    pub fn new(x: ComplexValue, y: ComplexValue, tol: f64) -> Self {
        let scale = 1.0f64.max(x.abs_f64().powi(5)).max(y.abs_f64().powi(3));
        let in_frak_x = y.abs_f64() > tol && k2_poly(&x, &y).abs_f64() > tol * scale;
        ModuliPoint { x, y, in_frak_x }
    }
}

#[derive(Clone, Debug)]
pub struct Moduli {
    pub x: ComplexValue,
    pub y: ComplexValue,
    pub z: ComplexValue,
}

/// `X = k₁s₆/g₂³`, `Y = k₂s₁₀/g₂⁵`, `Z = k₃s₁₅²/g₂¹⁵`.
pub fn moduli_from_forms(f: &MuellerForms, tol: f64) -> Result<Moduli> {
    if f.g2.abs_f64() < tol {
        return Err(Error::NearZeroDenominator { what: "g2", value: f.g2.abs_f64() });
    }
    let g3 = f.g2.powu(3);
    let g5 = &g3 * &f.g2.square();
    let g15 = g5.powu(3);
    Ok(Moduli {
        x: (&f.s6 / &g3).scale(&k1()),
        y: (&f.s10 / &g5).scale(&k2()),
        z: (f.s15.square() / &g15).scale(&k3()),
    })
}

fn moduli_guarded(p: &UHPPair, policy: &PrecisionPolicy) -> Result<Moduli> {
    moduli_from_forms(&mueller_forms_guarded(p, policy), policy.verify_tol())
}

pub fn moduli_xyz(p: &UHPPair, policy: &PrecisionPolicy) -> Result<Moduli> {
    let m = moduli_guarded(p, policy)?;
    let b = policy.bits();
    Ok(Moduli { x: m.x.with_prec(b), y: m.y.with_prec(b), z: m.z.with_prec(b) })
}

/// `|144Z + K₂(X,Y)|` relative to the largest of its monomials.
pub fn klein_moduli_residual(m: &Moduli) -> f64 {
    let (x, y) = (&m.x, &m.y);
    let t = x.square().scale_i64(5) - y;
    let terms = [
        m.z.scale_i64(144),
        x.powu(5).scale_i64(1728),
        (x.powu(3) * y).scale_i64(-720),
        (x * y.square()).scale_i64(80),
        t.square().scale_i64(-64),
        -y.powu(3),
    ];
    let scale = terms.iter().map(|t| t.abs_f64()).fold(0.0, f64::max);
    let sum = terms.iter().skip(1).fold(terms[0].clone(), |a, t| a + t);
    if scale == 0.0 {
        0.0
    } else {
        sum.abs_f64() / scale
    }
}

/// `X(z,z)·J(z)`, which is identically `25/27`.
pub fn diagonal_xj(z: &UHPoint, policy: &PrecisionPolicy) -> Result<ComplexValue> {
    let hp = PrecisionPolicy::new(policy.bits() + GUARD_BITS)?;
    let zz = UHPoint::new(z.z().with_prec(hp.bits()))?;
    let m = moduli_guarded(&UHPPair::diagonal(&zz), policy)?;
    let j = j_function(&zz, &hp)?;
    Ok((m.x * j).with_prec(policy.bits()))
}

/// `max(|X(g·p) − X(p)|, |Y(g·p) − Y(p)|)` relative to `max(1, |X|, |Y|)`.
pub fn modular_invariance(p: &UHPPair, g: Generator, policy: &PrecisionPolicy) -> Result<f64> {
    let a = moduli_guarded(p, policy)?;
    let b = moduli_guarded(&p.act(g), policy)?;
    let scale = 1.0f64.max(a.x.abs_f64()).max(a.y.abs_f64());
    Ok(a.x.dist(&b.x).max(a.y.dist(&b.y)) / scale)
}

#[derive(Clone, Debug)]
pub struct InversionResult {
    pub z: UHPPair,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Relative size of `det J` below which the Jacobian is treated as rank one.
    pub rank_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iterations: 60, rank_tol: 1e-12 }
    }
}

fn xy_at(z1: &ComplexValue, z2: &ComplexValue, policy: &PrecisionPolicy) -> Result<[ComplexValue; 2]> {
    let p = UHPPair::new(z1.clone(), z2.clone())?;
    let m = moduli_guarded(&p, policy)?;
    Ok([m.x, m.y])
}

fn residual_of(f: &[ComplexValue; 2], target: &ModuliPoint) -> f64 {
    let scale = 1.0f64.max(target.x.abs_f64()).max(target.y.abs_f64());
    f[0].dist(&target.x).max(f[1].dist(&target.y)) / scale
}

/// Damped Newton for `(X, Y)(z) = target` with a central-difference
/// Jacobian. On a rank-one Jacobian (the diagonal, where `Y` vanishes to
/// second order) the minimum-norm step is taken if the residual lies in its
/// range, and [`Error::JacobianSingular`] is raised otherwise.
pub fn newton_invert(
    target: &ModuliPoint,
    guess: &UHPPair,
    policy: &PrecisionPolicy,
    opts: &NewtonOptions,
) -> Result<InversionResult> {
    let prec = policy.bits() + GUARD_BITS;
    let h = ComplexValue::from_real(Float::with_val(prec, Float::i_exp(1, -((policy.bits() / 4) as i32))));
    let tx = target.x.with_prec(prec);
    let ty = target.y.with_prec(prec);
    let target = ModuliPoint { x: tx.clone(), y: ty.clone(), in_frak_x: target.in_frak_x };
    let mut z = [guess.z1.with_prec(prec), guess.z2.with_prec(prec)];
    let mut f = xy_at(&z[0], &z[1], policy)?;
    let mut res = residual_of(&f, &target);
    for it in 0..opts.max_iterations {
        if res < policy.verify_tol() {
            return Ok(InversionResult { z: UHPPair::new(z[0].clone(), z[1].clone())?, residual: res, iterations: it });
        }
        // columns ∂F/∂z₁, ∂F/∂z₂
        let mut jac = [[ComplexValue::zero(prec), ComplexValue::zero(prec)], [ComplexValue::zero(prec), ComplexValue::zero(prec)]];
        for k in 0..2 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += &h;
            zm[k] -= &h;
            let fp = xy_at(&zp[0], &zp[1], policy)?;
            let fm = xy_at(&zm[0], &zm[1], policy)?;
            let two_h = h.scale_i64(2);
            for i in 0..2 {
                jac[i][k] = (&fp[i] - &fm[i]) / &two_h;
            }
        }
        let rhs = [&tx - &f[0], &ty - &f[1]];
        let det = &jac[0][0] * &jac[1][1] - &jac[0][1] * &jac[1][0];
        let fro: f64 = jac.iter().flatten().map(|x| x.abs_f64().powi(2)).sum();
        if fro == 0.0 {
            return Err(Error::JacobianSingular);
        }
        let step = if det.abs_f64() > opts.rank_tol * fro {
            [
                (&jac[1][1] * &rhs[0] - &jac[0][1] * &rhs[1]) / &det,
                (&jac[0][0] * &rhs[1] - &jac[1][0] * &rhs[0]) / &det,
            ]
        } else {
            // J ≈ u·vᴴ; the component of rhs orthogonal to the column space is unreachable.
            let col = if jac[0][0].abs_f64() + jac[1][0].abs_f64() >= jac[0][1].abs_f64() + jac[1][1].abs_f64() { 0 } else { 1 };
            let u = [jac[0][col].clone(), jac[1][col].clone()];
            let un = u[0].norm_sqr() + u[1].norm_sqr();
            let proj = (u[0].conj() * &rhs[0] + u[1].conj() * &rhs[1]).scale_float(&Float::with_val(prec, 1 / &un));
            let perp = [&rhs[0] - &u[0] * &proj, &rhs[1] - &u[1] * &proj];
            // The difference quotient of a function flat to second order still
            // carries O(h²) noise, so the test is relative to the step size.
            let scale = 1.0f64.max(tx.abs_f64()).max(ty.abs_f64());
            let rn = rhs[0].abs_f64().max(rhs[1].abs_f64());
            if perp[0].abs_f64().max(perp[1].abs_f64()) > policy.verify_tol() * scale + 1e-6 * rn {
                return Err(Error::JacobianSingular);
            }
            // J⁺ = Jᴴ/‖J‖² for rank one
            let inv = Float::with_val(prec, 1.0 / fro);
            [
                (jac[0][0].conj() * &rhs[0] + jac[1][0].conj() * &rhs[1]).scale_float(&inv),
                (jac[0][1].conj() * &rhs[0] + jac[1][1].conj() * &rhs[1]).scale_float(&inv),
            ]
        };
        // backtrack until the residual decreases and both points stay in ℍ
        let mut t = Rational::from(1);
        loop {
            let cand = [&z[0] + step[0].scale(&t), &z[1] + step[1].scale(&t)];
            if cand[0].im_f64() > 0.0 && cand[1].im_f64() > 0.0 {
                if let Ok(fc) = xy_at(&cand[0], &cand[1], policy) {
                    let rc = residual_of(&fc, &target);
                    if rc < res || t < Rational::from((1, 1 << 20)) {
                        z = cand;
                        f = fc;
                        res = rc;
                        break;
                    }
                }
            }
            t /= 2u32;
            if t < Rational::from((1, 1 << 21)) {
                return Err(Error::NoConvergence { iterations: it + 1, residual: res });
            }
        }
    }
    if res < policy.verify_tol() {
        return Ok(InversionResult { z: UHPPair::new(z[0].clone(), z[1].clone())?, residual: res, iterations: opts.max_iterations });
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: res })
}

#[derive(Clone, Debug)]
pub struct ProjectiveMatch {
    /// Row-major 4×4 matrix with `G·a_k ∥ b_k`.
    pub g: Vec<Vec<ComplexValue>>,
    pub holdout_residual: f64,
    /// `σ_k/σ_max` of the equilibrated constraint matrix, descending.
    pub singular_values: Vec<f64>,
}

fn unit(v: &[ComplexValue]) -> Vec<ComplexValue> {
    let prec = v[0].prec();
    let n = v.iter().fold(Float::new(prec), |a, x| a + x.norm_sqr()).sqrt();
    let inv = Float::with_val(prec, 1 / n);
    v.iter().map(|x| x.scale_float(&inv)).collect()
}

pub fn apply_matrix(g: &[Vec<ComplexValue>], v: &[ComplexValue]) -> Vec<ComplexValue> {
    g.iter()
        .map(|row| row.iter().zip(v).fold(ComplexValue::zero(v[0].prec()), |a, (x, y)| a + x * y))
        .collect()
}

/// Fits `G` from the first `a.len() − holdout` correspondences and reports
/// the worst projective distance on the rest. A constraint matrix whose
/// relative singular values have more than one entry below `null_tol` is
/// [`Error::RankDeficient`].
pub fn match_projective_maps(
    a: &[Vec<ComplexValue>],
    b: &[Vec<ComplexValue>],
    holdout: usize,
    null_tol: f64,
) -> Result<ProjectiveMatch> {
    assert_eq!(a.len(), b.len(), "sample lists differ in length");
    let n = a[0].len();
    let fit = a.len().saturating_sub(holdout);
    let mut rows = Vec::new();
    for k in 0..fit {
        let v = unit(&a[k]);
        let w = unit(&b[k]);
        // (Gv)_i w_j − (Gv)_j w_i = 0
        for i in 0..n {
            for j in (i + 1)..n {
                let mut row = vec![ComplexValue::zero(v[0].prec()); n * n];
                for c in 0..n {
                    row[i * n + c] = &v[c] * &w[j];
                    row[j * n + c] = -(&v[c] * &w[i]);
                }
                rows.push(row);
            }
        }
    }
    if rows.len() < n * n - 1 {
        return Err(Error::RankDeficient { nullity: n * n - rows.len() });
    }
    let (vec, rel) = equilibrated_null_vector(&rows);
    let nullity = rel.iter().filter(|&&s| s < null_tol).count() + (n * n).saturating_sub(rel.len());
    if nullity > 1 {
        return Err(Error::RankDeficient { nullity });
    }
    let g: Vec<Vec<ComplexValue>> = (0..n).map(|i| vec[i * n..(i + 1) * n].to_vec()).collect();
    let holdout_residual = (fit..a.len())
        .map(|k| projective_distance(&apply_matrix(&g, &a[k]), &b[k]))
        .fold(0.0, f64::max);
    Ok(ProjectiveMatch { g, holdout_residual, singular_values: rel })
}
