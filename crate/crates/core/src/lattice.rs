//! The lattice `A = U ⊕ [[2,1],[1,−2]]`, the modular embedding `j` and the
//! integral matrices realizing the generators.

use rug::Rational;

use hilbk3_numkernel::{ComplexValue, QuadraticConstants};

use crate::points::{Generator, UHPPair};
use crate::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

fn m(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.to_vec()).collect()
}

pub fn form_a() -> IntMatrix {
    m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, -2]])
}

/// `U ⊕ ⟨2⟩`.
pub fn form_ax() -> IntMatrix {
    m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 2]])
}

/// The generator images exactly as printed alongside `j̃`.
pub fn printed_generator(g: Generator) -> IntMatrix {
    match g {
        Generator::G1 => m(&[&[1, -1, 2, 1], &[0, 1, 0, 0], &[0, -1, 1, 0], &[0, 0, 0, 1]]),
        Generator::G2 => m(&[&[1, -1, 2, 1], &[0, 1, 0, 0], &[0, -1, 1, 0], &[0, 1, 0, 1]]),
        Generator::G3 => m(&[&[0, -1, 0, 0], &[-1, 0, 0, 0], &[0, 0, -1, -1], &[0, 0, 0, 1]]),
        Generator::Tau => m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, -1]]),
    }
}

/// The image of `g₂` recomputed from `j∘g₂∘j⁻¹` under the column
/// convention. The printed matrix is not `A`-orthogonal; this one is.
pub fn corrected_g2() -> IntMatrix {
    m(&[&[1, 1, 1, 3], &[0, 1, 0, 0], &[0, -1, 1, 0], &[0, 1, 0, 1]])
}

/// Printed matrices with `g̃₂` replaced by [`corrected_g2`].
pub fn generator(g: Generator) -> IntMatrix {
    match g {
        Generator::G2 => corrected_g2(),
        _ => printed_generator(g),
    }
}

/// Generators of the monodromy on the diagonal, acting on `A_X`.
pub fn mx_generators() -> [IntMatrix; 2] {
    [m(&[&[1, -1, 2], &[0, 1, 0], &[0, -1, 1]]), m(&[&[0, -1, 0], &[-1, 0, 0], &[0, 0, -1]])]
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = a[0].len();
    (0..k).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let k = b[0].len();
    a.iter()
        .map(|row| (0..k).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

/// `ᵗg·A·g`.
pub fn pullback(g: &IntMatrix, a: &IntMatrix) -> IntMatrix {
    mat_mul(&mat_mul(&transpose(g), a), g)
}

pub fn is_orthogonal(g: &IntMatrix, a: &IntMatrix) -> bool {
    pullback(g, a) == *a
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn det(a: &IntMatrix) -> i64 {
    let n = a.len();
    let mut w: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if w[k][k] == 0 {
            match (k + 1..n).find(|&i| w[i][k] != 0) {
                Some(i) => {
                    w.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) / prev;
            }
        }
        prev = w[k][k];
    }
    (sign * w[n - 1][n - 1]) as i64
}

/// Exact inverse over ℚ; `None` when singular.
pub fn inverse(a: &IntMatrix) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut w: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Rational> = r.iter().map(|&x| Rational::from(x)).collect();
            row.extend((0..n).map(|j| Rational::from(i64::from(i == j))));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| w[i][k] != 0)?;
        w.swap(p, k);
        let inv = Rational::from(w[k][k].recip_ref());
        for x in w[k].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != k && w[i][k] != 0 {
                let f = w[i][k].clone();
                for j in 0..2 * n {
                    let t = Rational::from(&f * &w[k][j]);
                    w[i][j] -= t;
                }
            }
        }
    }
    Some(w.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `(z₁z₂ : −1 : z₁ : z₂)·(I₂ ⊕ W⁻¹)` with `W = [[1,1],[ε′,ε]]`.
pub fn j_map(p: &UHPPair) -> [ComplexValue; 4] {
    let k = QuadraticConstants::new(p.prec());
    // W⁻¹ = (1/√5)[[ε, −1], [−ε′, 1]]
    let s = k.sqrt5.recip();
    let u = (&p.z1 * &k.eps - &p.z2 * &k.eps_conj) * &s;
    let v = (&p.z2 - &p.z1) * &s;
    [&p.z1 * &p.z2, ComplexValue::from_i64(p.prec(), -1), u, v]
}

/// `ξAᵗξ`.
pub fn quadric_value(xi: &[ComplexValue; 4]) -> ComplexValue {
    bilinear(xi, xi)
}

/// `ξAᵗξ̄`.
pub fn hermitian_value(xi: &[ComplexValue; 4]) -> ComplexValue {
    let c: Vec<ComplexValue> = xi.iter().map(|x| x.conj()).collect();
    bilinear(xi, &c)
}

fn bilinear(x: &[ComplexValue], y: &[ComplexValue]) -> ComplexValue {
    let a = form_a();
    let mut acc = ComplexValue::zero(x[0].prec());
    for i in 0..4 {
        for j in 0..4 {
            if a[i][j] != 0 {
                acc += (&x[i] * &y[j]).scale_i64(a[i][j]);
            }
        }
    }
    acc
}

/// `|u ∧ v| / (|u||v|)`: zero exactly when the vectors are proportional.
pub fn projective_distance(u: &[ComplexValue], v: &[ComplexValue]) -> f64 {
    let prec = u[0].prec();
    let mut wedge = rug::Float::new(prec);
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            wedge += (&u[i] * &v[j] - &u[j] * &v[i]).norm_sqr();
        }
    }
    let nu: rug::Float = u.iter().fold(rug::Float::new(prec), |a, x| a + x.norm_sqr());
    let nv: rug::Float = v.iter().fold(rug::Float::new(prec), |a, x| a + x.norm_sqr());
    (wedge / (nu * nv)).sqrt().to_f64()
}

/// How an integral matrix `g̃` is taken to act on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `ᵗj(g·p) ∝ g̃·ᵗj(p)`
    Direct,
    Transpose,
    Inverse,
    InverseTranspose,
}

impl Convention {
    pub const ALL: [Convention; 4] =
        [Convention::Direct, Convention::Transpose, Convention::Inverse, Convention::InverseTranspose];

    pub fn name(self) -> &'static str {
        match self {
            Convention::Direct => "g",
            Convention::Transpose => "transpose",
            Convention::Inverse => "inverse",
            Convention::InverseTranspose => "inverse-transpose",
        }
    }

    fn matrix(self, g: &IntMatrix) -> Option<Vec<Vec<Rational>>> {
        let q = |a: &IntMatrix| a.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect();
        match self {
            Convention::Direct => Some(q(g)),
            Convention::Transpose => Some(q(&transpose(g))),
            Convention::Inverse => inverse(g),
            Convention::InverseTranspose => inverse(&transpose(g)),
        }
    }
}

fn apply(m: &[Vec<Rational>], v: &[ComplexValue; 4]) -> Vec<ComplexValue> {
    m.iter()
        .map(|row| {
            let mut acc = ComplexValue::zero(v[0].prec());
            for (c, x) in row.iter().zip(v) {
                if *c != 0 {
                    acc += x.scale(c);
                }
            }
            acc
        })
        .collect()
}

/// Largest projective distance between `j(g·p)` and `M·ᵗj(p)` over the samples.
pub fn intertwining_residual(g: Generator, matrix: &IntMatrix, convention: Convention, samples: &[UHPPair]) -> f64 {
    let Some(mm) = convention.matrix(matrix) else {
        return f64::INFINITY;
    };
    samples
        .iter()
        .map(|p| projective_distance(&j_map(&p.act(g)), &apply(&mm, &j_map(p))))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct IntertwineReport {
    pub convention: Convention,
    /// Worst residual per generator under `convention`.
    pub residuals: Vec<(Generator, f64)>,
}

/// Finds the one convention under which every matrix intertwines with its
/// generator to `tol`.
pub fn detect_convention(
    matrices: &dyn Fn(Generator) -> IntMatrix,
    samples: &[UHPPair],
    tol: f64,
) -> Result<IntertwineReport> {
    let mut best: Option<IntertwineReport> = None;
    for c in Convention::ALL {
        let residuals: Vec<(Generator, f64)> = Generator::ALL
            .iter()
            .map(|&g| (g, intertwining_residual(g, &matrices(g), c, samples)))
            .collect();
        if residuals.iter().all(|(_, r)| *r < tol) {
            return Ok(IntertwineReport { convention: c, residuals });
        }
        let worst = residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| b.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max) > worst) {
            best = Some(IntertwineReport { convention: c, residuals });
        }
    }
    let b = best.unwrap();
    let failing = b.residuals.iter().find(|(_, r)| *r >= tol).map(|(g, _)| g.name()).unwrap_or("?");
    Err(Error::NoConventionMatches(failing.to_string()))
}
