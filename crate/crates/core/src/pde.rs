//! The rank-4 system
//! `u_XX = L₁u_XY + A₁u_X + B₁u_Y + P₁u`, `u_YY = M₁u_XY + C₁u_X + D₁u_Y + Q₁u`:
//! exact coefficients, elimination to the restricted equation on `Y = 0`,
//! Taylor solutions at rational points, and the quadric-image and
//! developing-map checks.

use rug::Rational;

use hilbk3_exact::{vars, DiffOperator, RationalFunction, SparsePoly, Vars};
use hilbk3_numkernel::svd::{equilibrated_null_vector, svd};
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};
use nalgebra::{Matrix4, SymmetricEigen};

use crate::forms::{match_projective_maps, moduli_xyz, newton_invert, ModuliPoint, NewtonOptions, ProjectiveMatch};
use crate::lattice::j_map;
use crate::{Error, Result, UHPPair};

type RF = RationalFunction;

pub fn pde_ring() -> Vars {
    vars(&["X", "Y"])
}

fn p(s: &str) -> SparsePoly {
    SparsePoly::parse(&pde_ring(), s).expect("polynomial literal parses")
}

fn rf(s: &str) -> RF {
    RF::parse(&pde_ring(), s).expect("rational literal parses")
}

/// `36X² − 32X − Y`.
pub fn singular_factor() -> SparsePoly {
    p("36*X^2 - 32*X - Y")
}

/// `1728X⁵ − 1600X⁴ − 720X³Y + 640X²Y + 80XY² − 64Y² − Y³`, the expanded
/// form of the `K₂` polynomial. Up to the factor `−Y(36X²−32X−Y)²` it is
/// `1 − L₁M₁`, the determinant of the system for `(u_XXY, u_XYY)`.
pub fn pivot_polynomial() -> SparsePoly {
    p("1728*X^5 - 1600*X^4 - 720*X^3*Y + 640*X^2*Y + 80*X*Y^2 - 64*Y^2 - Y^3")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDESystem {
    pub l1: RF,
    pub m1: RF,
    pub a1: RF,
    pub b1: RF,
    pub c1: RF,
    pub d1: RF,
    pub p1: RF,
    pub q1: RF,
}

pub fn build_pde() -> PDESystem {
    let k = "(36*X^2 - 32*X - Y)";
    PDESystem {
        l1: rf(&format!("-20*(4*X^2 + 3*X*Y - 4*Y)/{k}")),
        m1: rf(&format!("-2*(54*X^3 - 50*X^2 - 3*X*Y + 2*Y)/(5*Y*{k})")),
        a1: rf(&format!("-2*(20*X^3 - 8*X*Y + 9*X^2*Y + Y^2)/(X*Y*{k})")),
        b1: rf(&format!("10*Y*(-8 + 3*X)/(X*{k})")),
        c1: rf(&format!("-2*(-25*X^2 + 27*X^3 + 2*Y - 3*X*Y)/(5*Y^2*{k})")),
        d1: rf(&format!("-2*(-120*X^2 + 135*X^3 - 2*Y - 3*X*Y)/(5*X*Y*{k})")),
        p1: rf(&format!("-2*(8*X - Y)/(X^2*{k})")),
        q1: rf(&format!("-2*(-10 + 9*X)/(25*X*Y*{k})")),
    }
}

impl PDESystem {
    pub fn coefficients(&self) -> [(&'static str, &RF); 8] {
        [
            ("L1", &self.l1),
            ("M1", &self.m1),
            ("A1", &self.a1),
            ("B1", &self.b1),
            ("C1", &self.c1),
            ("D1", &self.d1),
            ("P1", &self.p1),
            ("Q1", &self.q1),
        ]
    }

    /// Rows of `E₁` and `E₂` on the jet vector `w = (u, u_X, u_Y, u_XY)`.
    fn e_rows(&self) -> ([RF; 4], [RF; 4]) {
        (
            [self.p1.clone(), self.a1.clone(), self.b1.clone(), self.l1.clone()],
            [self.q1.clone(), self.c1.clone(), self.d1.clone(), self.m1.clone()],
        )
    }

    /// `∂_X w = Ω_X w`, `∂_Y w = Ω_Y w` for `w = (u, u_X, u_Y, u_XY)`.
    ///
    /// The third-order rows come from the two derived relations
    /// `u_XXY = ∂_Y(E₁u)` and `u_XYY = ∂_X(E₂u)`. Writing
    /// `u_XXY = r₁ + L₁u_XYY` and `u_XYY = r₂ + M₁u_XXY` with `r₁, r₂` free
    /// of third-order jets, `u_XXY = (r₁ + L₁r₂)/(1 − L₁M₁)` and likewise.
    pub fn connection(&self) -> Result<Connection> {
        let z = RF::zero(&pde_ring());
        let o = RF::one(&pde_ring());
        let e = |i: usize| -> [RF; 4] {
            let mut v = [z.clone(), z.clone(), z.clone(), z.clone()];
            v[i] = o.clone();
            v
        };
        let (e1, e2) = self.e_rows();
        let add = |a: &[RF; 4], b: &[RF; 4]| -> [RF; 4] { std::array::from_fn(|i| a[i].add(&b[i])) };
        let scale = |c: &RF, a: &[RF; 4]| -> [RF; 4] { std::array::from_fn(|i| c.mul(&a[i])) };
        let d = |a: &[RF; 4], v: usize| -> [RF; 4] { std::array::from_fn(|i| a[i].derivative(v)) };
        // r₁ = ∂_Y E₁ + P₁e₂ + A₁e₃ + B₁E₂, on (u, u_X, u_Y, u_XY) with u_XY = e₃
        let r1 = add(&add(&d(&e1, 1), &add(&scale(&self.p1, &e(2)), &scale(&self.a1, &e(3)))), &scale(&self.b1, &e2));
        let r2 = add(&add(&d(&e2, 0), &add(&scale(&self.q1, &e(1)), &scale(&self.d1, &e(3)))), &scale(&self.c1, &e1));
        let det = o.sub(&self.l1.mul(&self.m1));
        if det.is_zero() {
            return Err(Error::EliminationFailed("1 − L1·M1 vanishes identically".into()));
        }
        let inv = det.recip()?;
        let a = scale(&inv, &add(&r1, &scale(&self.l1, &r2)));
        let b = scale(&inv, &add(&r2, &scale(&self.m1, &r1)));
        Ok(Connection { omega_x: [e(1), e1, e(3), a], omega_y: [e(2), e(3), e2, b] })
    }
}

/// Row `i` of `Ω_X` expresses `∂_X w_i` in terms of `w`.
#[derive(Clone, Debug)]
pub struct Connection {
    pub omega_x: [[RF; 4]; 4],
    pub omega_y: [[RF; 4]; 4],
}

impl Connection {
    /// `Ω = Ω_num/Δ` with `Δ` the least common denominator of the entries.
    pub fn cleared(&self, var: usize) -> (SparsePoly, [[SparsePoly; 4]; 4]) {
        let om = if var == 0 { &self.omega_x } else { &self.omega_y };
        let mut l = SparsePoly::one(&pde_ring());
        for e in om.iter().flatten() {
            let g = hilbk3_exact::gcd(&l, e.den());
            l = l.mul(&e.den().div_exact(&g).expect("gcd divides"));
        }
        let num = std::array::from_fn(|i| {
            std::array::from_fn(|j| om[i][j].num().mul(&l.div_exact(om[i][j].den()).expect("lcm divisible")))
        });
        (l, num)
    }
}

fn det4(m: &[[SparsePoly; 4]; 4]) -> SparsePoly {
    // Laplace expansion along the first row.
    let det3 = |r: [usize; 3], c: [usize; 3]| -> SparsePoly {
        let e = |i: usize, j: usize| &m[r[i]][c[j]];
        let t1 = e(0, 0).mul(&e(1, 1).mul(e(2, 2)).sub(&e(1, 2).mul(e(2, 1))));
        let t2 = e(0, 1).mul(&e(1, 0).mul(e(2, 2)).sub(&e(1, 2).mul(e(2, 0))));
        let t3 = e(0, 2).mul(&e(1, 0).mul(e(2, 1)).sub(&e(1, 1).mul(e(2, 0))));
        t1.sub(&t2).add(&t3)
    };
    let mut acc = SparsePoly::zero(m[0][0].vars());
    for j in 0..4 {
        if m[0][j].is_zero() {
            continue;
        }
        let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
        let term = m[0][j].mul(&det3([1, 2, 3], [cols[0], cols[1], cols[2]]));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

#[derive(Clone, Debug)]
pub struct Elimination {
    /// `a₀, …, a₄` in `X, Y` with `Σ a_k ∂_X^k u = 0`, polynomial and
    /// without a common power of `Y`.
    pub full: Vec<SparsePoly>,
    /// The equation at `Y = 0`, normalized to leading coefficient 1.
    pub restricted: DiffOperator,
    /// `a₀(X, 0) = 0`.
    pub no_zeroth_order_term: bool,
}

/// Expresses `u, u_X, …, u_XXXX` on the jet basis `(u, u_X, u_Y, u_XY)`
/// by repeated use of `Ω_X`, which encodes all nine relations obtained from
/// `E₁, E₂` and their derivatives. The five rows are dependent over
/// `ℚ(X, Y)`; their relation comes from the signed 4×4 minors.
///
/// Row `k` is kept as `n_k/Δ^k`, so that
/// `n_{k+1} = Δ·∂_X n_k − kΔ′·n_k + n_k·Ω_num` stays polynomial.
pub fn eliminate_to_restricted_ode(pde: &PDESystem) -> Result<Elimination> {
    let ring = pde_ring();
    let (delta, om) = pde.connection()?.cleared(0);
    let ddelta = delta.derivative(0);
    let z = SparsePoly::zero(&ring);
    let mut rows: Vec<[SparsePoly; 4]> = vec![[SparsePoly::one(&ring), z.clone(), z.clone(), z]];
    for k in 0..4u32 {
        let n = &rows[k as usize];
        let next = std::array::from_fn(|j| {
            let mut acc = delta.mul(&n[j].derivative(0)).sub(&ddelta.mul(&n[j]).scale(&Rational::from(k)));
            for i in 0..4 {
                if !n[i].is_zero() && !om[i][j].is_zero() {
                    acc = acc.add(&n[i].mul(&om[i][j]));
                }
            }
            acc
        });
        rows.push(next);
    }
    // Σ c_k n_k = 0 gives Σ c_k Δ^k v_k = 0.
    let mut full = Vec::with_capacity(5);
    let mut dk = SparsePoly::one(&ring);
    for k in 0..5 {
        let m: Vec<&[SparsePoly; 4]> = (0..5).filter(|&r| r != k).map(|r| &rows[r]).collect();
        let d = det4(&[m[0].clone(), m[1].clone(), m[2].clone(), m[3].clone()]);
        let c = if k % 2 == 0 { d } else { d.neg() };
        full.push(c.mul(&dk));
        dk = dk.mul(&delta);
    }
    if full[4].is_zero() {
        return Err(Error::EliminationFailed("u, u_X, u_Y, u_XY, u_XX, u_XXX do not span".into()));
    }
    let ypow = full.iter().filter_map(|f| f.valuation_in(1)).min().unwrap_or(0);
    if ypow > 0 {
        let yk = SparsePoly::monomial(&ring, vec![0, ypow], 1);
        full = full.iter().map(|f| f.div_exact(&yk).expect("common power of Y")).collect();
    }
    let x = vars(&["X"]);
    let at_y0: Vec<SparsePoly> =
        full.iter().map(|f| f.eval_var(1, &Rational::new()).to_ring(&x)).collect::<std::result::Result<_, _>>()?;
    let no_zeroth_order_term = at_y0[0].is_zero();
    if at_y0[4].is_zero() {
        return Err(Error::EliminationFailed("leading coefficient vanishes on Y = 0".into()));
    }
    let restricted = DiffOperator::from_polys(at_y0)?.monic();
    Ok(Elimination { full, restricted, no_zeroth_order_term })
}

/// Which derivative a coefficient multiplies.
const DERIVS: [(usize, usize); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Both equations cleared of denominators and written in the local
/// coordinates `x = X − X₀`, `y = Y − Y₀` as dense grids `c[i][j]`, one per
/// entry of [`DERIVS`].
#[derive(Clone, Debug)]
struct LocalSystem {
    eqs: [Vec<Vec<Vec<Rational>>>; 2],
}

fn dense(poly: &SparsePoly, n: usize) -> Vec<Vec<Rational>> {
    let mut g = vec![vec![Rational::new(); n + 1]; n + 1];
    for (m, c) in poly.terms() {
        let (i, j) = (m.0[0] as usize, m.0[1] as usize);
        if i + j <= n {
            g[i][j] = c.clone();
        }
    }
    g
}

impl LocalSystem {
    fn new(pde: &PDESystem, base: &(Rational, Rational), order: usize) -> Result<Self> {
        let ring = pde_ring();
        let (x0, y0) = base;
        let on_locus = *x0 == 0
            || *y0 == 0
            || singular_factor().eval(&[x0.clone(), y0.clone()]) == 0
            || pivot_polynomial().eval(&[x0.clone(), y0.clone()]) == 0;
        if on_locus {
            return Err(Error::OutsideDomain(format!("({x0}, {y0}) lies on XY·K·K₂ = 0")));
        }
        let one = RF::one(&ring);
        let z = RF::zero(&ring);
        let e1 = [pde.p1.neg(), pde.a1.neg(), pde.b1.neg(), one.clone(), pde.l1.neg(), z.clone()];
        let e2 = [pde.q1.neg(), pde.c1.neg(), pde.d1.neg(), z, pde.m1.neg(), one];
        let shift_x = p(&format!("X + {x0}"));
        let shift_y = p(&format!("Y + {y0}"));
        let local = |row: &[RF; 6]| -> Vec<Vec<Vec<Rational>>> {
            let mut l = SparsePoly::one(&ring);
            for c in row {
                let g = hilbk3_exact::gcd(&l, c.den());
                l = l.mul(&c.den().div_exact(&g).expect("gcd divides"));
            }
            row.iter()
                .map(|c| {
                    let poly = c.num().mul(&l.div_exact(c.den()).expect("lcm divisible"));
                    dense(&poly.substitute(0, &shift_x).substitute(1, &shift_y), order)
                })
                .collect()
        };
        Ok(LocalSystem { eqs: [local(&e1), local(&e2)] })
    }
}

/// Coefficient of `x^a y^b` in `∂^d U` for `U = Σ c_ij x^i y^j`.
fn deriv_coeff(c: &[Vec<Rational>], d: (usize, usize), a: usize, b: usize) -> Rational {
    let (i, j) = (a + d.0, b + d.1);
    if i >= c.len() || j >= c[i].len() {
        return Rational::new();
    }
    let f = |n: usize, k: usize| -> u32 { ((n - k + 1)..=n).map(|x| x as u32).product() };
    Rational::from(&c[i][j] * (f(i, d.0) * f(j, d.1)))
}

/// Exact Gaussian elimination; all rows must be consistent. Returns the
/// solution or the tag of the first inconsistent row, or `None` on a rank
/// drop.
fn solve_exact<T: Copy>(mut rows: Vec<(Vec<Rational>, Rational, T)>, n: usize) -> std::result::Result<Vec<Rational>, Option<T>> {
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0;
    for col in 0..n {
        let Some(k) = (r..rows.len()).find(|&k| rows[k].0[col] != 0) else {
            return Err(None);
        };
        rows.swap(r, k);
        let inv = Rational::from(rows[r].0[col].recip_ref());
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot = &head[r];
        for row in tail.iter_mut() {
            if row.0[col] == 0 {
                continue;
            }
            let f = Rational::from(&row.0[col] * &inv);
            for (x, y) in row.0.iter_mut().zip(&pivot.0).skip(col) {
                *x -= Rational::from(&f * y);
            }
            row.1 -= Rational::from(&f * &pivot.1);
        }
        pivots.push(r);
        r += 1;
    }
    if let Some(bad) = rows[r..].iter().find(|row| row.1 != 0) {
        return Err(Some(bad.2));
    }
    let mut x = vec![Rational::new(); n];
    for col in (0..n).rev() {
        let row = &rows[pivots[col]];
        let mut s = row.1.clone();
        for k in (col + 1)..n {
            s -= Rational::from(&row.0[k] * &x[k]);
        }
        x[col] = s / &row.0[col];
    }
    Ok(x)
}

/// `u = Σ c_ij (X−X₀)^i (Y−Y₀)^j`, all `i + j ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorSolution {
    pub base: (Rational, Rational),
    pub order: usize,
    pub coeffs: Vec<Vec<Rational>>,
}

impl TaylorSolution {
    /// `(u, u_X, u_Y, u_XY)` at the base point.
    pub fn jets(&self) -> [Rational; 4] {
        let c = &self.coeffs;
        [c[0][0].clone(), c[1][0].clone(), c[0][1].clone(), c[1][1].clone()]
    }

    /// The polynomial in the local coordinates `x = X − X₀`, `y = Y − Y₀`.
    pub fn local_poly(&self) -> SparsePoly {
        let terms = (0..=self.order)
            .flat_map(|i| (0..=self.order - i).map(move |j| (i, j)))
            .filter(|&(i, j)| self.coeffs[i][j] != 0)
            .map(|(i, j)| (vec![i as u32, j as u32], self.coeffs[i][j].clone()));
        SparsePoly::from_terms(&pde_ring(), terms)
    }

    /// `∂_X^a ∂_Y^b u` at `(X, Y)`, truncated.
    pub fn eval_derivative(&self, x: &ComplexValue, y: &ComplexValue, d: (usize, usize)) -> ComplexValue {
        let prec = x.prec();
        let dx = x - ComplexValue::from_rational(prec, &self.base.0);
        let dy = y - ComplexValue::from_rational(prec, &self.base.1);
        let n = self.order;
        let mut acc = ComplexValue::zero(prec);
        // Horner in x over rows that are Horner in y.
        for a in (0..=n.saturating_sub(d.0)).rev() {
            let mut row = ComplexValue::zero(prec);
            for b in (0..=(n - a - d.0).saturating_sub(d.1)).rev() {
                let c = deriv_coeff(&self.coeffs, d, a, b);
                row = row * &dy + ComplexValue::from_rational(prec, &c);
            }
            acc = acc * &dx + row;
        }
        acc
    }

    pub fn eval(&self, x: &ComplexValue, y: &ComplexValue) -> ComplexValue {
        self.eval_derivative(x, y, (0, 0))
    }

    /// `(u, u_X, u_Y, u_XY)` at `(X, Y)`.
    pub fn jets_at(&self, x: &ComplexValue, y: &ComplexValue) -> [ComplexValue; 4] {
        [(0, 0), (1, 0), (0, 1), (1, 1)].map(|d| self.eval_derivative(x, y, d))
    }
}

fn solve_local(sys: &LocalSystem, base: &(Rational, Rational), jets: &[Rational; 4], order: usize) -> Result<TaylorSolution> {
    let mut c = vec![vec![Rational::new(); order + 1]; order + 1];
    c[0][0] = jets[0].clone();
    if order >= 1 {
        c[1][0] = jets[1].clone();
        c[0][1] = jets[2].clone();
    }
    for n in 2..=order {
        // unknowns c[n−k][k], k = 0..=n
        let mut rows = Vec::new();
        for (e, eq) in sys.eqs.iter().enumerate() {
            for i in 0..=(n - 2) {
                let j = n - 2 - i;
                let mut known = Rational::new();
                for (g, &d) in eq.iter().zip(&DERIVS) {
                    for r in 0..=i {
                        for s in 0..=j {
                            if g[r][s] != 0 {
                                known += Rational::from(&g[r][s] * &deriv_coeff(&c, d, i - r, j - s));
                            }
                        }
                    }
                }
                let mut row = vec![Rational::new(); n + 1];
                for (g, &d) in eq.iter().zip(&DERIVS) {
                    if d.0 + d.1 == 2 && g[0][0] != 0 {
                        let (a, b) = (i + d.0, j + d.1);
                        let f = ((a - d.0 + 1)..=a).product::<usize>() * ((b - d.1 + 1)..=b).product::<usize>();
                        row[b] += Rational::from(&g[0][0] * f as u32);
                    }
                }
                let (a, b) = if e == 0 { (i + 2, j) } else { (i, j + 2) };
                rows.push((row, -known, (a, b)));
            }
        }
        if n == 2 {
            let mut row = vec![Rational::new(); 3];
            row[1] = Rational::from(1);
            rows.push((row, jets[3].clone(), (1, 1)));
        }
        match solve_exact(rows, n + 1) {
            Ok(x) => {
                for (k, v) in x.into_iter().enumerate() {
                    c[n - k][k] = v;
                }
            }
            Err(Some((a, b))) => return Err(Error::InconsistentReduction(a, b)),
            Err(None) => return Err(Error::OutsideDomain(format!("jet reduction is singular at degree {n}"))),
        }
    }
    Ok(TaylorSolution { base: base.clone(), order, coeffs: c })
}

/// The Taylor solution with jets `(u, u_X, u_Y, u_XY)` at `base`. At each
/// total degree the new coefficients are overdetermined from degree 4 on;
/// any disagreement between the two equations is
/// [`Error::InconsistentReduction`].
pub fn taylor_solution(
    pde: &PDESystem,
    base: &(Rational, Rational),
    jets: &[Rational; 4],
    order: usize,
) -> Result<TaylorSolution> {
    let sys = LocalSystem::new(pde, base, order)?;
    solve_local(&sys, base, jets, order)
}

/// Solutions with unit jets `e₀, …, e₃`.
#[derive(Clone, Debug)]
pub struct JetBasisSolution {
    pub base: (Rational, Rational),
    pub order: usize,
    pub solutions: Vec<TaylorSolution>,
}

impl JetBasisSolution {
    pub fn new(pde: &PDESystem, base: &(Rational, Rational), order: usize) -> Result<Self> {
        let sys = LocalSystem::new(pde, base, order)?;
        let solutions = (0..4)
            .map(|k| {
                let jets: [Rational; 4] = std::array::from_fn(|i| Rational::from((i == k) as i32));
                solve_local(&sys, base, &jets, order)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(JetBasisSolution { base: base.clone(), order, solutions })
    }

    pub fn eval(&self, x: &ComplexValue, y: &ComplexValue) -> Vec<ComplexValue> {
        self.solutions.iter().map(|s| s.eval(x, y)).collect()
    }

    /// Rank of the 4×4 matrix of jets at the base (exact).
    pub fn jet_rank(&self) -> usize {
        let rows = self
            .solutions
            .iter()
            .enumerate()
            .map(|(k, s)| (s.jets().to_vec(), Rational::new(), k))
            .collect::<Vec<_>>();
        match solve_exact(rows, 4) {
            Ok(_) => 4,
            Err(_) => (0..4).filter(|&k| self.solutions[k].jets().iter().any(|x| *x != 0)).count().min(3),
        }
    }
}

/// First-order estimate of the distance from `base` to `XY·K·K₂ = 0`:
/// exact for the coordinate lines, `|f|/|∇f|` for the curves.
pub fn singular_distance(base: &(Rational, Rational)) -> f64 {
    let pt = [base.0.clone(), base.1.clone()];
    let mut d = base.0.to_f64().abs().min(base.1.to_f64().abs());
    for f in [singular_factor(), pivot_polynomial()] {
        let v = f.eval(&pt).to_f64().abs();
        let gx = f.derivative(0).eval(&pt).to_f64();
        let gy = f.derivative(1).eval(&pt).to_f64();
        let g = (gx * gx + gy * gy).sqrt();
        if g > 0.0 {
            d = d.min(v / g);
        }
    }
    d
}

/// Deterministic sample points in the bidisk of the given radius around
/// `base`, spread by Weyl sequences.
pub fn sample_points(base: &(Rational, Rational), radius: f64, count: usize, prec: u32) -> Vec<(ComplexValue, ComplexValue)> {
    let frac = |x: f64| x - x.floor();
    let tau = std::f64::consts::TAU;
    let (bx, by) = (ComplexValue::from_rational(prec, &base.0), ComplexValue::from_rational(prec, &base.1));
    (1..=count)
        .map(|k| {
            let k = k as f64;
            let (r1, r2) = (0.3 + 0.7 * frac(k * 2f64.sqrt()), 0.3 + 0.7 * frac(k * 3f64.sqrt()));
            let (a1, a2) = (tau * frac(k * 5f64.sqrt()), tau * frac(k * 7f64.sqrt()));
            let dx = ComplexValue::from_f64(prec, radius * r1 * a1.cos(), radius * r1 * a1.sin());
            let dy = ComplexValue::from_f64(prec, radius * r2 * a2.cos(), radius * r2 * a2.sin());
            (&bx + dx, &by + dy)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct QuadricFit {
    /// Symmetric, scaled so that its entry of largest modulus is 1.
    pub q: [[ComplexValue; 4]; 4],
    pub holdout_residual: f64,
    pub rank: usize,
    /// Relative singular values of the design matrix, descending.
    pub singular_values: Vec<f64>,
    /// Numbers of positive and negative eigenvalues of `Re Q`.
    pub signature: (usize, usize),
    /// `max |Im Q_ij|`.
    pub imaginary_part: f64,
}

const PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Fits `ξQᵗξ = 0` through the first `values.len() − holdout` points by the
/// null vector of the 10-column design matrix in `ξ_iξ_j`. The nullity must
/// be exactly one at `null_tol`.
pub fn fit_quadric(values: &[Vec<ComplexValue>], holdout: usize, null_tol: f64) -> Result<QuadricFit> {
    let fit = values.len().saturating_sub(holdout);
    let unit = |v: &[ComplexValue]| -> Vec<ComplexValue> {
        let n = v.iter().map(|x| x.abs_f64().powi(2)).sum::<f64>().sqrt();
        v.iter().map(|x| x.scale_float(&rug::Float::with_val(x.prec(), 1.0 / n))).collect()
    };
    let rows: Vec<Vec<ComplexValue>> = values[..fit]
        .iter()
        .map(|v| {
            let u = unit(v);
            PAIRS.iter().map(|&(i, j)| &u[i] * &u[j]).collect()
        })
        .collect();
    if rows.len() < PAIRS.len() - 1 {
        return Err(Error::RankDeficient { nullity: PAIRS.len() - rows.len() });
    }
    let (vec, rel) = equilibrated_null_vector(&rows);
    let nullity = rel.iter().filter(|&&s| s < null_tol).count() + PAIRS.len().saturating_sub(rel.len());
    if nullity != 1 {
        return Err(Error::RankDeficient { nullity });
    }
    let prec = vec[0].prec();
    let mut q: [[ComplexValue; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| ComplexValue::zero(prec)));
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if i == j {
            q[i][i] = vec[k].clone();
        } else {
            let h = vec[k].scale(&Rational::from((1, 2)));
            q[i][j] = h.clone();
            q[j][i] = h;
        }
    }
    let big = q.iter().flatten().max_by(|a, b| a.abs_f64().total_cmp(&b.abs_f64())).unwrap().clone();
    let inv = big.recip();
    for row in q.iter_mut() {
        for x in row.iter_mut() {
            *x = &*x * &inv;
        }
    }
    let quad = |v: &[ComplexValue]| -> f64 {
        let u = unit(v);
        let mut acc = ComplexValue::zero(prec);
        for i in 0..4 {
            for j in 0..4 {
                acc += &q[i][j] * &u[i] * &u[j];
            }
        }
        acc.abs_f64()
    };
    let qn = q.iter().flatten().map(|x| x.abs_f64().powi(2)).sum::<f64>().sqrt();
    let holdout_residual = values[fit..].iter().map(|v| quad(v) / qn).fold(0.0, f64::max);
    let qrows: Vec<Vec<ComplexValue>> = q.iter().map(|r| r.to_vec()).collect();
    let s = svd(&qrows).singular_values;
    let smax = s.iter().map(|x| x.to_f64()).fold(0.0, f64::max);
    let rank = s.iter().filter(|x| x.to_f64() > 1e-8 * smax).count();
    let re = Matrix4::from_fn(|i, j| q[i][j].re_f64());
    let eig = SymmetricEigen::new(re).eigenvalues;
    let emax = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let signature = (
        eig.iter().filter(|&&x| x > 1e-8 * emax).count(),
        eig.iter().filter(|&&x| x < -1e-8 * emax).count(),
    );
    let imaginary_part = q.iter().flatten().map(|x| x.im_f64().abs()).fold(0.0, f64::max);
    Ok(QuadricFit { q, holdout_residual, rank, singular_values: rel, signature, imaginary_part })
}

/// Null-space threshold for fits on samples at `1/64` of the distance to
/// the singular locus: the data are exact to far below it, while the
/// smallest genuine singular value scales like `(1/64)³`.
pub const FIT_NULL_TOL: f64 = 1e-10;

pub fn quadric_image_test(
    basis: &JetBasisSolution,
    sample_count: usize,
    holdout: usize,
    policy: &PrecisionPolicy,
) -> Result<QuadricFit> {
    let r = singular_distance(&basis.base) / 64.0;
    let pts = sample_points(&basis.base, r, sample_count + holdout, policy.bits());
    let values: Vec<Vec<ComplexValue>> = pts.iter().map(|(x, y)| basis.eval(x, y)).collect();
    fit_quadric(&values, holdout, FIT_NULL_TOL)
}

/// A preimage of a real `(X, Y)` searched on the lines `Re z₁ = Re z₂ ∈ {0, 1/2}`
/// and polished by Newton.
pub fn find_preimage(target: &ModuliPoint, policy: &PrecisionPolicy) -> Result<UHPPair> {
    let prec = policy.bits();
    let mut cands: Vec<(f64, UHPPair)> = Vec::new();
    for re in [0.0, 0.5] {
        for i in 0..14 {
            for j in 0..14 {
                let (a, b) = (0.25 * 1.3f64.powi(i), 0.25 * 1.3f64.powi(j));
                let Ok(p) = UHPPair::from_f64(prec, (re, a), (re, b)) else { continue };
                let Ok(m) = moduli_xyz(&p, policy) else { continue };
                let d = m.x.dist(&target.x) + m.y.dist(&target.y);
                if d.is_finite() {
                    cands.push((d, p));
                }
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut last = Error::NoConvergence { iterations: 0, residual: f64::INFINITY };
    for (_, g) in cands.iter().take(4) {
        match newton_invert(target, g, policy, &NewtonOptions::default()) {
            Ok(r) => return Ok(r.z),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[derive(Clone, Debug)]
pub struct DevelopingMatch {
    pub base_preimage: UHPPair,
    pub matched: ProjectiveMatch,
}

/// Matches the jet-basis values at samples near the base with `j(z(p))`,
/// where `z(p)` inverts `(X, Y)` by Newton started at the base preimage.
pub fn developing_map_match(
    basis: &JetBasisSolution,
    base_preimage: &UHPPair,
    sample_count: usize,
    holdout: usize,
    policy: &PrecisionPolicy,
) -> Result<DevelopingMatch> {
    let prec = policy.bits();
    let target = |x: ComplexValue, y: ComplexValue| ModuliPoint::new(x, y, policy.verify_tol());
    let b = target(ComplexValue::from_rational(prec, &basis.base.0), ComplexValue::from_rational(prec, &basis.base.1));
    let z0 = newton_invert(&b, base_preimage, policy, &NewtonOptions::default())?.z;
    let r = singular_distance(&basis.base) / 64.0;
    let pts = sample_points(&basis.base, r, sample_count + holdout, prec);
    let mut a = Vec::with_capacity(pts.len());
    let mut w = Vec::with_capacity(pts.len());
    for (x, y) in pts {
        let z = newton_invert(&target(x.clone(), y.clone()), &z0, policy, &NewtonOptions::default())?.z;
        a.push(basis.eval(&x, &y));
        w.push(j_map(&z).to_vec());
    }
    let matched = match_projective_maps(&a, &w, holdout, FIT_NULL_TOL)?;
    Ok(DevelopingMatch { base_preimage: z0, matched })
}

/// `T_ik`, the `k`-th jet at `to` of solution `i` of `basis`, so that
/// `u_i = Σ_k T_ik v_k` for the unit-jet basis `v` at `to`.
pub fn transport_matrix(basis: &JetBasisSolution, to: &(Rational, Rational), prec: u32) -> Vec<Vec<ComplexValue>> {
    let (x, y) = (ComplexValue::from_rational(prec, &to.0), ComplexValue::from_rational(prec, &to.1));
    basis.solutions.iter().map(|s| s.jets_at(&x, &y).to_vec()).collect()
}

/// Projective distance between `G₂` and `G₁·T`: a developing map fixed at
/// one base must agree with the one fixed at the other once the bases of
/// solutions are related by `T`.
pub fn base_change_residual(g1: &[Vec<ComplexValue>], t: &[Vec<ComplexValue>], g2: &[Vec<ComplexValue>]) -> f64 {
    let prec = g1[0][0].prec();
    let n = g1.len();
    let mut prod = Vec::with_capacity(n * n);
    for row in g1 {
        for k in 0..n {
            let mut acc = ComplexValue::zero(prec);
            for (i, gi) in row.iter().enumerate() {
                acc += gi * &t[i][k];
            }
            prod.push(acc);
        }
    }
    let flat: Vec<ComplexValue> = g2.iter().flatten().cloned().collect();
    crate::lattice::projective_distance(&prod, &flat)
}
