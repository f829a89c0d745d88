//! Elliptic fibrations of the K3 family: Kodaira normal forms, exact
//! discriminants, fibre classification and the birational maps between the
//! families in `(λ, μ)`, `(X, Y)` and `(𝔄 : 𝔅 : 𝔆)`.

use std::fmt;

use rug::Rational;

use hilbk3_exact::{gcd, vars, SparsePoly, Vars};
use hilbk3_numkernel::ComplexValue;

use crate::{Error, Result};

/// `z² = x³ − g₂x − g₃` over one affine chart of the base, with
/// `disc = 4g₂³ − 27g₃²`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassChart {
    pub g2: SparsePoly,
    pub g3: SparsePoly,
    pub disc: SparsePoly,
    /// Index of the base coordinate in the ring.
    pub var: usize,
}

impl WeierstrassChart {
    /// Completing the cube in `z² = x³ + ax² + bx + c`.
    pub fn from_cubic(a: &SparsePoly, b: &SparsePoly, c: &SparsePoly, var: usize) -> Self {
        let third = Rational::from((1, 3));
        let a2 = a.mul(a);
        let g2 = a2.scale(&third).sub(b);
        let two_27 = Rational::from((2, 27));
        let g3 = a2.mul(a).scale(&two_27).sub(&a.mul(b).scale(&third)).add(c).neg();
        let disc = g2.pow(3).scale(&Rational::from(4)).sub(&g3.pow(2).scale(&Rational::from(27)));
        WeierstrassChart { g2, g3, disc, var }
    }

    /// The chart at `y = ∞` in `y₁ = 1/y`: `h₂ = y₁⁸g₂(1/y₁)`, `h₃ = y₁¹²g₃(1/y₁)`.
    pub fn at_infinity(&self) -> Result<Self> {
        let flip = |p: &SparsePoly, w: usize| -> Result<SparsePoly> {
            let cs = p.to_univariate(self.var);
            if cs.len() > w + 1 {
                return Err(Error::OutsideDomain(format!("degree {} exceeds weight {w}", cs.len() - 1)));
            }
            let mut rev = vec![SparsePoly::zero(p.vars()); w + 1];
            for (k, c) in cs.into_iter().enumerate() {
                rev[w - k] = c;
            }
            Ok(SparsePoly::from_univariate(p.vars(), self.var, &rev))
        };
        Ok(WeierstrassChart {
            g2: flip(&self.g2, 8)?,
            g3: flip(&self.g3, 12)?,
            disc: flip(&self.disc, 24)?,
            var: self.var,
        })
    }

    /// `(ord g₂, ord g₃, ord disc)` at the origin of the chart; `None`
    /// stands for the zero polynomial.
    pub fn valuations(&self) -> (Option<u32>, Option<u32>, Option<u32>) {
        let v = |p: &SparsePoly| p.valuation_in(self.var);
        (v(&self.g2), v(&self.g3), v(&self.disc))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    Smooth,
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    pub fn euler(&self) -> u32 {
        match *self {
            KodairaType::Smooth => 0,
            KodairaType::I(n) => n,
            KodairaType::IStar(n) => n + 6,
            KodairaType::II => 2,
            KodairaType::III => 3,
            KodairaType::IV => 4,
            KodairaType::IVStar => 8,
            KodairaType::IIIStar => 9,
            KodairaType::IIStar => 10,
        }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KodairaType::Smooth => write!(f, "smooth"),
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

/// Kodaira's table keyed on the valuations of `g₂`, `g₃` and the
/// discriminant of a minimal short Weierstrass model.
pub fn kodaira_type(v2: u32, v3: u32, vd: u32) -> Result<KodairaType> {
    use KodairaType::*;
    if v2 >= 4 && v3 >= 6 {
        return Err(Error::NonMinimal(v2, v3, vd));
    }
    let t = match (v2, v3, vd) {
        (_, _, 0) => Smooth,
        (0, 0, n) => I(n),
        (v2, 1, 2) if v2 >= 1 => II,
        (1, v3, 3) if v3 >= 2 => III,
        (v2, 2, 4) if v2 >= 2 => IV,
        (v2, v3, 6) if v2 >= 2 && v3 >= 3 => IStar(0),
        (2, 3, d) if d > 6 => IStar(d - 6),
        (v2, 4, 8) if v2 >= 3 => IVStar,
        (3, v3, 9) if v3 >= 5 => IIIStar,
        (v2, 5, 10) if v2 >= 4 => IIStar,
        _ => return Err(Error::NoKodairaType(v2, v3, vd)),
    };
    Ok(t)
}

/// Repeatedly removes `(4, 6, 12)` from non-minimal valuations.
fn minimalize(mut v: (u32, u32, u32)) -> ((u32, u32, u32), u32) {
    let mut steps = 0;
    while v.0 >= 4 && v.1 >= 6 && v.2 >= 12 {
        v = (v.0 - 4, v.1 - 6, v.2 - 12);
        steps += 1;
    }
    (v, steps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberLocation {
    Zero,
    Infinity,
    /// The roots of an irreducible-or-not factor over ℚ; `count` fibres.
    Roots { factor: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub location: FiberLocation,
    pub kind: KodairaType,
    pub count: u32,
    /// `(ord g₂, ord g₃, ord disc)` before minimalization.
    pub valuations: (u32, u32, u32),
    /// How many `(4,6,12)` reductions were applied.
    pub reductions: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberConfiguration {
    pub fibers: Vec<Fiber>,
    pub euler_total: u32,
    /// The discriminant vanishes identically: no elliptic fibration.
    pub degenerate: bool,
}

impl FiberConfiguration {
    pub fn is_k3(&self) -> bool {
        !self.degenerate && self.euler_total == 24
    }

    /// Type counts, e.g. `IV* + 5I1 + I5*`: `y = 0` first, `y = ∞` last.
    pub fn summary(&self) -> String {
        if self.degenerate {
            return "degenerate".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut push = |k: KodairaType, n: u32| {
            if n == 1 {
                parts.push(k.to_string());
            } else {
                parts.push(format!("{n}{k}"));
            }
        };
        for f in self.fibers.iter().filter(|f| f.location == FiberLocation::Zero) {
            push(f.kind, f.count);
        }
        let mut finite: Vec<(KodairaType, u32)> = Vec::new();
        for f in self.fibers.iter().filter(|f| matches!(f.location, FiberLocation::Roots { .. })) {
            match finite.iter_mut().find(|(k, _)| *k == f.kind) {
                Some(e) => e.1 += f.count,
                None => finite.push((f.kind, f.count)),
            }
        }
        finite.sort_by_key(|(k, _)| (k.euler(), *k));
        for (k, n) in finite {
            push(k, n);
        }
        for f in self.fibers.iter().filter(|f| f.location == FiberLocation::Infinity) {
            push(f.kind, f.count);
        }
        parts.join(" + ")
    }
}

/// The base ring `ℚ[y]`.
pub fn base_ring() -> Vars {
    vars(&["y"])
}

fn uni(coeffs: &[Rational]) -> SparsePoly {
    SparsePoly::from_coeffs(&base_ring(), 0, coeffs)
}

fn r(n: i64) -> Rational {
    Rational::from(n)
}

/// `S(𝔄:𝔅:𝔆): z² = x³ − 4(4y³ − 5𝔄y²)x² + 20𝔅y³x + 𝔆y⁴` as `(a, b, c)`.
pub fn weighted_cubic(a: &Rational, b: &Rational, c: &Rational) -> [SparsePoly; 3] {
    let z = Rational::new();
    [
        uni(&[z.clone(), z.clone(), Rational::from(a * 20), r(-16)]),
        uni(&[z.clone(), z.clone(), z.clone(), Rational::from(b * 20)]),
        uni(&[z.clone(), z.clone(), z.clone(), z, c.clone()]),
    ]
}

/// The charts at `y = 0` and `y = ∞` of `S(X, Y)`.
pub fn weierstrass_data(x: &Rational, y: &Rational) -> Result<(WeierstrassChart, WeierstrassChart)> {
    let [a, b, c] = weighted_cubic(&r(1), x, y);
    let c0 = WeierstrassChart::from_cubic(&a, &b, &c, 0);
    let ci = c0.at_infinity()?;
    Ok((c0, ci))
}

/// The same charts over `ℚ[X, Y, y]`, for identities in the parameters.
pub fn symbolic_charts() -> Result<(WeierstrassChart, WeierstrassChart)> {
    let v = vars(&["X", "Y", "y"]);
    let p = |s: &str| SparsePoly::parse(&v, s).expect("fixed polynomial");
    let a = p("-4*y^2*(4*y-5)");
    let b = p("20*X*y^3");
    let c = p("Y*y^4");
    let c0 = WeierstrassChart::from_cubic(&a, &b, &c, 2);
    let ci = c0.at_infinity()?;
    Ok((c0, ci))
}

/// Yun's square-free decomposition: `p = c·Π fᵢ^i`, returned as `(i, fᵢ)`
/// with non-constant `fᵢ`.
pub fn squarefree(p: &SparsePoly) -> Vec<(u32, SparsePoly)> {
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    let dp = p.derivative(0);
    let a0 = gcd(p, &dp);
    let mut b = p.div_exact(&a0).expect("gcd divides");
    let mut c = dp.div_exact(&a0).expect("gcd divides");
    let mut d = c.sub(&b.derivative(0));
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((i, a.monic()));
        }
        b = b.div_exact(&a).expect("gcd divides");
        c = d.div_exact(&a).expect("gcd divides");
        d = c.sub(&b.derivative(0));
        i += 1;
    }
    out
}

/// Splits the roots of the square-free `f` by the order to which `g`
/// vanishes there.
fn split_by_order(f: &SparsePoly, g: &SparsePoly) -> Vec<(u32, SparsePoly)> {
    let mut out = Vec::new();
    if g.is_zero() {
        return vec![(u32::MAX, f.clone())];
    }
    let mut prev = f.clone();
    let mut deriv = g.clone();
    let mut k = 0;
    while !prev.is_constant() {
        // roots of prev are roots of f where g vanishes to order ≥ k
        let next = gcd(&prev, &deriv);
        let exact = prev.div_exact(&next).expect("gcd divides");
        if !exact.is_constant() {
            out.push((k, exact.monic()));
        }
        prev = next;
        deriv = deriv.derivative(0);
        k += 1;
    }
    out
}

fn deg(p: &SparsePoly) -> u32 {
    p.degree_in(0).unwrap_or(0)
}

fn classify_point(v: (u32, u32, u32)) -> Result<(KodairaType, u32)> {
    let (m, steps) = minimalize(v);
    Ok((kodaira_type(m.0, m.1, m.2)?, steps))
}

/// Classifies all singular fibres of `z² = x³ + ax² + bx + c` over `ℚ[y]`
/// exactly: the two charts at `0`, `∞` by valuations, and the other finite
/// fibres via square-free factors of the discriminant with the orders of
/// `g₂`, `g₃` along each factor.
pub fn classify_cubic(a: &SparsePoly, b: &SparsePoly, c: &SparsePoly) -> Result<FiberConfiguration> {
    let c0 = WeierstrassChart::from_cubic(a, b, c, 0);
    if c0.disc.is_zero() {
        return Ok(FiberConfiguration { fibers: Vec::new(), euler_total: 0, degenerate: true });
    }
    let ci = c0.at_infinity()?;
    let mut fibers = Vec::new();
    for (chart, loc) in [(&c0, FiberLocation::Zero), (&ci, FiberLocation::Infinity)] {
        let (v2, v3, vd) = chart.valuations();
        let v = (v2.unwrap_or(u32::MAX / 2), v3.unwrap_or(u32::MAX / 2), vd.unwrap());
        let (kind, reductions) = classify_point(v)?;
        if kind != KodairaType::Smooth {
            fibers.push(Fiber { location: loc, kind, count: 1, valuations: v, reductions });
        }
    }
    let (_, rest) = c0.disc.split_power(0);
    for (m, f) in squarefree(&rest) {
        for (k2, f2) in split_by_order(&f, &c0.g2) {
            for (k3, f3) in split_by_order(&f2, &c0.g3) {
                let v = (k2.min(u32::MAX / 2), k3.min(u32::MAX / 2), m);
                let (kind, reductions) = classify_point(v)?;
                fibers.push(Fiber {
                    location: FiberLocation::Roots { factor: f3.to_string() },
                    kind,
                    count: deg(&f3),
                    valuations: v,
                    reductions,
                });
            }
        }
    }
    let euler_total = fibers.iter().map(|f| f.kind.euler() * f.count).sum();
    Ok(FiberConfiguration { fibers, euler_total, degenerate: false })
}

/// Fibres of `S(X, Y)`.
pub fn classify_fibers(x: &Rational, y: &Rational) -> Result<FiberConfiguration> {
    classify_weighted(&r(1), x, y)
}

/// Fibres of `S(𝔄:𝔅:𝔆)`.
pub fn classify_weighted(a: &Rational, b: &Rational, c: &Rational) -> Result<FiberConfiguration> {
    let [pa, pb, pc] = weighted_cubic(a, b, c);
    classify_cubic(&pa, &pb, &pc)
}

/// Fibres of `S(l): z′² = x′³ − 16l·y′³x′² + 20y′³x′ + y′⁴`.
pub fn classify_boundary_family(l: &Rational) -> Result<FiberConfiguration> {
    let z = Rational::new();
    let a = uni(&[z.clone(), z.clone(), z.clone(), Rational::from(l * -16)]);
    let b = uni(&[z.clone(), z.clone(), z.clone(), r(20)]);
    let c = uni(&[z.clone(), z.clone(), z.clone(), z, r(1)]);
    classify_cubic(&a, &b, &c)
}

/// `(X, Y) = (25μ / 2(λ−1/4)³, −3125μ² / (λ−1/4)⁵)`.
pub fn lambda_mu_to_xy(lambda: &ComplexValue, mu: &ComplexValue) -> (ComplexValue, ComplexValue) {
    let s = lambda - ComplexValue::from_rational(lambda.prec(), &Rational::from((1, 4)));
    let x = mu.scale(&Rational::from((25, 2))) / s.powu(3);
    let y = mu.square().scale_i64(-3125) / s.powu(5);
    (x, y)
}

/// `λμ(λ²(4λ−1)³ − 2(2 + 25λ(20λ−1))μ − 3125μ²)`, nonzero exactly on `Λ`.
pub fn lambda_domain_poly(lambda: &ComplexValue, mu: &ComplexValue) -> ComplexValue {
    let p = lambda.prec();
    let one = ComplexValue::one(p);
    let t = lambda.scale_i64(4) - &one;
    let inner = ComplexValue::from_i64(p, 2) + (lambda * (lambda.scale_i64(20) - &one)).scale_i64(25);
    let q = lambda.square() * t.powu(3) - (inner * mu).scale_i64(2) - mu.square().scale_i64(3125);
    lambda * mu * q
}

/// Pulls a point of `S₁(X, Y)` over `(x₁, y₁)` back to `S₀(λ, μ)` and
/// returns the relative residual of the `S₀` equation there.
pub fn birational_transport(
    lambda: &ComplexValue,
    mu: &ComplexValue,
    x1: &ComplexValue,
    y1: &ComplexValue,
    tol: f64,
) -> Result<f64> {
    let scale = 1.0f64.max(lambda.abs_f64()).max(mu.abs_f64());
    if lambda_domain_poly(lambda, mu).abs_f64() <= tol * scale.powi(6) {
        return Err(Error::OutsideDomain("(λ, μ) is not in Λ".into()));
    }
    let (x, y) = lambda_mu_to_xy(lambda, mu);
    let xy = &x * &y;
    // z₁² = Y(x₁³ − 4y₁²(4y₁−5)x₁² + 20Xy₁³x₁ + Yy₁⁴)
    let cubic = x1.powu(3) - (y1.square() * (y1.scale_i64(4) - ComplexValue::from_i64(y1.prec(), 5)) * x1.square()).scale_i64(4)
        + (&x * y1.powu(3) * x1).scale_i64(20)
        + &y * y1.powu(4);
    let z1 = (&y * cubic).sqrt();
    let guard = |d: &ComplexValue| -> Result<()> {
        if d.abs_f64() < tol {
            Err(Error::DegenerateSample)
        } else {
            Ok(())
        }
    };
    let d0 = (&x * x1).scale_i64(10);
    let d1 = (&x * &xy * x1 * y1).scale_i64(-50) - (&xy * &y * y1.square()).scale_i64(5) + (&xy * &z1).scale_i64(5);
    let d2 = (&xy * x1 * y1).scale_i64(20);
    guard(&d0)?;
    guard(&d1)?;
    guard(&d2)?;
    let x0 = &y * y1 / &d0;
    let y0 = (y.square() * x1 * y1.square()).scale_i64(4) / &d1;
    let z0 = -((&xy * x1 * y1).scale_i64(10) + y.square() * y1.square() - &y * &z1) / &d2;
    let base = &x0 * &y0 * z0.square();
    let terms = [&base * &x0, &base * &y0, &base * &z0, base.clone(), lambda * &x0 * &y0 * &z0, mu.clone()];
    let s = terms.iter().map(|t| t.abs_f64()).fold(0.0, f64::max);
    let sum = terms.iter().skip(1).fold(terms[0].clone(), |a, t| a + t);
    Ok(sum.abs_f64() / s)
}

/// `z² − (x³ − 4(4y³ − 5𝔄y²)x² + 20𝔅y³x + 𝔆y⁴)` over `ℚ[x, y, z, A, B, C]`.
pub fn weighted_surface_equation() -> SparsePoly {
    let v = vars(&["x", "y", "z", "A", "B", "C"]);
    SparsePoly::parse(&v, "z^2 - (x^3 - 4*(4*y^3 - 5*A*y^2)*x^2 + 20*B*y^3*x + C*y^4)").expect("fixed polynomial")
}
