use std::fmt;

use hilbk3_numkernel::{ComplexValue, QuadraticConstants};

use crate::{Error, Result};

/// A point of the upper half plane.
#[derive(Clone, Debug)]
pub struct UHPoint {
    z: ComplexValue,
}

impl UHPoint {
    pub fn new(z: ComplexValue) -> Result<Self> {
        if !z.im().is_sign_positive() || z.im().is_zero() || !z.is_finite() {
            return Err(Error::InvalidPoint(z.to_string()));
        }
        Ok(UHPoint { z })
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Result<Self> {
        Self::new(ComplexValue::from_f64(prec, re, im))
    }

    pub fn z(&self) -> &ComplexValue {
        &self.z
    }

    pub fn prec(&self) -> u32 {
        self.z.prec()
    }
}

/// `(z₁, z₂) ∈ ℍ × ℍ`.
#[derive(Clone, Debug)]
pub struct UHPPair {
    pub z1: ComplexValue,
    pub z2: ComplexValue,
}

/// The four generators of `⟨PSL(2,𝒪), τ⟩` used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `z ↦ z + 1`
    G1,
    /// `z ↦ z + ε` with `ε′` in the second slot
    G2,
    /// `z ↦ −1/z`
    G3,
    /// `(z₁, z₂) ↦ (z₂, z₁)`
    Tau,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::G1, Generator::G2, Generator::G3, Generator::Tau];

    pub fn name(self) -> &'static str {
        match self {
            Generator::G1 => "g1",
            Generator::G2 => "g2",
            Generator::G3 => "g3",
            Generator::Tau => "tau",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl UHPPair {
    pub fn new(z1: ComplexValue, z2: ComplexValue) -> Result<Self> {
        UHPoint::new(z1.clone())?;
        UHPoint::new(z2.clone())?;
        Ok(UHPPair { z1, z2 })
    }

    pub fn from_f64(prec: u32, z1: (f64, f64), z2: (f64, f64)) -> Result<Self> {
        Self::new(ComplexValue::from_f64(prec, z1.0, z1.1), ComplexValue::from_f64(prec, z2.0, z2.1))
    }

    /// The diagonal point `(z, z)`.
    pub fn diagonal(z: &UHPoint) -> Self {
        UHPPair { z1: z.z().clone(), z2: z.z().clone() }
    }

    pub fn prec(&self) -> u32 {
        self.z1.prec()
    }

    pub fn swap(&self) -> Self {
        UHPPair { z1: self.z2.clone(), z2: self.z1.clone() }
    }

    pub fn act(&self, g: Generator) -> Self {
        let p = self.prec();
        match g {
            Generator::G1 => {
                let one = ComplexValue::one(p);
                UHPPair { z1: &self.z1 + &one, z2: &self.z2 + &one }
            }
            Generator::G2 => {
                let k = QuadraticConstants::new(p);
                UHPPair {
                    z1: &self.z1 + &k.eps,
                    z2: &self.z2 + &k.eps_conj,
                }
            }
            Generator::G3 => UHPPair { z1: -self.z1.recip(), z2: -self.z2.recip() },
            Generator::Tau => self.swap(),
        }
    }
}

impl fmt::Display for UHPPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.z1, self.z2)
    }
}
