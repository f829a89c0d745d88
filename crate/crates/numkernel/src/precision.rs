use crate::NumError;

/// Environment variable consulted for the default mantissa width.
pub const PREC_ENV: &str = "HILBK3_PREC";

pub const DEFAULT_BITS: u32 = 128;
pub const MIN_BITS: u32 = 53;

/// Working precision together with the two tolerances every numeric routine
/// is judged against.
///
/// `series_tol` is the accuracy claimed for truncated series; `verify_tol` is
/// the acceptance threshold for identities. The defaults claim three quarters
/// of the mantissa for series and half of it for identities, which leaves room
/// for cancellation in the theta-product formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionPolicy {
    bits: u32,
    series_tol: f64,
    verify_tol: f64,
    term_cap: usize,
}

impl PrecisionPolicy {
    pub fn new(bits: u32) -> Result<Self, NumError> {
        if bits < MIN_BITS {
            return Err(NumError::Precision(format!(
                "mantissa of {bits} bits is below the minimum of {MIN_BITS}"
            )));
        }
        let series_tol = (-(3.0 * bits as f64) / 4.0).exp2();
        let verify_tol = (-(bits as f64) / 2.0).exp2();
        Self::with_tolerances(bits, series_tol, verify_tol)
    }

    pub fn with_tolerances(bits: u32, series_tol: f64, verify_tol: f64) -> Result<Self, NumError> {
        if bits < MIN_BITS {
            return Err(NumError::Precision(format!(
                "mantissa of {bits} bits is below the minimum of {MIN_BITS}"
            )));
        }
        let floor = (8.0 - bits as f64).exp2();
        if !(series_tol >= floor) {
            return Err(NumError::Precision(format!(
                "series tolerance {series_tol:e} is below 2^(8-{bits})"
            )));
        }
        if !(verify_tol >= 10.0 * series_tol) {
            return Err(NumError::Precision(format!(
                "verify tolerance {verify_tol:e} is below ten times the series tolerance"
            )));
        }
        Ok(PrecisionPolicy { bits, series_tol, verify_tol, term_cap: 1 << 20 })
    }

    /// Reads `HILBK3_PREC`, falling back to 128 bits when unset.
    pub fn from_env() -> Result<Self, NumError> {
        match std::env::var(PREC_ENV) {
            Ok(s) => {
                let bits = s.trim().parse::<u32>().map_err(|_| {
                    NumError::Precision(format!("{PREC_ENV}={s:?} is not a bit count"))
                })?;
                Self::new(bits)
            }
            Err(_) => Self::new(DEFAULT_BITS),
        }
    }

    pub fn with_term_cap(mut self, cap: usize) -> Self {
        self.term_cap = cap.max(1);
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn verify_tol(&self) -> f64 {
        self.verify_tol
    }

    pub fn term_cap(&self) -> usize {
        self.term_cap
    }

    /// Truncation target for lattice and q-series sums: one unit in the last
    /// place, so that truncation never dominates rounding.
    pub fn truncation_tol(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    /// The same policy at twice the mantissa width.
    pub fn doubled(&self) -> Self {
        Self::new(self.bits * 2).expect("doubling a valid precision stays valid")
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self::new(DEFAULT_BITS).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_respect_invariants() {
        for bits in [53, 64, 128, 256, 512] {
            let p = PrecisionPolicy::new(bits).unwrap();
            assert!(p.series_tol() >= (8.0 - bits as f64).exp2());
            assert!(p.verify_tol() >= 10.0 * p.series_tol());
        }
    }

    #[test]
    fn rejects_bad_tolerances() {
        assert!(PrecisionPolicy::new(40).is_err());
        assert!(PrecisionPolicy::with_tolerances(128, 1e-60, 1e-20).is_err());
        assert!(PrecisionPolicy::with_tolerances(128, 1e-30, 1e-30).is_err());
        assert!(PrecisionPolicy::with_tolerances(128, 1e-30, 1e-28).is_ok());
    }
}
