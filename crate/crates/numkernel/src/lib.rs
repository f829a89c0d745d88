//! Arbitrary-precision complex arithmetic shared by the hilbk3 crates.
//!
//! Values are backed by MPFR/MPC through `rug`. Every routine takes its
//! precision either from its inputs or from a [`PrecisionPolicy`].

mod complex;
mod constants;
mod error;
mod precision;
mod series;
pub mod svd;

pub use complex::{cmp_abs, pi, ComplexValue};
pub use constants::QuadraticConstants;
pub use error::NumError;
pub use precision::{PrecisionPolicy, DEFAULT_BITS, MIN_BITS, PREC_ENV};
pub use rug;
pub use series::{poly_geometric_tail, sum_series, sum_series_tol, SeriesSum};
