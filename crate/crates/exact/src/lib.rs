//! Exact arithmetic over ℚ: sparse polynomials, rational functions,
//! truncated (log-)series and linear differential operators.

pub mod diffop;
mod error;
pub mod frobenius;
mod parse;
pub mod poly;
pub mod ratfunc;
pub mod series;

pub use diffop::{rational_roots, DiffOperator, Point};
pub use error::ExactError;
pub use frobenius::{residual, series_solve};
pub use parse::{parse_decimal, parse_rational};
pub use poly::{gcd, vars, Monomial, SparsePoly, Vars};
pub use ratfunc::RationalFunction;
pub use series::{FormalSeries, LogSeries};
pub use rug;
