//! Hilbert modular functions for ℚ(√5) and the K3 family they uniformize:
//! Klein invariants, theta constants, Müller's forms, Kodaira fibres, the
//! period equations and the lattice data.

pub mod classical;
pub mod fibrations;
pub mod hypergeometric;
pub mod forms;
mod error;
pub mod theta;
pub mod klein;
pub mod lattice;
pub mod numeval;
pub mod pde;
pub mod points;

pub use error::{Error, Result};
pub use points::{Generator, UHPPair, UHPoint};
