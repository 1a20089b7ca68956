//! Lower bounds for band-limited functions restricted to thick sets.
//!
//! The crate evaluates closed-form bounds, computes exact `p = 2` constants
//! from concentration eigenvalues, and stress-tests both on random and
//! near-extremal functions.

pub mod bandlimited;
pub mod bounds;
pub mod cli;
pub mod concentration;
pub mod eigen;
pub mod precise;
pub mod proofcheck;
pub mod error;
pub mod extremal;
pub mod quadrature;
pub mod sets;
pub mod stats;

pub use error::{Error, Result};
