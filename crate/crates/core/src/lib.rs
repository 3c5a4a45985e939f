//! Frobenius singularity checks for square-free supported polynomials over
//! finite fields.
//!
//! The crate factors a square-free supported polynomial into its
//! variable-disjoint irreducible factors, tests F-splitting with Fedder's
//! criterion, builds and verifies strong F-regularity certificates, and
//! reports multiplicity, dfpt and fpt at points of the zero set.

pub mod error;
pub mod field;
pub mod frobenius;
pub mod input;
pub mod invariants;
pub mod modification;
pub mod poly;
pub mod report;
pub mod structure;
pub mod suite;

pub use error::{Error, Hypothesis, Result};
