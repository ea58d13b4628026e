//! Explicit constants of unitary Shimura varieties attached to an imaginary
//! quadratic field of odd discriminant: local representation densities,
//! Eisenstein coefficients, Borcherds weights, and complex and arithmetic
//! volumes, each with an independent cross-check.

pub mod arith;
pub mod borcherds;
pub mod cli;
pub mod densities;
pub mod dirichlet;
pub mod eisenstein;
pub mod error;
pub mod quad;
pub mod report;
pub mod selftest;
pub mod spaces;
pub mod volume;

pub use arith::{ComplexVal, Context, Integer, Jet, Rational, Real};
pub use error::{Error, Result};
