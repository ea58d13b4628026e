//! Exact rationals, tagged arbitrary-precision reals, jets, and the
//! elementary number theory shared by every other module.

pub mod bernoulli;
pub mod forms;
pub mod jet;
pub mod ntheory;
pub mod real;

pub use jet::Jet;
pub use real::{pairwise_sum, ComplexVal, Context, Real};
pub use rug::{Integer, Rational};
