//! Prediction regions for continuous-time Markov chains with uncertain rates.

pub mod checker;
pub mod expr;
pub mod model;
pub mod sampling;
pub mod scalar;
pub mod scenario;

pub use scalar::{Rational, Real, Scalar};
