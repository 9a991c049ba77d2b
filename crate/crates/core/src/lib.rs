//! Numerical toolkit for Gevrey asymptotic expansions.
//!
//! * [`series`]: exact Bernoulli, Binet-Taylor and Stirling coefficients.
//! * [`sector`]: sectors, half-planes, Borel-plane regions and uniqueness checkers.
//! * [`engine`]: partial sums, remainder bounds, optimal truncation, estimate verification.
//! * [`borel`]: Borel transform, Padé continuation and Laplace reconstruction.
//! * [`stirling`]: the Binet function, `K(z)`, `ln Gamma` and the Stirling error claims.

pub mod borel;
pub mod engine;
pub mod error;
pub mod quad;
pub mod sector;
pub mod series;
pub mod stirling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
