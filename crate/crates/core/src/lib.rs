//! Exact computations with torus-invariant Weil divisors on normal toric
//! varieties: section polytopes, Cartier and Q-Cartier detection, global
//! generation, quasi-nefness, Q-Cartierizing refinements, quasi-nef
//! thresholds, asymptotic pullbacks and minimal log discrepancies.

pub mod divisor;
pub mod error;
pub mod exact_linear;
pub mod fan;
pub mod gallery;
pub mod mld;
pub mod polyhedra;
pub mod qnef;
pub mod random;

pub use error::{Error, Result};
