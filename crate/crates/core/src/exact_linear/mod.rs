//! Exact rational and integer linear algebra.
//!
//! Everything above this module works over [`Rational`] (arbitrary precision)
//! or small integer vectors; no floating point is used anywhere.

mod lattice;
mod matrix;
mod rational;

pub use lattice::{
    determinant, hermite_normal_form, primitivize, primitive_integer_direction, smith_normal_form,
    IntegerMatrix, SmithForm,
};
pub use matrix::{inverse, kernel_basis, rank, rref, solve_rational, LinearSolution};
pub use rational::{
    decimal_string, dot, dot_int, int, lcm_of_denominators, parse_rational, ratio, serde_rational,
    serde_rational_vec, serde_rational_vecs, to_rational_vec, Rational,
};

/// Integer point of `M` or `N`; ray generators and lattice points use this.
pub type IntVec = Vec<i64>;

/// Rational point of `M_Q` or `N_Q`.
pub type QVec = Vec<Rational>;
