//! Exact-arithmetic toolkit for tropical (min-plus) matrix factorization.
//!
//! The tropical semiring replaces (+, ·) with (min, +); the *factor rank*
//! of a matrix A is the least k admitting B (m×k) and C (k×n) with
//! B ⊗ C = A. This crate provides, all over exact rationals:
//!
//! - tropical scalar/matrix arithmetic, the tropical permanent and tropical
//!   rank, scaling normalization, and exact product verification
//!   ([`value`], [`matrix`], [`permanent`]);
//! - a feasibility solver for conjunctions of unit-coefficient constraints
//!   with at most two unknowns each, plus an independent elimination oracle
//!   ([`constraints`]);
//! - an exhaustive factor-rank oracle for tiny matrices ([`oracle`]);
//! - a polynomial-time decision procedure for factor rank ≤ 3 returning
//!   witness factorizations ([`rank3`]);
//! - constructions that encode set-splitting instances as matrices whose
//!   factor rank ≤ 8 mirrors the instance answer, with verifiable witness
//!   factorizations, bordering, infinity elimination, and integer witness
//!   normalization ([`reductions`]);
//! - square matrix families whose small minors all have factor rank ≤ 4
//!   while the full matrix does not ([`counterexamples`]).
//!
//! Matrices travel in a plain text format (`m n` header, then rows of
//! integer, `p/q`, or `inf` tokens); see [`text`]. The `troprank` binary
//! exposes every capability as a subcommand, and `examples/` holds one
//! runnable example per capability.

pub mod constraints;
pub mod counterexamples;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod permanent;
pub mod rank3;
pub mod reductions;
pub mod text;
pub mod value;

pub use error::{Error, Result};
pub use matrix::{
    factor_rank_le1, is_normalized, scale_normalize, trop_mat_mul, verify_product, Factorization,
    Scaling, TropMatrix,
};
pub use permanent::{tropical_permanent, tropical_rank, DEFAULT_ENUMERATION_CAP};
pub use value::{Rat, TropValue};
