//! Exact Gaussian-integer scalars, vectors and matrices.
//!
//! Everything downstream (evolution, conservation audits, many-time fields)
//! is built from these types. Integers are arbitrary precision: modes with
//! `|E| > 2` grow exponentially under the two-step recurrence, and wrapping
//! arithmetic would silently corrupt every exactness check.
//!
//! Literal format: a scalar is `[re, im]` (a bare integer is accepted on
//! input as a real value); a vector is a list of scalars; a matrix is a
//! row-major list of rows.

mod matrix;
mod scalar;
mod vector;

pub use matrix::{GIMatrix, HermitianIntMatrix, IntMatrix};
pub use scalar::GaussianInt;
pub use vector::GIVector;

