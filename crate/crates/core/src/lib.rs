//! Natural Hamiltonian cellular automata over the Gaussian integers.
//!
//! * [`gaussian`]: exact scalars, vectors and matrices.
//! * [`automaton`]: the two-step evolution rule, its phase-space form, the
//!   action and the integer variational principle.
//! * [`conservation`]: two-point invariants and conservation audits.
//! * [`sampling`]: bandlimited reconstruction, finite-scale corrections,
//!   dispersion and a floating-point continuum oracle.
//! * [`multipartite`]: many-time composite fields, Bell states and an
//!   entanglement witness.

pub mod automaton;
pub mod conservation;
pub mod error;
pub mod gaussian;
pub mod multipartite;
pub mod random;
pub mod sampling;

pub use error::{Error, Result};
pub use gaussian::{GIMatrix, GIVector, GaussianInt, HermitianIntMatrix, IntMatrix};
