//! Symmetric decompositions of self-adjoint operators on finite-dimensional
//! complex Hilbert spaces: construction, verification, bounds on the
//! parameters, dual families and Welch-type inequalities.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod construct;
pub mod dual;
pub mod error;
pub mod example_d2;
pub mod family;
pub mod hermitian;
pub mod io;
pub mod welch;

pub use error::{Error, Result};
pub use family::SymmetricFamily;
pub use hermitian::HermitianMatrix;
