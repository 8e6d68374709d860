//! Certification of NPT entanglement and projective EPR steering through
//! boundary contacts of the trusted conditional states.
//!
//! The untrusted (measuring) side is always the first tensor factor `X`, the
//! trusted (steered) side the second factor `Y`. Product basis vectors are
//! ordered `|x y>` with `y` running fastest.

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod certify;
pub mod error;
pub mod families;
pub mod io;
pub mod lhslab;
pub mod matcore;
pub mod nullspace;
pub mod sampling;
pub mod scaling;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, Cut, DensityMatrix, Tolerances, C64};
