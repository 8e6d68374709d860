//! Dense complex linear algebra shared by every other module.

mod density;
mod eigen;
mod matrix;
mod ops;

pub use density::{Cut, DensityMatrix};
pub use eigen::{eigh, min_eigenvalue, HermitianSpectrum};
pub use matrix::{basis_vector, c, inner, kron_vec, norm, normalize, r, ComplexMatrix, C64};
pub use ops::{
    conditional_state, partial_transpose, psd_cholesky3, support_kernel_projectors, swap_parties,
    unitary_completion, unitary_with_column, untrusted_block, SupportKernel,
};

pub(crate) use matrix::{ONE, ZERO};

use crate::error::{Error, Result};

/// Numerical thresholds used across the library.
///
/// `eps_zero` is applied relative to a trace, `eps_psd` bounds the negative
/// eigenvalue magnitude accepted as positive, `eps_eq` bounds Frobenius
/// distances treated as equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_zero: f64,
    pub eps_psd: f64,
    pub eps_eq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_zero: 1e-9,
            eps_psd: 1e-10,
            eps_eq: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(eps_zero: f64, eps_psd: f64, eps_eq: f64) -> Result<Self> {
        let t = Self {
            eps_zero,
            eps_psd,
            eps_eq,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_zero", self.eps_zero),
            ("eps_psd", self.eps_psd),
            ("eps_eq", self.eps_eq),
        ] {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1e-3), got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_eps_zero(mut self, eps_zero: f64) -> Result<Self> {
        self.eps_zero = eps_zero;
        self.validate()?;
        Ok(self)
    }
}
