use super::eigen::eigh;
use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

/// Which tensor factor an operation acts on.
///
/// `X` is the untrusted (measuring) side, `Y` the trusted (steered) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    X,
    Y,
}

/// Trace-one positive semidefinite matrix on a declared `dX x dY` cut.
///
/// Basis order is `|x y>` with the trusted index `y` running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within `tol`.
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize), tol: &Tolerances) -> Result<Self> {
        check_dims(&matrix, dims)?;
        let defect = matrix.hermiticity_defect();
        if defect > tol.eps_eq.max(1e-12 * matrix.frobenius_norm()) {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("trace must be 1, got {tr}")));
        }
        let min = eigh(&matrix)?.min();
        if min < -tol.eps_psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims,
        })
    }

    /// Normalizes a positive semidefinite operator to unit trace.
    pub fn from_unnormalized(
        matrix: ComplexMatrix,
        dims: (usize, usize),
        tol: &Tolerances,
    ) -> Result<Self> {
        check_dims(&matrix, dims)?;
        let tr = matrix.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::ZeroTrace(tr));
        }
        Self::new(matrix.scale_real(1.0 / tr), dims, tol)
    }

    /// Wraps a matrix known to be a state by construction; only the shape is checked.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: (usize, usize)) -> Self {
        debug_assert_eq!(matrix.rows(), dims.0 * dims.1);
        Self {
            matrix: matrix.hermitian_part(),
            dims,
        }
    }

    pub fn two_qubit(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(matrix, (2, 2), tol)
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let n = dims.0 * dims.1;
        Self::new_unchecked(ComplexMatrix::identity(n).scale_real(1.0 / n as f64), dims)
    }

    pub fn pure(psi: &[C64], dims: (usize, usize)) -> Result<Self> {
        let psi = super::matrix::normalize(psi)?;
        if psi.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} on a {}x{} cut",
                psi.len(),
                dims.0,
                dims.1
            )));
        }
        Ok(Self::new_unchecked(ComplexMatrix::projector(&psi), dims))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == (2, 2)
    }

    /// Matrix element in the product basis, `<x y| rho |x' y'>`.
    pub fn entry(&self, x: usize, y: usize, xp: usize, yp: usize) -> C64 {
        let dy = self.dims.1;
        self.matrix[(x * dy + y, xp * dy + yp)]
    }

    /// Conjugation `M rho M^dagger`, renormalized to unit trace.
    pub fn transform(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::DimensionMismatch("transform operator size".into()));
        }
        let m = &(op * &self.matrix) * &op.adjoint();
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::ZeroTrace(tr));
        }
        Ok(Self::new_unchecked(m.scale_real(1.0 / tr), self.dims))
    }

    /// Reduced state of the trusted side.
    pub fn reduced_trusted(&self) -> ComplexMatrix {
        let (dx, dy) = self.dims;
        ComplexMatrix::from_fn(dy, dy, |i, j| (0..dx).map(|x| self.entry(x, i, x, j)).sum())
    }
}

fn check_dims(m: &ComplexMatrix, dims: (usize, usize)) -> Result<()> {
    let n = dims.0 * dims.1;
    if dims.0 == 0 || dims.1 == 0 || m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on a {}x{} cut",
            m.rows(),
            m.cols(),
            dims.0,
            dims.1
        )));
    }
    Ok(())
}
