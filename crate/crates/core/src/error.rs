use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("trace must be positive, got {0:.3e}")]
    ZeroTrace(f64),
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("vector is not normalized (norm {0:.6})")]
    NotNormalized(f64),
    #[error("zero vector")]
    ZeroVector,
    #[error("zero operator")]
    ZeroOperator,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vectors are linearly dependent")]
    LinearlyDependent,
    #[error("vectors are not orthonormal (overlap {0:.3e})")]
    NotOrthonormal(f64),
    #[error("matrix is singular")]
    Singular,
    #[error("product-null residual {0:.3e} exceeds tolerance")]
    ResidualTooLarge(f64),
    #[error("input is not in product-null standard form (|01> weight {0:.3e})")]
    NotStandardForm(f64),
    #[error("contact is not pure (rank {0})")]
    NotPureContact(usize),
    #[error("vector not in the claimed subspace: {0}")]
    NotInSubspace(String),
    #[error("empty fit window")]
    EmptyWindow,
    #[error("too many settings: {0} (limit {1})")]
    TooManySettings(usize, usize),
    #[error("problem too large: {0} variables (limit {1})")]
    ProblemTooLarge(usize, usize),
    #[error("simplex iteration cap of {0} exceeded")]
    IterationCap(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
