use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix {index} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { index: usize, defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not orthogonal: |U^T U - I| = {defect:.3e}")]
    NotOrthogonal { defect: f64 },

    #[error("localizer is singular at this probe point (gap {gap:.3e} <= tolerance {tol:.3e})")]
    SingularLocalizer { gap: f64, tol: f64 },

    #[error("signature {signature} is odd; index undefined (check the Clifford orientation)")]
    OddSignature { signature: i64 },

    #[error("iterative eigensolver did not converge after {iterations} basis vectors (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("block factorization broke down in block {block} (pivot {pivot:.3e})")]
    Breakdown { block: usize, pivot: f64 },

    #[error("ray starts on the Clifford spectrum (gap at origin {gap:.3e} <= eps {eps:.3e})")]
    RayStartsOnSpectrum { gap: f64, eps: f64 },

    #[error("dense eigendecomposition failed: {0}")]
    Eigendecomposition(String),
}

impl Error {
    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularLocalizer { .. }
                | Error::OddSignature { .. }
                | Error::NotConverged { .. }
                | Error::Breakdown { .. }
                | Error::RayStartsOnSpectrum { .. }
                | Error::Eigendecomposition(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
