use thiserror::Error;

/// Errors raised by the dense numerics.
#[derive(Debug, Error)]
pub enum NumError {
    /// Operand shapes are incompatible with the requested operation.
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    /// An iterative factorization failed to converge.
    #[error("{op} did not converge after {iterations} iterations (index {index})")]
    NonConvergence {
        op: &'static str,
        iterations: usize,
        index: usize,
    },

    /// Non-finite values where finite ones are required.
    #[error("non-finite values in {op}: {detail}")]
    NonFinite { op: &'static str, detail: String },
}

impl NumError {
    pub fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        NumError::Dimension {
            op,
            detail: detail.into(),
        }
    }

    pub fn non_finite(op: &'static str, detail: impl Into<String>) -> Self {
        NumError::NonFinite {
            op,
            detail: detail.into(),
        }
    }
}
