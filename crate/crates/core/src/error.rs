//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the rate engine.
///
/// `InvalidInput` covers precondition and configuration violations (CLI exit
/// code 1); everything else is a computation failure (exit code 2).
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid input `{field}`: {constraint}")]
    InvalidInput { field: String, constraint: String },

    #[error("unknown configuration key: {0}")]
    UnknownKey(String),

    #[error("eigensolver failed to converge: {0}")]
    EigenFailure(String),

    #[error("quadrature did not converge: estimated residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureNotConverged { residual: f64, tolerance: f64 },

    #[error("unphysical result: {0}")]
    Unphysical(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("step size underflow during integration at t = {0}")]
    StepUnderflow(f64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EngineError {
    pub fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        EngineError::InvalidInput {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    /// Exit code for the CLI contract: 1 validation, 2 computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::InvalidInput { .. } | EngineError::UnknownKey(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
