use thiserror::Error;

/// Errors raised by the model, the conic layer and the design algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("power-splitting ratio {value} of user {user} is outside [0, 1]")]
    InvalidRatio { user: usize, value: f64 },

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid conic program: {0}")]
    InvalidProgram(String),

    #[error("{0} is infeasible")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("rank-one recovery failed: all {trials} candidates were infeasible")]
    RecoveryFailed { trials: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
