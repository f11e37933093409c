use thiserror::Error;

/// Errors raised by the builders, engines and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("capacity exceeded: {what} needs {required}, limit is {limit}")]
    Capacity {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical validation failed: {0}")]
    Validation(String),

    #[error("krylov step error estimate {estimate:.3e} exceeds tolerance {tol:.3e} at dimension {krylov_dim}")]
    KrylovTolerance {
        estimate: f64,
        tol: f64,
        krylov_dim: usize,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
