use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{n} spins exceeds the enumeration limit of {limit}")]
    TooManySpins { n: usize, limit: usize },

    #[error("model has no couplings to normalize by")]
    ZeroCouplings,

    #[error("unknown fixture `{0}` (expected one of mot5, mot9, cut5, cut6)")]
    UnknownFixture(String),

    #[error("piece of length {piece} does not fit on a bar of length {bar}")]
    PieceTooLong { piece: u64, bar: u64 },

    #[error("equilibrium solver did not converge after {iterations} iterations (max force {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unstable ion configuration: Hessian eigenvalue {0:e} is not positive")]
    Unstable(f64),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
