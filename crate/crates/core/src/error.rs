use thiserror::Error;

/// Errors raised by system construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FisherError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Gram matrix was not numerically positive definite. Retrying with a
    /// larger damping usually fixes this.
    #[error("factorization failed at pivot {pivot}: matrix is not numerically positive definite")]
    FactorizationFailed { pivot: usize },

    #[error("{routine} did not converge")]
    NoConvergence { routine: &'static str },

    /// The dense oracle was asked to form an m x m matrix beyond its cap.
    #[error("dense solve refused: m = {m} exceeds the cap of {cap}")]
    OracleCapExceeded { m: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, FisherError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FisherError::InvalidArgument(msg.into()))
}
