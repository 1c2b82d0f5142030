use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("potential is not finite at r = {r:e}; raise r_min or check the model parameters")]
    NonFinitePotential { r: f64 },

    #[error("inverse iteration did not converge for eigenpair {index}")]
    ConvergenceFailure { index: usize },

    #[error("cannot normalize a function that vanishes identically")]
    ZeroFunction,

    #[error("invalid eigen request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
