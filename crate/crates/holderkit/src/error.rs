use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} outside model domain [0, {max}]")]
    OutOfDomain { t: f64, max: f64 },

    #[error("negative increment variance {value:.3e} at ({s}, {t}) beyond round-off tolerance")]
    NumericalInconsistency { s: f64, t: f64, value: f64 },

    #[error("quadrature did not converge: estimated error {err:.3e} exceeds tolerance {tol:.3e}")]
    QuadratureNonConvergence { err: f64, tol: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("operation not applicable: {0}")]
    Capability(String),

    #[error("matrix not positive definite even with jitter {max_jitter:.3e}")]
    NotPositiveDefinite { max_jitter: f64 },

    #[error("circulant embedding failed: relative negative eigenvalue mass {mass:.3e} exceeds tolerance")]
    Embedding { mass: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
