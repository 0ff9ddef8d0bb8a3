use thiserror::Error;

/// Errors raised by the model, Fisher, sampling, estimation and spin-chain layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("exact enumeration needs {entries} entries, cap is {cap}")]
    SizeOverflow { entries: u128, cap: usize },

    #[error("theta component {index} = {value} is within {margin} of its domain edge")]
    BoundaryTheta { index: usize, value: f64, margin: f64 },

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("asymptotic variance {0} is not positive")]
    InvalidVariance(f64),

    #[error("xi ratio is indeterminate: both Fisher informations vanish")]
    Indeterminate,

    #[error("trajectory of length {len} is too short for order {order}")]
    TooShort { len: usize, order: usize },

    #[error("log-likelihood is not finite anywhere in [{lo}, {hi}]")]
    NoFiniteLikelihood { lo: f64, hi: f64 },

    #[error("exponent {ratio} exceeds the overflow limit")]
    OverflowRisk { ratio: f64 },

    #[error("decomposition residual {residual:e} exceeds tolerance {tolerance:e}")]
    DecompositionMismatch { residual: f64, tolerance: f64 },

    #[error("{0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidModel(_)
                | Error::InvalidArgument(_)
                | Error::BoundaryTheta { .. }
                | Error::TooShort { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
