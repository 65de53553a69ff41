use thiserror::Error;

/// Errors raised by the rough-path toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (shape mismatch, bad range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular element: {0}")]
    Singular(String),

    /// A numerical routine failed, e.g. a covariance factorization.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solution diverged on segment {segment} (|y| = {norm:e})")]
    Divergence { segment: usize, norm: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Contract(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
