use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters for `{model}`: {reason}")]
    InvalidParameter { model: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: value {value:e}, achieved error {achieved:e}, requested {requested:e}")]
    NonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("variance-type quantity is negative beyond rounding: {0:e}")]
    NegativeVariance(f64),

    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(model: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            model: model.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::NegativeVariance(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
