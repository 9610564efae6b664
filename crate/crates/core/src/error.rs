//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset construction, model evaluation, training,
/// and the Monte-Carlo bound checks.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration failed validation.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// A dataset or checkpoint file failed to parse; `line` is 1-based.
    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: u64,
        msg: String,
    },

    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Not enough positive rows to draw the requested labeled sample.
    #[error("dataset `{name}` has {available} positive rows, need {needed}")]
    InsufficientPositives {
        name: String,
        needed: usize,
        available: usize,
    },

    /// Training produced a non-finite value; the run is aborted rather
    /// than silently clamped.
    #[error("non-finite {term} at epoch {epoch}")]
    NonFinite { epoch: usize, term: &'static str },

    /// The margin assumption behind the bound checks could not be
    /// certified against the reference negative risk.
    #[error(
        "alpha margin {alpha} rejected: must be <= {max_certifiable} \
         (0.9 * (1 - pi_p) * reference negative risk {risk_estimate})"
    )]
    UncertifiedAlpha {
        alpha: f64,
        max_certifiable: f64,
        risk_estimate: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }

    pub(crate) fn parse(origin: &str, line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
