//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A field could not be parsed. `line` is 1-based and counts the header.
    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Quarterly periods are not contiguous.
    #[error("period gap: missing {}", .missing.join(", "))]
    Gap { missing: Vec<String> },

    /// Non-finite values, empty inputs, duplicated periods, bad headers.
    #[error("data error: {0}")]
    Data(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("alignment error: {0}")]
    Alignment(String),

    /// Every point carrying prior mass has infinite risk.
    #[error("degenerate Gibbs weights: {0}")]
    Degenerate(String),

    /// No importance draw landed inside the prior support.
    #[error(
        "importance sampler coverage: none of {samples} draws fell inside the L1 ball of radius {radius}; \
         increase the proposal variance or recenter the proposal"
    )]
    Coverage { samples: usize, radius: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
