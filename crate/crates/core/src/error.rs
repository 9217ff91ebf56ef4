use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A size guard tripped (enumeration cap, product-channel cap, optimizer dimensionality).
    #[error("{what} requires {required} but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: f64,
        cap: u64,
    },

    #[error("side information has zero probability: {0}")]
    ZeroProbability(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Two independent evaluation routes of the same quantity disagree.
    #[error("{what}: routes disagree ({first} vs {second}, tolerance {tolerance})")]
    RouteDisagreement {
        what: &'static str,
        first: f64,
        second: f64,
        tolerance: f64,
    },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("empty corpus after filtering")]
    EmptyCorpus,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for guard violations (caps, dimensionality) as opposed to bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
