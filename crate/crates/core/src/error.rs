use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{elem} is not invertible in {ring}")]
    NotInvertible { ring: String, elem: String },

    #[error("`{op}` is not supported over {ring}")]
    UnsupportedRing { op: &'static str, ring: String },

    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    /// Elimination over a ring with zero divisors reached a column whose
    /// candidate pivots are all non-units.
    #[error("indeterminate over {ring}: no invertible pivot (candidate {pivot})")]
    Indeterminate { ring: String, pivot: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
