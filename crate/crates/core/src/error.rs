use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("enumeration of {count} elements exceeds the cap of {cap}")]
    CapExceeded { cap: u64, count: String },

    #[error("coordinate {value} at index {index} is outside [{lo}, {hi}]")]
    CoordinateOutOfRange {
        index: usize,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("degenerate set: {0}")]
    DegenerateSet(&'static str),

    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}
