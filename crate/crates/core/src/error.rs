use alloc::string::String;

use chrono::NaiveDate;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    // market data
    #[error("non-positive price {value} in field `{field}` on {date}")]
    NonPositivePrice {
        date: NaiveDate,
        field: &'static str,
        value: f64,
    },
    #[error("negative volume {value} on {date}")]
    NegativeVolume { date: NaiveDate, value: f64 },
    #[error("inconsistent OHLC range on {date}: {detail}")]
    InconsistentBar { date: NaiveDate, detail: &'static str },
    #[error("dates not strictly increasing: {previous} followed by {next}")]
    NonMonotonicDates { previous: NaiveDate, next: NaiveDate },
    #[error("insufficient data: need {needed}, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("normalizer range is degenerate (min = max = {value})")]
    ZeroRange { value: f64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("indicator `{name}` is not aligned with the return dates")]
    MisalignedIndicator { name: String },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    // environment
    #[error("episode already finished")]
    EpisodeFinished,

    // neural net
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("masked loss selects no elements")]
    EmptySelection,

    // metrics
    #[error("return {value} at position {index} is at or below -100%")]
    ReturnBelowTotalLoss { index: usize, value: f64 },
    #[error("sell of {requested} shares on {date} exceeds open position of {open}")]
    OversizedSell {
        date: NaiveDate,
        requested: u64,
        open: u64,
    },
    #[error("inconsistent dates: {0}")]
    InconsistentDates(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
