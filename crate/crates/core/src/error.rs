use std::path::PathBuf;

/// Errors produced by the changepoint toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series value at t={index} is not finite")]
    NonFinite { index: usize },

    #[error("period must be at least 1")]
    InvalidPeriod,

    #[error("series of length {len} is too short; need at least {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("series of length {len} is not a whole number of cycles of period {period}")]
    PartialCycle { len: usize, period: usize },

    #[error("seasonal statistics need at least two complete cycles; got {cycles}")]
    FewerThanTwoCycles { cycles: usize },

    #[error("season {season} has zero sample variance")]
    NonPositiveVariance { season: usize },

    #[error("period mismatch: {left} vs {right}")]
    PeriodMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("start index mismatch: {left} vs {right}")]
    StartMismatch { left: i64, right: i64 },

    #[error("lag {lag} must be smaller than the series length {len}")]
    LagTooLarge { lag: usize, len: usize },

    #[error("normality test needs 3 <= n <= 5000; got {n}")]
    SampleSizeOutOfRange { n: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("autoregressive fit is not causal/stationary")]
    NonStationaryFit,

    #[error("model was fitted to a different series: {0}")]
    ModelSeriesMismatch(String),

    #[error("segment starting at t={start} has {len} observations; minimum is {min}")]
    SegmentTooShort { start: usize, len: usize, min: usize },

    #[error("invalid changepoint configuration: {0}")]
    InvalidConfig(String),

    #[error("search space too large for exhaustive enumeration: {0}")]
    ProblemTooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("missing value for year {year} inside the requested range")]
    MissingValueInRange { year: i64 },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed null table: {0}")]
    NullTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
