use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u8, u8),

    #[error("level {0} exceeds the supported maximum {max}", max = crate::algebra::MAX_LEVEL)]
    LevelTooHigh(u32),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not symmetric: |b[{row}][{col}] - b[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("block {block}: matrix is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { block: usize, eigenvalue: f64 },

    #[error("block {block}: coefficient a must be nonzero")]
    ZeroCoefficient { block: usize },

    #[error("condition (alpha) fails for block(s) {blocks:?}")]
    Inadmissible { blocks: Vec<usize> },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("time {0} is below the smallest supported positive time {min}", min = crate::kernel::MIN_TIME)]
    TimeTooSmall(f64),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("insufficient grid resolution: {0}")]
    InsufficientResolution(String),

    #[error("coordinate subset is empty")]
    EmptySubset,

    #[error("coordinate {coord} out of range 1..={n}")]
    CoordinateOutOfRange { coord: usize, n: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed kernel file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
