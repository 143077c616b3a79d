use thiserror::Error;

/// Errors raised by the geometry, projection and coreset routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: at least one point is required")]
    EmptyInput,

    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("zero direction vector")]
    ZeroDirection,

    #[error("eps must lie in (0, 1), got {0}")]
    EpsOutOfRange(f64),

    #[error("delta must lie in (0, 1], got {0}")]
    DeltaOutOfRange(f64),

    #[error("empty candidate set")]
    EmptySelection,

    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("invalid gram matrix: {0}")]
    InvalidGram(String),

    #[error("operation needs explicit coordinates, but only a gram matrix is available")]
    NeedsCoordinates,

    #[error("no approximation possible: the eps-shadow of point {point} contains no candidate")]
    NoApproximation { point: usize },

    #[error("instance too large for the exact oracle ({subsets} candidate faces, limit {limit})")]
    OracleLimit { subsets: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsOutOfRange(eps))
    }
}
