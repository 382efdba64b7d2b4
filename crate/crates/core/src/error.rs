use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),
    #[error("configuration shape mismatch: expected {expected} rows, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("index {index} out of range {min}..={max}")]
    IndexOutOfRange {
        index: usize,
        min: usize,
        max: usize,
    },
    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("CSV parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("invalid shell selection: {0}")]
    InvalidSelection(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point too close to a wavefunction node")]
    NearNode,
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("grid not converged: level {level} moved by {delta:e} under refinement")]
    GridNotConverged { level: usize, delta: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
