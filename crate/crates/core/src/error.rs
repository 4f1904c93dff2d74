use thiserror::Error;

/// Errors surfaced by the clustering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinexError {
    #[error("data matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} values for a {rows}x{cols} matrix, got {got}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("Input array X should be 1D or 2D.")]
    Dimensionality,

    #[error("Invalid similarity method: {0}")]
    InvalidMethod(String),

    #[error("Invalid similarity method. Choose from {0}.")]
    MethodNotConfigured(String),

    #[error("Invalid threshold specified: {0}")]
    InvalidThreshold(String),

    #[error("invalid PCA target: {0}")]
    InvalidTarget(String),

    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("random sampling with fraction {fraction} of {n} rows keeps no rows")]
    DegenerateSample { n: usize, fraction: f64 },

    #[error("approximation method '{0}' is not implemented")]
    NotImplemented(String),

    #[error("invalid neighbor count k={k} for {n} observations")]
    InvalidK { k: usize, n: usize },

    #[error("observation index {index} out of range for {n} observations")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("CSV error: {0}")]
    Csv(String),
}

impl From<std::io::Error> for SpinexError {
    fn from(e: std::io::Error) -> Self {
        SpinexError::Io(e.to_string())
    }
}

impl From<csv::Error> for SpinexError {
    fn from(e: csv::Error) -> Self {
        SpinexError::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpinexError>;
