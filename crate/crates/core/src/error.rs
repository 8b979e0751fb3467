use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the partitioning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("entry {entry} has index {index:?} outside dims {dims:?}")]
    IndexOutOfRange {
        entry: usize,
        index: Vec<usize>,
        dims: Vec<usize>,
    },
    #[error("entry {entry} has negative weight {weight}")]
    NegativeWeight { entry: usize, weight: f64 },
    #[error("entry {entry} has {got} coordinates, expected {expected}")]
    Arity {
        entry: usize,
        got: usize,
        expected: usize,
    },
    #[error("dimension {dim} out of range for a {ndims}-dimensional tensor")]
    DimOutOfRange { dim: usize, ndims: usize },
    #[error("prefix query {value} outside [0, {total}]")]
    PrefixOutOfRange { value: f64, total: f64 },
    #[error("expected a {expected}-dimensional input, got {got}")]
    Dimensionality { expected: usize, got: usize },
    #[error("input must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error("invalid constraint groups: {0}")]
    Constraint(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed partition: {0}")]
    Partition(String),
    #[error("total load is zero")]
    ZeroLoad,
    #[error("enumeration needs {count:.3e} candidates, budget is {budget:.3e}")]
    BudgetExceeded { count: f64, budget: f64 },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
