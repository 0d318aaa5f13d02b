use thiserror::Error;

/// Errors raised by the field, algebra and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid too small: axis {axis} has {n} nodes, scheme needs at least {min}")]
    GridTooSmall { axis: usize, n: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("structure constants deviate from ±2ε by {deviation:e}")]
    ConventionError { deviation: f64 },

    #[error("g(x) at node {node} is not in SU(2) (deviation {deviation:e})")]
    NotUnitary { node: usize, deviation: f64 },

    #[error("K operator singular at node {node} (condition number {cond:e})")]
    SingularK { node: usize, cond: f64 },

    #[error("pointwise supremum is +∞ at node {node}")]
    InfiniteValue { node: usize },

    #[error("starting field is outside the finite domain of the dual functional (node {node})")]
    InfeasibleStart { node: usize },

    #[error("line search failed after {iterations} iterations")]
    LineSearchFailure { iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
