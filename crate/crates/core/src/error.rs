use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document at {path}: {message}")]
    MalformedDocument { path: String, message: String },

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),

    #[error("edge {edge} references unknown vertex `{vertex}`")]
    DanglingEdgeEndpoint { edge: usize, vertex: String },

    #[error("guided potential entry {entry} has non-positive value {value}")]
    NonPositiveQ { entry: usize, value: f64 },

    #[error("guided potential entry {entry} repeats vertex `{vertex}` at shift {shift:?}")]
    DuplicateQEntry {
        entry: usize,
        vertex: String,
        shift: Vec<i64>,
    },

    #[error("bad dimensions: dim_total = {dim_total}, dim_guided = {dim_guided} (need dim_total >= 2 and 1 <= dim_guided < dim_total)")]
    BadDimensions { dim_total: usize, dim_guided: usize },

    #[error("eigensolver did not converge within {iterations} iterations (n = {n})")]
    ConvergenceFailure { n: usize, iterations: usize },

    #[error("malformed interval [{lo}, {hi}]")]
    MalformedInterval { lo: f64, hi: f64 },

    #[error("guided potential at shift {shift:?} lies outside a window of radius {radius}")]
    SupportOutsideWindow { shift: Vec<i64>, radius: usize },

    #[error("window exhausted at radius {radius} with {unresolved} unresolved eigenvalue(s)")]
    WindowExhausted { radius: usize, unresolved: usize },

    #[error("window certification failed at coupling t = {t}")]
    UnresolvedAtCoupling { t: f64 },

    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::IoFailure {
            path: path.into(),
            source,
        }
    }
}
