use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cat map [[{a},{b}],[{c},{d}]]: {reason}")]
    InvalidCatMap {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        reason: &'static str,
    },

    #[error("map [[{a},{b}],[{c},{d}]] violates the checkerboard condition (a*b and c*d must be even)")]
    QuantizationCondition { a: i64, b: i64, c: i64, d: i64 },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cutoff {cutoff} aliases on an N = {n} torus (need 2K < N)")]
    Aliasing { cutoff: usize, n: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("grazing collision at bounce {bounce} (|cos| = {cos:.3e})")]
    Grazing { bounce: usize, cos: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numerical failure in {what}: residual {residual:.3e}")]
    Numerical { what: String, residual: f64 },

    #[error("construction degenerated: {0}")]
    DegenerateConstruction(String),

    #[error("estimator under-resolved: {empty} of {total} balls empty at T = {t}, eps = {eps}; use a larger cloud or smaller T")]
    UnderResolved {
        empty: usize,
        total: usize,
        t: u32,
        eps: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            what: what.into(),
            residual,
        }
    }
}
