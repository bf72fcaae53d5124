use std::path::PathBuf;

use thiserror::Error;

use crate::coord::CoordError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("table file {path} is invalid: {reason}")]
    TableFormat { path: PathBuf, reason: String },
    #[error(transparent)]
    Coord(#[from] CoordError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("memory guard: {0}")]
    MemoryGuard(String),
    #[error("search budget exhausted; distance is at least {lower_bound}")]
    BudgetExhausted { lower_bound: u8, nodes: u64, elapsed: f64 },
    #[error("depth guard: {0}")]
    DepthGuard(String),
    #[error("corrupt dataset: {0}")]
    CorruptManifest(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
