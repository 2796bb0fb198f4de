use std::path::PathBuf;

use thiserror::Error;

use snrpa_core::domains::maximum::MaximumError;
use snrpa_core::domains::samegame::SameGameError;
use snrpa_core::domains::tsptw::TsptwError;
use snrpa_core::SearchError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("solution file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Maximum(#[from] MaximumError),
    #[error(transparent)]
    Tsptw(#[from] TsptwError),
    #[error(transparent)]
    SameGame(#[from] SameGameError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("no traces to aggregate")]
    EmptyTraces,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed results table: {0}")]
    Table(String),
    #[error("solution does not verify: {0}")]
    Verification(String),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}
