use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use thiserror::Error;

use crate::key::ProblemKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objective returned non-finite value {value} at design point {index}")]
    Evaluation { index: usize, value: f64 },

    #[error("unsupported function id {0} (implemented: 1, 3, 4, 5, 8, 10, 14, 17, 20, 24)")]
    UnsupportedFunction(u32),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: duplicate run {key} (first seen on line {first_line})")]
    DuplicateRecord {
        line: u64,
        first_line: u64,
        key: String,
    },

    #[error("feature schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("portfolio is empty; per-dimension top sets were {0:?}")]
    EmptyPortfolio(BTreeMap<u32, BTreeSet<String>>),

    #[error(
        "feature and performance keys are misaligned: without performance {without_performance:?}, without features {without_features:?}"
    )]
    Alignment {
        without_performance: Vec<ProblemKey>,
        without_features: Vec<ProblemKey>,
    },

    #[error("{}: file not found ({hint})", path.display())]
    MissingArtifact { path: PathBuf, hint: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("instance {id}: {source}")]
    Instance {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front-end: 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 1,
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
