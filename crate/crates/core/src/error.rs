use std::path::PathBuf;

use thiserror::Error;

use crate::evaluation::Exclusion;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no samples supplied")]
    EmptyInput,

    #[error("malformed sample '{sample_id}': {reason}")]
    MalformedSample { sample_id: String, reason: String },

    #[error("insufficient subgroups for {gap}: {eligible} eligible, need at least 2")]
    InsufficientSubgroups {
        gap: &'static str,
        eligible: usize,
        excluded: Vec<Exclusion>,
    },

    #[error("disparity panel needs at least 2 entries, got {0}")]
    InsufficientPanel(usize),

    #[error("no verdict tolerance for metric '{0}'")]
    MissingTolerance(String),

    #[error("invalid disparity panel: {0}")]
    InvalidPanel(String),

    #[error("invalid threshold profile: {0}")]
    InvalidProfile(String),

    #[error("invalid sweep range: {0}")]
    InvalidRange(String),

    #[error("sweep degenerate: {flagged} of {total} grid points lack eligible subgroups")]
    SweepDegenerate { flagged: usize, total: usize },

    #[error("invalid signals: {0}")]
    InvalidSignals(String),

    #[error("weight {name} is negative ({value})")]
    NegativeWeight { name: &'static str, value: f64 },

    #[error("weights must satisfy alpha + beta + gamma + delta = 1, got sum {}", (sum * 1e12).round() / 1e12)]
    SumNotOne { sum: f64 },

    #[error("config invalid: {field}: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("cannot replay an empty snapshot sequence")]
    EmptySequence,

    #[error("{file}: missing column '{column}'")]
    MissingColumn { file: String, column: String },

    #[error("{file}: row {row}: {message}")]
    MalformedRow {
        file: String,
        row: usize,
        message: String,
    },

    #[error("{file}: no data rows")]
    EmptyFile { file: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}
