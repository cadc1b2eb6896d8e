//! Error types shared across the crate.
//!
//! Two families: [`DataError`] for everything between a source file and a
//! design matrix, [`FitError`] for numerical failures inside the solver.
//! The split matters to callers (the CLI maps them to distinct exit codes).

use std::path::PathBuf;
use thiserror::Error;

/// Failures while reading, validating, or deriving data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: bad header, expected columns: {expected}")]
    BadHeader { file: String, expected: String },
    #[error("team {0} is not a participant of this match")]
    ParticipantMismatch(String),
    #[error("city {0:?} is missing from the gazetteer")]
    MissingGazetteerEntry(String),
    #[error("zero rest days between consecutive matches")]
    DegenerateRest,
    #[error("stadium capacity must be positive")]
    InvalidStadium,
    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),
    #[error("undefined quality: {0}")]
    UndefinedQuality(&'static str),
    #[error("{file}:{line}: {reason}")]
    BadConfig {
        file: String,
        line: usize,
        reason: String,
    },
}

/// Failures of model fitting or inference.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("labels are single-class; the logistic MLE is undefined")]
    DegenerateLabels,
    #[error("design matrix is rank deficient; offending columns: {0:?}")]
    SingularSystem(Vec<String>),
    #[error("{rows} observations for {cols} columns; need rows >= columns")]
    InsufficientData { rows: usize, cols: usize },
    #[error("standard error must be positive for Wald inference")]
    InvalidInference,
    #[error("design matrix has no rows")]
    EmptyMatrix,
}

/// Any failure the pipeline can surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Fit(#[from] FitError),
}
