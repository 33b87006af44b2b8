use std::path::PathBuf;

use thiserror::Error;

use crate::enrich::Source;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the toolkit. Dropped records are *not* errors; they are
/// counted in the relevant report types instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid URL {url:?}: {reason}")]
    InvalidUrl { url: String, reason: String },

    #[error("{path}: {malformed} of {total} lines malformed (tolerance is 10%); first error: {first}")]
    MalformedInput {
        path: PathBuf,
        malformed: usize,
        total: usize,
        first: String,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("no verdict fixture loaded for provider {0}")]
    MissingProvider(Source),

    #[error("encoder {encoder_id} has an empty link history; suspicion factor is undefined")]
    EmptyLinkHistory { encoder_id: String },

    #[error("link {global_hash} has no encoders")]
    NoEncoders { global_hash: String },

    #[error("encoder {encoder_id} referenced by link {global_hash} is not in the dataset")]
    UnknownEncoder {
        global_hash: String,
        encoder_id: String,
    },

    #[error("row {global_hash} is unlabeled")]
    UnlabeledRow { global_hash: String },

    #[error("training data contains no {label} rows")]
    ClassAbsent { label: &'static str },

    #[error("feature names do not match the model: expected [{expected}], got [{got}]")]
    FeatureMismatch { expected: String, got: String },

    #[error("{path}: unsupported model format version {found} (supported: {supported})")]
    ModelVersion {
        path: PathBuf,
        found: u64,
        supported: u64,
    },

    #[error("{path}: corrupt model file: {reason}")]
    CorruptModel { path: PathBuf, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
