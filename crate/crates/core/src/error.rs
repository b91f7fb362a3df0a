use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing cell: model={model} condition={condition} item={item}")]
    MissingCell {
        model: String,
        condition: String,
        item: String,
    },
    #[error("duplicate cell: model={model} condition={condition} item={item}")]
    DuplicateCell {
        model: String,
        condition: String,
        item: String,
    },
    #[error("point ({x}, {y}) outside {width}x{height} image {image}")]
    PointOutOfBounds {
        image: String,
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },
    #[error("no glyph for character {0:?} in the embedded font")]
    FontUnavailable(char),
    #[error("cannot read source {path}: {reason}")]
    UnreadableSource { path: PathBuf, reason: String },
    #[error("undecodable image: {0}")]
    UndecodableImage(String),
    #[error("corrupt cache entry {path}: {reason}")]
    CacheCorrupt { path: PathBuf, reason: String },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("inconsistent replicate counts: expected {expected}, found {found}")]
    InconsistentB { expected: usize, found: usize },
    #[error("split of {split} items cannot be drawn from a pool of {pool}")]
    SplitTooLarge { split: usize, pool: usize },
    #[error("incomplete matrix: {0}")]
    IncompleteMatrix(String),
    #[error("empty search space")]
    EmptySearchSpace,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("cannot write {path}: {reason}")]
    UnwritableOutput { path: PathBuf, reason: String },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-parsable name of the error variant.
    pub fn class(&self) -> &'static str {
        match self {
            Error::MissingCell { .. } => "MissingCell",
            Error::DuplicateCell { .. } => "DuplicateCell",
            Error::PointOutOfBounds { .. } => "PointOutOfBounds",
            Error::FontUnavailable(_) => "FontUnavailable",
            Error::UnreadableSource { .. } => "UnreadableSource",
            Error::UndecodableImage(_) => "UndecodableImage",
            Error::CacheCorrupt { .. } => "CacheCorrupt",
            Error::ConfigInvalid(_) => "ConfigInvalid",
            Error::EmptyInput => "EmptyInput",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InconsistentB { .. } => "InconsistentB",
            Error::SplitTooLarge { .. } => "SplitTooLarge",
            Error::IncompleteMatrix(_) => "IncompleteMatrix",
            Error::EmptySearchSpace => "EmptySearchSpace",
            Error::UnknownModel(_) => "UnknownModel",
            Error::UnwritableOutput { .. } => "UnwritableOutput",
            Error::Transport(_) => "Transport",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn unwritable(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::UnwritableOutput {
            path: path.into(),
            reason: err.to_string(),
        }
    }
}
