use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid PGM: {0}")]
    Pgm(String),
    #[error("image is {found_w}x{found_h}, expected {expected_w}x{expected_h}")]
    DimensionMismatch { expected_w: usize, expected_h: usize, found_w: usize, found_h: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("training needs at least 2 images, got {0}")]
    TooFewImages(usize),
    #[error("k = {k} is outside 1..={m}")]
    InvalidK { k: usize, m: usize },
    #[error("training data has rank {rank}; no eigenface can be formed")]
    RankDeficient { rank: usize },
    #[error("model has no eigenfaces")]
    EmptyModel,
    #[error("invalid model file: {0}")]
    Model(String),
    #[error("window starting at {start}s holds no frames")]
    EmptyWindow { start: f64 },
    #[error("invalid frame labels: {0}")]
    Labels(String),
    #[error(transparent)]
    Decomposition(#[from] svdlab_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
