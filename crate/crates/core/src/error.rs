use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),

    #[error("frame data length {actual} does not match {width}x{height}x{channels}")]
    DataLength {
        width: usize,
        height: usize,
        channels: usize,
        actual: usize,
    },

    #[error("frame is {width}x{height}, at least 3x3 is required")]
    FrameTooSmall { width: usize, height: usize },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("seam has {actual} offsets, expected {expected}")]
    SeamLength { expected: usize, actual: usize },

    #[error("seam offset {offset} at index {index} is out of range (limit {limit})")]
    SeamOutOfRange {
        index: usize,
        offset: usize,
        limit: usize,
    },

    #[error("seam jumps more than one pixel at index {index}")]
    DisconnectedSeam { index: usize },

    #[error("seams in batch intersect in row {row}")]
    IntersectingSeams { row: usize },

    #[error("seam orientation does not match the operation")]
    Orientation,

    #[error("invalid target {target} for source dimension {source_len}")]
    InvalidTarget { target: usize, source_len: usize },

    #[error("blend weights must be non-negative and sum to 1 (got {motion}, {gradient})")]
    InvalidWeights { motion: f64, gradient: f64 },

    #[error("invalid buffer policy: {0}")]
    InvalidPolicy(&'static str),

    #[error("buffer size must be at least 1")]
    ZeroBufferSize,

    #[error("spatiotemporal buffer is empty")]
    EmptyBuffer,

    #[error("at least {needed} frames are required, got {got}")]
    TooFewFrames { needed: usize, got: usize },

    #[error("frame {index}: {message}")]
    Format { index: usize, message: String },

    #[error("{path}: {message}")]
    Path { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn format(index: usize, message: impl Into<String>) -> Self {
        Error::Format {
            index,
            message: message.into(),
        }
    }

    /// True for errors caused by reading or writing media, as opposed to bad arguments.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Format { .. } | Error::Path { .. } | Error::Io(_) | Error::Image(_)
        )
    }
}
