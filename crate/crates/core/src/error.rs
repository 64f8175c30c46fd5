use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("bad magic/header: {0}")]
    BadHeader(String),

    #[error("unsupported datatype code {0}")]
    UnsupportedDatatype(i16),

    #[error("declared data size ({needed} bytes at offset {offset}) exceeds stream length {available}")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("not a binary mask: voxel {index} has value {value}")]
    NotBinary { index: usize, value: f64 },

    #[error("not a probability map: voxel {index} has value {value}")]
    NotProbability { index: usize, value: f64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: [usize; 3], right: [usize; 3] },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("score undefined: both masks are empty")]
    BothEmpty,

    #[error("nDSC undefined for empty ground truth with a non-empty prediction")]
    EmptyGroundTruth,

    #[error("ground truth has no negative voxels; positive:negative ratio is unbounded")]
    NoNegatives,

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for I/O failures, 2 for validation failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } | Error::Stream(_) => 1,
            Error::Csv(e) if e.is_io_error() => 1,
            _ => 2,
        }
    }
}
