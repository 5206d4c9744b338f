use thiserror::Error;

use crate::morph::Attribute;

/// Errors produced by analysis, warping, morphing and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported sample rate {0} Hz (minimum is 8000 Hz)")]
    UnsupportedRate(u32),
    #[error("invalid vocoder parameters: {0}")]
    InvalidParams(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid anchors: {0}")]
    InvalidAnchors(String),
    #[error("frame grid mismatch: {0}")]
    GridMismatch(String),
    #[error("{attribute} value {value} outside the transform domain")]
    DomainError { attribute: Attribute, value: f64 },
    #[error("invalid weights for row '{attribute}': {reason}")]
    InvalidWeights {
        attribute: Attribute,
        reason: String,
    },
    #[error("anchor topology mismatch: {0}")]
    AnchorTopologyMismatch(String),
    #[error("invalid morphing object: {0}")]
    InvalidObject(String),
    #[error("degenerate triangle (zero signed area)")]
    DegenerateTriangle,
    #[error("not a vocp file")]
    NotAVocpFile,
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("unsupported version: {0}")]
    UnsupportedVersion(String),
    #[error("invalid object file: {0}")]
    InvalidObjectFile(String),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
