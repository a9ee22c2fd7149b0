use std::path::PathBuf;

use crate::transforms::BasisKind;

/// Errors produced by the reconstruction toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed WAV file {}: {reason}", path.display())]
    MalformedWav { path: PathBuf, reason: String },
    #[error("unsupported WAV encoding in {}: {reason}", path.display())]
    UnsupportedEncoding { path: PathBuf, reason: String },
    #[error("frame window [{start}, {start}+{len}) exceeds the {available} available samples")]
    FrameOutOfRange { start: usize, len: usize, available: usize },
    #[error("cannot write {}: {reason}", path.display())]
    Write { path: PathBuf, reason: String },

    #[error("frame is empty")]
    EmptyFrame,
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid synth spec: {0}")]
    InvalidSynth(String),

    #[error("transform length must be at least 1")]
    ZeroLength,
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisKind, found: BasisKind },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("measurement count {m} is invalid for length {n} (need 1 <= M <= N)")]
    InvalidMeasurementCount { m: usize, n: usize },
    #[error("invalid sampling pattern: {0}")]
    InvalidPattern(String),
    #[error("refusing to materialize an operator with N = {n} (limit {limit})")]
    MaterializeTooLarge { n: usize, limit: usize },

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
