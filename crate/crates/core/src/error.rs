//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by any stage of the link simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // -- tensor format ------------------------------------------------------
    #[error("bad magic bytes (expected {expected:?})")]
    BadMagic { expected: &'static str },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("unknown dtype tag {0}")]
    UnknownDtype(u8),

    #[error("truncated buffer: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("trailing data: {extra} unexpected bytes after payload")]
    TrailingData { extra: usize },

    #[error("non-finite element at index {index}")]
    NonFinite { index: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    // -- manifest ------------------------------------------------------------
    #[error("manifest schema violation: {0}")]
    ManifestSchema(String),

    #[error("sample {sample_id}: referenced file does not exist: {path}")]
    DanglingPath { sample_id: String, path: PathBuf },

    #[error("duplicate sample id: {0}")]
    DuplicateSampleId(String),

    #[error("sample {sample_id}: label {label} out of range for {classes} classes")]
    LabelOutOfRange {
        sample_id: String,
        label: usize,
        classes: usize,
    },

    // -- codec ---------------------------------------------------------------
    #[error("empty input")]
    EmptyInput,

    #[error("symbol {symbol} out of range for alphabet size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: usize },

    #[error("invalid quantizer range: lo={lo} must be < hi={hi}")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("invalid quantizer bits {0} (allowed 1..=16)")]
    InvalidBits(u8),

    #[error("code table violates the Kraft inequality")]
    KraftViolation,

    #[error("compressed payload truncated")]
    TruncatedPayload,

    #[error("corrupt compressed blob: {0}")]
    CorruptBlob(String),

    // -- channels ----------------------------------------------------------
    #[error("input has zero power")]
    ZeroPower,

    #[error("invalid channel configuration: {0}")]
    InvalidChannelConfig(String),

    #[error("stream length {len} is not a multiple of block size {block}")]
    BlockLengthMismatch { len: usize, block: usize },

    #[error("tensor too short for symbol pairing (need >= 2 elements, got {0})")]
    TensorTooShort(usize),

    #[error("unsupported dtype for this operation: {0}")]
    UnsupportedDtype(&'static str),

    // -- quantum -----------------------------------------------------------
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("zero vector cannot be amplitude-embedded")]
    ZeroVector,

    #[error("input of {len} values exceeds embedding capacity {capacity}")]
    CapacityExceeded { len: usize, capacity: usize },

    #[error("expected a {expected}-qubit state, got {actual} qubits")]
    WrongQubitCount { expected: usize, actual: usize },

    #[error("readout mode inconsistent with embedding mode: {0}")]
    ReadoutMismatch(String),

    #[error("invalid quantum channel configuration: {0}")]
    InvalidQuantumConfig(String),

    // -- metrics / report --------------------------------------------------
    #[error("shape mismatch: {a:?} vs {b:?}")]
    ShapeMismatch { a: Vec<usize>, b: Vec<usize> },

    #[error("label {label} out of range for {k} classes")]
    MetricLabelOutOfRange { label: usize, k: usize },

    #[error("max_value must be positive, got {0}")]
    InvalidMaxValue(f64),

    #[error("conflicting duplicate record for (model_tag={tag}, snr_db={snr_db})")]
    DuplicateRecord { tag: String, snr_db: f64 },

    // -- configuration -----------------------------------------------------
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("refusing to overwrite existing differing file: {0}")]
    RefusingOverwrite(PathBuf),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    TomlParse(#[from] toml::de::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
