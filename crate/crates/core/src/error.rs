use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=20")]
    QubitCount(usize),

    #[error("gate target {target} out of range for {num_qubits} qubits")]
    TargetOutOfRange { target: usize, num_qubits: usize },

    #[error("gate targets must be distinct (got {0} twice)")]
    DuplicateTarget(usize),

    #[error("{kind} expects {expected} target(s), got {got}")]
    TargetArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("rotation gate {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("kernel entry {value} at ({row}, {col}) outside [0, 1] beyond rounding")]
    KernelRange { row: usize, col: usize, value: f64 },

    #[error("labels must contain both classes 0 and 1")]
    SingleClass,

    #[error("label {0} is not binary")]
    NonBinaryLabel(u8),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("malformed kernel file: {0}")]
    KernelFormat(String),

    #[error("hash mismatch: expected {expected}, found {found}")]
    HashMismatch { expected: String, found: String },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("row {row} has {got} cells, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("all {0} rows were dropped during feature engineering")]
    AllRowsDropped(usize),

    #[error("feature index {index} missing from vector of length {len}")]
    MissingFeature { index: usize, len: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(String),
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Toml(e.to_string())
    }
}

impl From<toml::ser::Error> for Error {
    fn from(e: toml::ser::Error) -> Self {
        Error::Toml(e.to_string())
    }
}
