// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

use crate::gates::GateKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:.3e})")]
    NonUnitaryMatrix { deviation: f64 },

    #[error("wire {wire} is out of range for a {n_qubits}-qubit register")]
    WireOutOfRange { wire: usize, n_qubits: usize },

    #[error("wire {0} appears more than once")]
    DuplicateWire(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("noise strength {0} is outside [0, 1]")]
    NoiseOutOfRange(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{n_qubits} qubits exceeds the limit of {limit}")]
    TooManyQubits { n_qubits: usize, limit: usize },

    #[error("{kind:?} takes {expected} parameters, got {found}")]
    ParamCountMismatch {
        kind: GateKind,
        expected: usize,
        found: usize,
    },

    #[error("operation is not supported for gate kind {0:?}")]
    UnsupportedKind(GateKind),

    #[error("unsupported register size {0} (must be a power of two >= 2)")]
    UnsupportedSize(usize),

    #[error("batch is empty")]
    EmptyBatch,

    #[error("label {0} is not binary")]
    LabelOutOfRange(u8),

    #[error("dataset has no {0} split")]
    MissingSplit(&'static str),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{path}: bad magic number {found:#010x} (expected {expected:#010x})")]
    MagicMismatch {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("{0}: file is truncated")]
    TruncatedFile(PathBuf),

    #[error("requested {requested} components but data has rank {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("feature {0} is constant on the fitting split")]
    DegenerateFeature(usize),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
