//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("qubit index {index} out of range for {qubit_count} qubits")]
    IndexOutOfRange { index: usize, qubit_count: usize },

    #[error("invalid probability distribution: {context}")]
    InvalidDistribution { context: String },

    #[error("gate {name} is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryGate { name: String, deviation: f64 },

    #[error("invalid state: {context}")]
    InvalidState { context: String },

    #[error("ensemble members have mixed qubit counts ({left} vs {right})")]
    MixedDimensions { left: usize, right: usize },

    #[error("coherence profile is empty")]
    EmptyProfile,

    #[error("invalid size {n}: {context}")]
    InvalidSize { n: usize, context: String },

    #[error("size mismatch: {context}")]
    SizeMismatch { context: String },

    #[error("Werner parameter {lambda} outside [0, 1]")]
    InvalidWernerParameter { lambda: f64 },

    #[error("layer {layer} out of range: ledger has {available} measurement layers")]
    LayerOutOfRange { layer: usize, available: usize },

    #[error("repeater chain with {qubits} qubits exceeds the simulated limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },

    #[error("element {position} failed: {source}")]
    ElementFailed {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameters: {context}")]
    InvalidParams { context: String },
}

impl Error {
    pub(crate) fn dimension(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    pub(crate) fn invalid_state(context: impl Into<String>) -> Self {
        Error::InvalidState {
            context: context.into(),
        }
    }

    /// Wrap an error with the position of the circuit element that raised it.
    pub(crate) fn at_element(self, position: usize) -> Self {
        Error::ElementFailed {
            position,
            source: Box::new(self),
        }
    }
}
