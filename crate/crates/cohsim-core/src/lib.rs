//! Stage-resolved simulation of quantum communication circuits with
//! coherence accounting.
//!
//! The crate tracks the relative entropy of coherence of the global circuit
//! state (and of every single-qubit reduction) across explicit stage cuts,
//! and ships builders for the standard communication protocols:
//! teleportation, superdense coding, entanglement swapping, and repeater
//! chains. A small line-oriented `.qc` text format makes circuits file
//! artifacts, and [`checks`] bundles the verification suites behind the
//! `cohsim verify` command.

pub mod checks;
pub mod circuit;
pub mod dsl;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod random;
pub mod report;
pub mod state;

pub use circuit::{Circuit, CircuitElement, CoherenceProfile, GateKind, StageRecord, StageState};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigenvalues, partial_trace, tensor, ComplexMatrix, ProbVector};
pub use state::{Ensemble, QuantumState};
