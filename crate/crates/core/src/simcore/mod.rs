//! Dense statevector simulation over the octant gate alphabet.

mod gate;
mod octant;
mod state;

pub use gate::{Gate, GateKind, Matrix2, Pauli};
pub use octant::Octant;
pub use state::{fidelity, sample_depolarizing, StateVector, DEFAULT_QUBIT_CAP};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{requested} qubits exceeds the simulator cap of {cap}")]
    ResourceLimit { requested: usize, cap: usize },
    #[error("wire {wire} out of range for a {num_qubits}-qubit state")]
    WireOutOfRange { wire: usize, num_qubits: usize },
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
