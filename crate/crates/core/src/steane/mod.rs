//! Physical-level [[7,1,3]] Steane code: encoding, cat-state measurement
//! gadgets, syndrome extraction and magic-state T gates.

mod code;
mod gadgets;
mod register;

pub use code::{
    classical_decode, decode_to_logical, encoded_state, even_codewords, locate, CodeBlock, LogicalDensity, Stabilizer,
    StabilizerName, Syndrome, STABILIZERS,
};
pub use gadgets::{
    apply_logical_phase, extract_and_correct, extract_syndrome, ft_measure_operator, ft_measure_z_destructive,
    ft_t_gate, ft_t_gate_with, phase_word, prepare_cat, prepare_logical_zero, prepare_magic, prepare_magic_from_zero,
    transversal_gate, LogicalOperator, TransversalKind, MAX_CAT_ATTEMPTS, REPETITIONS,
};
pub use register::{Checkpoint, Fault, FaultTarget, PhysicalTally, Register, Usage};

use thiserror::Error;

use crate::simcore::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteaneError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("need {needed} free ancilla wires, {available} available")]
    InsufficientAncillas { needed: usize, available: usize },
    #[error("cat verification failed {attempts} times in a row")]
    FaultEscalation { attempts: usize },
    #[error("uncorrectable error: {0}")]
    Uncorrectable(String),
    #[error("two-block gate on overlapping blocks")]
    OverlappingBlocks,
    #[error("invalid block: {0}")]
    InvalidBlock(String),
}
