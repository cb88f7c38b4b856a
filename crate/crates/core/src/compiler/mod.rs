//! Circuit IR, adder generator, gate decomposition, routing and brick packing.

mod ir;
mod passes;
mod place;
mod qcla;

pub use ir::{CircuitIR, GateTally};
pub use passes::{decompose, insert_swaps, insert_swaps_with, route_and_place, RouterConfig, Routed, PLACEMENT_SEARCH_WIRES};
pub use place::{place_bricks, pattern_for, Placement};
pub use qcla::{qcla_adder, QclaRegisters, QclaWire, MAX_QCLA_BITS};

use thiserror::Error;

use crate::brickwork::BrickworkError;
use crate::simcore::{Gate, GateKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("wire {wire} out of range for {wire_count} wires")]
    WireOutOfRange { wire: usize, wire_count: usize },
    #[error("{0} is not supported by this pass")]
    Unsupported(GateKind),
    #[error("gate `{0}` acts on non-adjacent wires")]
    NotAdjacent(Gate),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Brickwork(#[from] BrickworkError),
}

/// Decompose, route and pack in one go.
pub fn compile(circuit: &CircuitIR) -> Result<(Routed, Placement), CompileError> {
    let routed = route_and_place(&decompose(circuit))?;
    let placement = place_bricks(&routed.circuit)?;
    Ok((routed, placement))
}
