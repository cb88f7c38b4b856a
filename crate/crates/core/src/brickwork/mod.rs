//! Brickwork geometry, measurement flow and MBQC execution.

mod layout;
mod mbqc;
mod patterns;

pub use layout::{
    brick_census, layer_pairs, layer_tiles, vertical_neighbours, vertical_pairs, BrickworkLayout, Coord,
    DependencyEntry, LayoutDocument, Tile, LAYOUT_FORMAT_VERSION,
};
pub use mbqc::{
    apply_corrections, build_brickwork_state, corrected_angle, output_corrections, product_input, run_mbqc,
    run_mbqc_state, MbqcEngine, MeasurementRecord,
};
pub use patterns::{cnot_pattern, gate_pattern, single_row, BrickPattern};

use thiserror::Error;

use crate::simcore::{GateKind, SimError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BrickworkError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("a brickwork state needs at least 2 rows and 1 layer, got {rows}x{layers}")]
    InvalidShape { rows: usize, layers: usize },
    #[error("coordinate {0} is outside the measured grid")]
    OutOfGrid(Coord),
    #[error("expected {expected} entries, got {got}")]
    InputSize { expected: usize, got: usize },
    #[error("measurement out of order: expected {expected}, got {got}")]
    OutOfOrder { expected: Coord, got: Coord },
    #[error("outcome at {0} needed before it was recorded")]
    MissingDependency(Coord),
    #[error("no gate pattern for {0}")]
    UnsupportedGate(GateKind),
    #[error("all qubits already measured")]
    Finished,
    #[error("measurements remain, next is {0}")]
    NotFinished(Coord),
    #[error("layout document: {0}")]
    Format(String),
}
