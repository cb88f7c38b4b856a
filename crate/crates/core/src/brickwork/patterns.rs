use super::BrickworkError;
use crate::simcore::{GateKind, Octant};

/// Angle rows for one tile: one row per wire (two for a brick, one for a half-brick).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickPattern {
    pub kind: GateKind,
    pub rows: Vec<[Octant; 4]>,
}

const fn row(a: i64, b: i64, c: i64, d: i64) -> [Octant; 4] {
    [Octant::new(a), Octant::new(b), Octant::new(c), Octant::new(d)]
}

/// A row pattern `(a, b, c, 0)` implements `Rz(−c)·H·Rz(−b)·H·Rz(−a)`.
pub fn single_row(kind: GateKind) -> Result<[Octant; 4], BrickworkError> {
    Ok(match kind {
        GateKind::I => row(0, 0, 0, 0),
        GateKind::T => row(7, 0, 0, 0),
        GateKind::Tdg => row(1, 0, 0, 0),
        GateKind::S => row(6, 0, 0, 0),
        GateKind::Sdg => row(2, 0, 0, 0),
        GateKind::Z => row(4, 0, 0, 0),
        GateKind::X => row(0, 4, 0, 0),
        GateKind::H => row(2, 2, 2, 0),
        GateKind::Rz(k) => row(-i64::from(k.index()), 0, 0, 0),
        other => return Err(BrickworkError::UnsupportedGate(other)),
    })
}

/// CNOT inside a brick; `control_on_top` selects which row controls.
pub fn cnot_pattern(control_on_top: bool) -> BrickPattern {
    let control = row(0, 0, 2, 0);
    let target = row(0, 2, 0, 6);
    let rows = if control_on_top { vec![control, target] } else { vec![target, control] };
    BrickPattern { kind: GateKind::Cnot, rows }
}

/// Pattern for `kind`: single-qubit kinds give one row (usable in a
/// half-brick or either row of a brick); CNOT gives the top-control brick.
pub fn gate_pattern(kind: GateKind) -> Result<BrickPattern, BrickworkError> {
    if kind == GateKind::Cnot {
        return Ok(cnot_pattern(true));
    }
    if !kind.is_single_qubit() {
        return Err(BrickworkError::UnsupportedGate(kind));
    }
    Ok(BrickPattern { kind, rows: vec![single_row(kind)?] })
}
