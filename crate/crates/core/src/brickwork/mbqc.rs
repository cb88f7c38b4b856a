use rand::Rng;

use super::layout::{vertical_pairs, BrickworkLayout, Coord};
use super::BrickworkError;
use crate::simcore::{Gate, GateKind, Octant, StateVector, DEFAULT_QUBIT_CAP};

/// Corrected outcomes `s_{x,y}`, filled strictly in column-major order.
/// Column 0 holds the X pads of a one-time-padded input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    rows: usize,
    bits: Vec<Vec<Option<bool>>>,
    next: Coord,
}

impl MeasurementRecord {
    pub fn new(layout: &BrickworkLayout) -> Self {
        Self::with_pads(layout, &vec![false; layout.rows()])
    }

    pub fn with_pads(layout: &BrickworkLayout, pads: &[bool]) -> Self {
        let mut bits = vec![vec![None; layout.rows()]; layout.columns()];
        bits[0] = pads.iter().map(|&b| Some(b)).collect();
        MeasurementRecord { rows: layout.rows(), bits, next: Coord::new(1, 1) }
    }

    pub fn get(&self, c: Coord) -> Option<bool> {
        self.bits.get(c.x).and_then(|col| col.get(c.y - 1)).copied().flatten()
    }

    /// Records the next outcome; `c` must be the next coordinate in column-major order.
    pub fn push(&mut self, c: Coord, bit: bool) -> Result<(), BrickworkError> {
        if c != self.next || c.x >= self.bits.len() {
            return Err(BrickworkError::OutOfOrder { expected: self.next, got: c });
        }
        self.bits[c.x][c.y - 1] = Some(bit);
        self.next = if c.y == self.rows { Coord::new(c.x + 1, 1) } else { Coord::new(c.x, c.y + 1) };
        Ok(())
    }

    fn parity(&self, deps: &[Coord]) -> Result<bool, BrickworkError> {
        deps.iter().try_fold(false, |acc, &d| {
            self.get(d).map(|b| acc ^ b).ok_or(BrickworkError::MissingDependency(d))
        })
    }

    /// `(s^X, s^Z)` for `c` from the recorded outcomes.
    pub fn signals(&self, layout: &BrickworkLayout, c: Coord) -> Result<(bool, bool), BrickworkError> {
        Ok((self.parity(&layout.x_dep(c))?, self.parity(&layout.z_dep(c))?))
    }

    /// Outcomes of every measured coordinate, column-major.
    pub fn outcomes(&self) -> Vec<(Coord, bool)> {
        let mut v = Vec::new();
        for (x, col) in self.bits.iter().enumerate().skip(1) {
            for (y, b) in col.iter().enumerate() {
                if let Some(b) = b {
                    v.push((Coord::new(x, y + 1), *b));
                }
            }
        }
        v
    }
}

/// `(−1)^{s^X}·φ + s^Z·π`
pub fn corrected_angle(phi: Octant, sx: bool, sz: bool) -> Octant {
    phi.negate_if(sx).plus_pi_if(sz)
}

/// Physical side of an MBQC run: holds at most two columns of the brickwork
/// state, adding each column (with its CZ edges) just before the previous one
/// is measured. Entangling lazily commutes with the measurements already made.
#[derive(Debug, Clone)]
pub struct MbqcEngine {
    rows: usize,
    layers: usize,
    prep: Vec<Vec<Octant>>,
    state: StateVector,
    next: Coord,
}

impl MbqcEngine {
    /// `input` is the column-1 state before its preparation rotation;
    /// `prep[x - 1][y - 1]` rotates qubit `(x, y)` by `Rz(θ)` as it is created.
    pub fn new(layout: &BrickworkLayout, input: StateVector, prep: Vec<Vec<Octant>>) -> Result<Self, BrickworkError> {
        let rows = layout.rows();
        if input.num_qubits() != rows {
            return Err(BrickworkError::InputSize { expected: rows, got: input.num_qubits() });
        }
        if prep.len() != layout.columns() || prep.iter().any(|c| c.len() != rows) {
            return Err(BrickworkError::InputSize { expected: layout.columns(), got: prep.len() });
        }
        if 2 * rows > DEFAULT_QUBIT_CAP {
            return Err(BrickworkError::Sim(crate::simcore::SimError::ResourceLimit {
                requested: 2 * rows,
                cap: DEFAULT_QUBIT_CAP,
            }));
        }
        let mut state = input;
        for y in 0..rows {
            state.apply(&Gate::single(GateKind::Rz(prep[0][y]), y))?;
        }
        let mut engine = MbqcEngine { rows, layers: layout.layers(), prep, state, next: Coord::new(1, 1) };
        engine.add_column(2)?;
        Ok(engine)
    }

    /// Plain MBQC: no preparation rotations.
    pub fn unrotated(layout: &BrickworkLayout, input: StateVector) -> Result<Self, BrickworkError> {
        let prep = vec![vec![Octant::ZERO; layout.rows()]; layout.columns()];
        Self::new(layout, input, prep)
    }

    /// Appends column `x` next to column `x − 1`, which must be the only column held.
    fn add_column(&mut self, x: usize) -> Result<(), BrickworkError> {
        let n = self.rows;
        for y in 0..n {
            self.state = self.state.tensor(&StateVector::equatorial(self.prep[x - 1][y]))?;
        }
        for (a, b) in vertical_pairs(n, self.layers, x) {
            self.state.apply(&Gate::cz(n + a - 1, n + b - 1))?;
        }
        for y in 0..n {
            self.state.apply(&Gate::cz(y, n + y))?;
        }
        Ok(())
    }

    /// Next coordinate to be measured, or `None` once only the output column remains.
    pub fn next_coord(&self) -> Option<Coord> {
        (self.next.x <= 4 * self.layers).then_some(self.next)
    }

    /// Measures the next qubit in `{|0⟩ ± e^{iδ}|1⟩}` and returns the raw outcome.
    pub fn measure<R: Rng + ?Sized>(&mut self, delta: Octant, rng: &mut R) -> Result<bool, BrickworkError> {
        let c = self.next_coord().ok_or(BrickworkError::Finished)?;
        // Rows of the current column are removed as they are measured, so the
        // qubit being measured is always wire 0.
        let bit = self.state.measure_in_angle_basis(0, delta, rng)?;
        self.state.remove_wire(0, bit)?;
        if c.y == self.rows {
            self.next = Coord::new(c.x + 1, 1);
            if c.x + 2 <= 4 * self.layers + 1 {
                self.add_column(c.x + 2)?;
            }
        } else {
            self.next = Coord::new(c.x, c.y + 1);
        }
        Ok(bit)
    }

    /// Output column, uncorrected.
    pub fn into_output(self) -> Result<StateVector, BrickworkError> {
        if self.next_coord().is_some() {
            return Err(BrickworkError::NotFinished(self.next));
        }
        Ok(self.state)
    }
}

/// Byproduct bits `(x, z)` on each output row.
pub fn output_corrections(layout: &BrickworkLayout, record: &MeasurementRecord) -> Result<Vec<(bool, bool)>, BrickworkError> {
    let x = layout.columns();
    (1..=layout.rows()).map(|y| record.signals(layout, Coord::new(x, y))).collect()
}

/// Applies `X^{sx}` then `Z^{sz}` per row.
pub fn apply_corrections(state: &mut StateVector, corrections: &[(bool, bool)]) -> Result<(), BrickworkError> {
    for (y, &(sx, sz)) in corrections.iter().enumerate() {
        if sx {
            state.apply(&Gate::single(GateKind::X, y))?;
        }
        if sz {
            state.apply(&Gate::single(GateKind::Z, y))?;
        }
    }
    Ok(())
}

/// Runs the layout on an arbitrary `n`-qubit input and returns the corrected output.
pub fn run_mbqc_state<R: Rng + ?Sized>(
    layout: &BrickworkLayout,
    input: StateVector,
    rng: &mut R,
) -> Result<(StateVector, MeasurementRecord), BrickworkError> {
    let mut engine = MbqcEngine::unrotated(layout, input)?;
    let mut record = MeasurementRecord::new(layout);
    while let Some(c) = engine.next_coord() {
        let (sx, sz) = record.signals(layout, c)?;
        let bit = engine.measure(corrected_angle(layout.phi(c), sx, sz), rng)?;
        record.push(c, bit)?;
    }
    let mut out = engine.into_output()?;
    apply_corrections(&mut out, &output_corrections(layout, &record)?)?;
    Ok((out, record))
}

/// Runs the layout with column-1 qubits `|0⟩ + e^{iθ_y}|1⟩`.
pub fn run_mbqc<R: Rng + ?Sized>(
    layout: &BrickworkLayout,
    input_angles: &[Octant],
    rng: &mut R,
) -> Result<(StateVector, MeasurementRecord), BrickworkError> {
    run_mbqc_state(layout, product_input(input_angles)?, rng)
}

/// `⊗_y (|0⟩ + e^{iθ_y}|1⟩)/√2`
pub fn product_input(angles: &[Octant]) -> Result<StateVector, BrickworkError> {
    let mut it = angles.iter();
    let first = it.next().ok_or(BrickworkError::InputSize { expected: 1, got: 0 })?;
    let mut s = StateVector::equatorial(*first);
    for a in it {
        s = s.tensor(&StateVector::equatorial(*a))?;
    }
    Ok(s)
}

/// The whole brickwork graph state at once: column 1 at `input_angles`, every
/// other qubit at its `prep` angle, CZ on every edge. Qubit `(x, y)` is wire
/// `(x − 1)·n + (y − 1)`.
pub fn build_brickwork_state(
    layout: &BrickworkLayout,
    input_angles: &[Octant],
    prep: Option<&[Vec<Octant>]>,
) -> Result<StateVector, BrickworkError> {
    let n = layout.rows();
    let total = layout.num_qubits();
    if total > DEFAULT_QUBIT_CAP {
        return Err(BrickworkError::Sim(crate::simcore::SimError::ResourceLimit { requested: total, cap: DEFAULT_QUBIT_CAP }));
    }
    if input_angles.len() != n {
        return Err(BrickworkError::InputSize { expected: n, got: input_angles.len() });
    }
    let mut angles = Vec::with_capacity(total);
    for x in 1..=layout.columns() {
        for y in 1..=n {
            angles.push(if x == 1 {
                input_angles[y - 1]
            } else {
                prep.map(|p| p[x - 1][y - 1]).unwrap_or(Octant::ZERO)
            });
        }
    }
    let mut state = product_input(&angles)?;
    let wire = |c: Coord| (c.x - 1) * n + (c.y - 1);
    for (a, b) in layout.edges() {
        state.apply(&Gate::cz(wire(a), wire(b)))?;
    }
    Ok(state)
}
