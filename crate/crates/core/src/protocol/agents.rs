use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::channel::PauliFrame;
use super::message::ProtocolMessage;
use super::physical::{pauli_on_equatorial, residual_logical};
use super::run::{BufferMode, Variant};
use super::transcript::OmniscientRecord;
use super::ProtocolError;
use crate::brickwork::{
    apply_corrections, corrected_angle, output_corrections, product_input, BrickworkLayout, Coord, MbqcEngine,
    MeasurementRecord,
};
use crate::ledger::{CostModel, CostVector};
use crate::simcore::{Gate, GateKind, Octant, StateVector};

/// Quantum content of a transfer. Travels beside its message and never
/// reaches the transcript.
#[derive(Debug, Clone)]
pub(crate) enum Payload {
    /// `|+_θ⟩`, bare or encoded.
    Equatorial(Octant),
    /// One wire of a register; the register itself rides with row 1.
    Wire(Option<StateVector>),
}

/// A message ready for the channel, with the noise its payload already picked
/// up on earlier hops.
#[derive(Debug, Clone)]
pub(crate) struct Outgoing {
    pub message: ProtocolMessage,
    pub payload: Option<Payload>,
    pub carried: PauliFrame,
}

impl Outgoing {
    fn classical(message: ProtocolMessage) -> Self {
        Outgoing { message, payload: None, carried: PauliFrame::default() }
    }
}

/// Logical Pauli `(x, z)` left on a payload once the receiver has corrected it.
pub(crate) fn logical_effect(variant: Variant, noise: PauliFrame) -> (bool, bool) {
    match variant {
        Variant::BfkBasic => (noise.x & 1 == 1, noise.z & 1 == 1),
        _ => residual_logical(noise),
    }
}

fn apply_pauli(state: &mut StateVector, wire: usize, (x, z): (bool, bool)) -> Result<(), ProtocolError> {
    if z {
        state.apply(&Gate::single(GateKind::Z, wire))?;
    }
    if x {
        state.apply(&Gate::single(GateKind::X, wire))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Account {
    pub expected: CostVector,
    pub realized: CostVector,
}

impl Account {
    fn charge(&mut self, expected: CostVector, realized: CostVector) {
        self.expected += expected;
        self.realized += realized;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AliceStage {
    Preparing,
    Measuring,
    AwaitingResult,
    ReceivingOutput,
    Done,
}

/// The client. Owns the secrets θ, r, the input pads and the layout's angles.
pub(crate) struct Alice<'a> {
    variant: Variant,
    layout: &'a BrickworkLayout,
    model: CostModel,
    buffer_mode: BufferMode,
    pub(crate) theta: Vec<Vec<Octant>>,
    r: Vec<Vec<bool>>,
    pads: Vec<bool>,
    input: Option<StateVector>,
    has_input: bool,
    stage: AliceStage,
    next_prep: Option<Coord>,
    order: Vec<Coord>,
    cursor: usize,
    record: MeasurementRecord,
    pub(crate) results: Vec<(Coord, bool)>,
    /// Selected block of the batch in flight, with the noise it arrived with.
    selected: Option<(Payload, PauliFrame)>,
    selection_ready: bool,
    held: usize,
    pub(crate) high_water: usize,
    pub(crate) discarded: u64,
    output: Option<StateVector>,
    output_rows: usize,
    pub(crate) final_output: Option<StateVector>,
    handles: u64,
    pub(crate) cost: Account,
    pub(crate) notes: Vec<OmniscientRecord>,
}

impl<'a> Alice<'a> {
    pub(crate) fn new(
        variant: Variant,
        layout: &'a BrickworkLayout,
        input: Option<&StateVector>,
        buffer_mode: BufferMode,
        forced_r: &[(Coord, bool)],
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, ProtocolError> {
        let (rows, cols) = (layout.rows(), layout.columns());
        let theta: Vec<Vec<Octant>> =
            (0..cols).map(|_| (0..rows).map(|_| Octant::new(rng.random_range(0..8))).collect()).collect();
        let mut r: Vec<Vec<bool>> = (0..cols - 1).map(|_| (0..rows).map(|_| rng.random()).collect()).collect();
        let pads: Vec<bool> = match input {
            Some(_) => (0..rows).map(|_| rng.random()).collect(),
            None => vec![false; rows],
        };
        for &(c, bit) in forced_r {
            if c.x == 0 || c.x >= cols || c.y == 0 || c.y > rows {
                return Err(ProtocolError::Config(format!("forced r at {c} is not a measured coordinate")));
            }
            r[c.x - 1][c.y - 1] = bit;
        }
        // One-time pad: X^pad then Rz(θ) on each input wire.
        let input = match input {
            Some(v) => {
                let mut s = v.clone();
                for y in 0..rows {
                    if pads[y] {
                        s.apply(&Gate::single(GateKind::X, y))?;
                    }
                    s.apply(&Gate::single(GateKind::Rz(theta[0][y]), y))?;
                }
                Some(s)
            }
            None => None,
        };
        Ok(Alice {
            variant,
            layout,
            model: CostModel::steane(),
            buffer_mode,
            theta,
            r,
            record: MeasurementRecord::with_pads(layout, &pads),
            pads,
            has_input: input.is_some(),
            input,
            stage: AliceStage::Preparing,
            next_prep: Some(Coord::new(1, 1)),
            order: layout.measurement_order().collect(),
            cursor: 0,
            results: Vec::new(),
            selected: None,
            selection_ready: false,
            held: 0,
            high_water: 0,
            discarded: 0,
            output: None,
            output_rows: 0,
            final_output: None,
            handles: 0,
            cost: Account::default(),
            notes: Vec::new(),
        })
    }

    pub(crate) fn done(&self) -> bool {
        self.stage == AliceStage::Done
    }

    fn handle(&mut self) -> u64 {
        self.handles += 1;
        self.handles - 1
    }

    fn advance(&self, c: Coord) -> Option<Coord> {
        if c.y < self.layout.rows() {
            Some(Coord::new(c.x, c.y + 1))
        } else if c.x < self.layout.columns() {
            Some(Coord::new(c.x + 1, 1))
        } else {
            None
        }
    }

    fn note_preparation(&mut self, c: Coord) {
        let pad = (c.x == 1 && self.has_input).then(|| self.pads[c.y - 1]);
        self.notes.push(OmniscientRecord::Preparation { x: c.x, y: c.y, theta: self.theta[c.x - 1][c.y - 1], pad });
    }

    pub(crate) fn poll(&mut self) -> Result<Option<Outgoing>, ProtocolError> {
        match self.stage {
            AliceStage::Preparing => Ok(match self.variant {
                Variant::Protocol2 => self.selection(),
                _ => self.prepare_next(),
            }),
            AliceStage::Measuring => {
                let Some(&c) = self.order.get(self.cursor) else {
                    self.stage = AliceStage::ReceivingOutput;
                    return Ok(None);
                };
                let (sx, sz) = self.record.signals(self.layout, c)?;
                let phi_prime = corrected_angle(self.layout.phi(c), sx, sz);
                let delta = (phi_prime + self.theta[c.x - 1][c.y - 1]).plus_pi_if(self.r[c.x - 1][c.y - 1]);
                self.stage = AliceStage::AwaitingResult;
                Ok(Some(Outgoing::classical(ProtocolMessage::AngleAnnounce { x: c.x, y: c.y, delta })))
            }
            _ => Ok(None),
        }
    }

    /// Unencoded or Protocol 1 preparation of the next qubit.
    fn prepare_next(&mut self) -> Option<Outgoing> {
        let Some(c) = self.next_prep else {
            self.stage = AliceStage::Measuring;
            return None;
        };
        let th = self.theta[c.x - 1][c.y - 1];
        if self.variant == Variant::Protocol1 {
            self.cost.charge(self.model.alice_prep_avg(), self.model.alice_prep(th));
        }
        self.note_preparation(c);
        let payload = if c.x == 1 && self.has_input {
            Payload::Wire(if c.y == 1 { self.input.take() } else { None })
        } else {
            Payload::Equatorial(th)
        };
        self.high_water = 1;
        self.next_prep = self.advance(c);
        let message = ProtocolMessage::QubitTransfer {
            x: c.x,
            y: c.y,
            handle: self.handle(),
            physical_qubits: self.variant.block(),
            slot: None,
        };
        if self.next_prep.is_none() {
            self.stage = AliceStage::Measuring;
        }
        Some(Outgoing { message, payload: Some(payload), carried: PauliFrame::default() })
    }

    /// Protocol 2: sends back the chosen block once the whole batch is in,
    /// so the timing says nothing about θ.
    fn selection(&mut self) -> Option<Outgoing> {
        if !self.selection_ready {
            return None;
        }
        let c = self.next_prep.expect("batch in flight");
        let (payload, carried) = self.selected.take().expect("selected block held");
        self.selection_ready = false;
        self.note_preparation(c);
        if self.buffer_mode == BufferMode::EightQubit {
            self.discarded += 7;
        }
        self.held = 0;
        self.next_prep = self.advance(c);
        if self.next_prep.is_none() {
            self.stage = AliceStage::Measuring;
        }
        let message = ProtocolMessage::SelectionReturn { x: c.x, y: c.y, handle: self.handle(), physical_qubits: 7 };
        Some(Outgoing { message, payload: Some(payload), carried })
    }

    pub(crate) fn deliver(
        &mut self,
        message: ProtocolMessage,
        payload: Option<Payload>,
        noise: PauliFrame,
    ) -> Result<(), ProtocolError> {
        match message {
            ProtocolMessage::QubitTransfer { x, y, slot: Some(k), .. } if self.stage == AliceStage::Preparing => {
                let c = Coord::new(x, y);
                if Some(c) != self.next_prep || self.selection_ready {
                    return Err(ProtocolError::Invariant(format!("unexpected candidate block for {c}")));
                }
                self.held += 1;
                self.high_water = self.high_water.max(self.held);
                if k == self.theta[x - 1][y - 1].index() {
                    self.selected = Some((payload.expect("blocks carry a payload"), noise));
                } else if self.buffer_mode == BufferMode::MeasureAndDiscard {
                    self.held -= 1;
                    self.discarded += 1;
                    self.notes.push(OmniscientRecord::Discard { x, y, slot: k });
                }
                if k == 7 {
                    self.selection_ready = true;
                }
                Ok(())
            }
            ProtocolMessage::ResultAnnounce { x, y, bit } if self.stage == AliceStage::AwaitingResult => {
                let c = self.order[self.cursor];
                if c != Coord::new(x, y) {
                    return Err(ProtocolError::Invariant(format!("result for ({x}, {y}) while waiting on {c}")));
                }
                let (sx, sz) = self.record.signals(self.layout, c)?;
                let phi = self.layout.phi(c);
                let phi_prime = corrected_angle(phi, sx, sz);
                let th = self.theta[x - 1][y - 1];
                let rb = self.r[x - 1][y - 1];
                let delta = (phi_prime + th).plus_pi_if(rb);
                let s = bit ^ rb;
                self.record.push(c, s)?;
                self.results.push((c, s));
                self.notes.push(OmniscientRecord::Measurement { x, y, theta: th, r: rb, phi, phi_prime, delta, s });
                self.cursor += 1;
                self.stage = AliceStage::Measuring;
                Ok(())
            }
            ProtocolMessage::QubitTransfer { x, y, slot: None, .. }
                if matches!(self.stage, AliceStage::ReceivingOutput | AliceStage::Measuring)
                    && self.cursor == self.order.len()
                    && x == self.layout.columns() =>
            {
                self.stage = AliceStage::ReceivingOutput;
                if let Some(Payload::Wire(Some(reg))) = payload {
                    self.output = Some(reg);
                }
                if let Some(out) = self.output.as_mut() {
                    apply_pauli(out, y - 1, logical_effect(self.variant, noise))?;
                }
                self.output_rows += 1;
                if self.output_rows == self.layout.rows() {
                    self.finish()?;
                }
                Ok(())
            }
            other => Err(ProtocolError::Invariant(format!(
                "alice got {} at {} while {:?}",
                other.variant(),
                other.coord(),
                self.stage
            ))),
        }
    }

    fn finish(&mut self) -> Result<(), ProtocolError> {
        if let Some(mut s) = self.output.take() {
            let last = self.layout.columns() - 1;
            for y in 0..self.layout.rows() {
                s.apply(&Gate::single(GateKind::Rz(-self.theta[last][y]), y))?;
            }
            apply_corrections(&mut s, &output_corrections(self.layout, &self.record)?)?;
            self.final_output = Some(s);
        }
        self.stage = AliceStage::Done;
        Ok(())
    }
}

/// The server. Knows the brickwork shape and nothing about its angles.
pub(crate) struct Bob {
    variant: Variant,
    model: CostModel,
    exact: bool,
    shape: BrickworkLayout,
    rng: ChaCha8Rng,
    prepared: Vec<Vec<Octant>>,
    register: Option<StateVector>,
    received: usize,
    engine: Option<MbqcEngine>,
    pending: Option<(Coord, bool)>,
    measured: usize,
    /// Protocol 2: next candidate to prepare, and whether Alice still owes a pick.
    next_candidate: Option<(Coord, u8)>,
    awaiting_selection: bool,
    output_row: usize,
    pub(crate) prep: Account,
    pub(crate) bqc: Account,
    handles: u64,
}

impl Bob {
    pub(crate) fn new(variant: Variant, exact: bool, rows: usize, layers: usize, rng: ChaCha8Rng) -> Result<Self, ProtocolError> {
        let shape = BrickworkLayout::identity(rows, layers)?;
        let prepared = vec![vec![Octant::ZERO; rows]; shape.columns()];
        Ok(Bob {
            variant,
            model: CostModel::steane(),
            exact,
            shape,
            rng,
            prepared,
            register: None,
            received: 0,
            engine: None,
            pending: None,
            measured: 0,
            next_candidate: (variant == Variant::Protocol2).then(|| (Coord::new(1, 1), 0)),
            awaiting_selection: false,
            output_row: 0,
            prep: Account::default(),
            bqc: Account::default(),
            handles: 1 << 32,
        })
    }

    fn handle(&mut self) -> u64 {
        self.handles += 1;
        self.handles - 1
    }

    fn total(&self) -> usize {
        self.shape.num_qubits()
    }

    pub(crate) fn poll(&mut self) -> Result<Option<Outgoing>, ProtocolError> {
        if let Some((c, k)) = self.next_candidate {
            if self.awaiting_selection {
                return Ok(None);
            }
            let theta = Octant::new(i64::from(k));
            self.prep.charge(self.model.alice_prep_avg(), self.model.alice_prep(theta));
            let message = ProtocolMessage::QubitTransfer { x: c.x, y: c.y, handle: self.handle(), physical_qubits: 7, slot: Some(k) };
            self.next_candidate = if k < 7 {
                Some((c, k + 1))
            } else {
                self.awaiting_selection = true;
                let rows = self.shape.rows();
                if c.y < rows {
                    Some((Coord::new(c.x, c.y + 1), 0))
                } else if c.x < self.shape.columns() {
                    Some((Coord::new(c.x + 1, 1), 0))
                } else {
                    None
                }
            };
            return Ok(Some(Outgoing { message, payload: Some(Payload::Equatorial(theta)), carried: PauliFrame::default() }));
        }
        if let Some((c, bit)) = self.pending.take() {
            return Ok(Some(Outgoing::classical(ProtocolMessage::ResultAnnounce { x: c.x, y: c.y, bit })));
        }
        let rows = self.shape.rows();
        if self.received == self.total() && self.measured == self.shape.measured_qubits() && self.output_row < rows {
            self.output_row += 1;
            let y = self.output_row;
            let payload = match (y, self.engine.take()) {
                (1, Some(e)) => Payload::Wire(Some(e.into_output()?)),
                _ => Payload::Wire(None),
            };
            let message = ProtocolMessage::QubitTransfer {
                x: self.shape.columns(),
                y,
                handle: self.handle(),
                physical_qubits: self.variant.block(),
                slot: None,
            };
            return Ok(Some(Outgoing { message, payload: Some(payload), carried: PauliFrame::default() }));
        }
        Ok(None)
    }

    pub(crate) fn deliver(
        &mut self,
        message: ProtocolMessage,
        payload: Option<Payload>,
        noise: PauliFrame,
    ) -> Result<(), ProtocolError> {
        match message {
            ProtocolMessage::QubitTransfer { x, y, slot: None, .. } | ProtocolMessage::SelectionReturn { x, y, .. }
                if self.received < self.total() =>
            {
                let logical = logical_effect(self.variant, noise);
                match payload {
                    Some(Payload::Equatorial(theta)) => {
                        self.prepared[x - 1][y - 1] = pauli_on_equatorial(theta, logical.0, logical.1)
                    }
                    Some(Payload::Wire(reg)) => {
                        if let Some(reg) = reg {
                            self.register = Some(reg);
                        }
                        let reg = self
                            .register
                            .as_mut()
                            .ok_or_else(|| ProtocolError::Invariant(format!("input wire ({x}, {y}) before its register")))?;
                        apply_pauli(reg, y - 1, logical)?;
                    }
                    None => return Err(ProtocolError::Invariant(format!("qubit transfer at ({x}, {y}) without a payload"))),
                }
                self.awaiting_selection = false;
                self.received += 1;
                if self.received == self.total() {
                    self.entangle()?;
                }
                Ok(())
            }
            ProtocolMessage::AngleAnnounce { x, y, delta } if self.received == self.total() && self.pending.is_none() => {
                let c = Coord::new(x, y);
                let raw = match self.engine.as_mut() {
                    Some(e) => {
                        if e.next_coord() != Some(c) {
                            return Err(ProtocolError::Invariant(format!("angle for {c} out of order")));
                        }
                        e.measure(delta, &mut self.rng)?
                    }
                    // Same coupling as the statevector measurement: δ and δ+π share a draw.
                    None => self.rng.random::<bool>() ^ (delta.index() >= 4),
                };
                if self.variant == Variant::BfkBasic {
                    self.bqc.charge(CostModel::physical_measurement_avg(), CostModel::physical_measurement(delta));
                } else {
                    self.bqc.charge(self.model.logical_measurement_avg(), self.model.logical_measurement(delta));
                }
                self.measured += 1;
                self.pending = Some((c, raw));
                Ok(())
            }
            other => Err(ProtocolError::Invariant(format!("bob got {} at {}", other.variant(), other.coord()))),
        }
    }

    /// Every qubit is in: apply the CZ edges and, on the exact backend, build the state.
    fn entangle(&mut self) -> Result<(), ProtocolError> {
        let edges = self.shape.edges().len() as u64;
        let cz = if self.variant == Variant::BfkBasic { CostVector::ints(0, 1, 0, 0) } else { self.model.transversal_two() };
        self.bqc.charge(cz * edges, cz * edges);
        if self.exact {
            let base = match self.register.take() {
                Some(reg) => {
                    self.prepared[0].iter_mut().for_each(|a| *a = Octant::ZERO);
                    reg
                }
                None => {
                    let col = std::mem::replace(&mut self.prepared[0], vec![Octant::ZERO; self.shape.rows()]);
                    product_input(&col)?
                }
            };
            self.engine = Some(MbqcEngine::new(&self.shape, base, self.prepared.clone())?);
        }
        Ok(())
    }
}
