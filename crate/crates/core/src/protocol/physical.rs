//! One logical qubit through the encoded pipeline at the physical level:
//! encode at an octant angle, cross the channel, correct, measure.

use serde::{Deserialize, Serialize};

use super::channel::PauliFrame;
use super::ProtocolError;
use crate::ledger::{CostModel, CostVector};
use crate::simcore::{Octant, StateVector};
use crate::steane::{
    apply_logical_phase, classical_decode, decode_to_logical, extract_and_correct, ft_measure_z_destructive,
    prepare_logical_zero, transversal_gate, CodeBlock, PhysicalTally, Register, Syndrome, TransversalKind,
};

/// Register width for one block plus the ancillas its gadgets need.
fn width(t_gate: bool) -> usize {
    if t_gate {
        22
    } else {
        15
    }
}

/// Logical Pauli `(X, Z)` left on a Steane block after ideal single-error
/// correction of `noise`. Identity means the block is recovered.
pub fn residual_logical(noise: PauliFrame) -> (bool, bool) {
    let bits = |mask: u8| -> [bool; 7] { std::array::from_fn(|p| mask >> p & 1 == 1) };
    (classical_decode(bits(noise.x)), classical_decode(bits(noise.z)))
}

/// Angle of `X^x Z^z |+_θ⟩`, up to global phase.
pub fn pauli_on_equatorial(theta: Octant, x: bool, z: bool) -> Octant {
    theta.plus_pi_if(z).negate_if(x)
}

/// Keeps only `block`'s wires (all others must be in |0⟩), position `i` on wire `i`.
fn extract_block(state: &StateVector, block: &CodeBlock) -> Result<StateVector, ProtocolError> {
    let mut s = state.clone();
    let n = s.num_qubits();
    for w in (0..n).rev() {
        if block.wires().contains(&w) {
            continue;
        }
        if s.probability_one(w)? > 1e-12 {
            return Err(ProtocolError::Invariant(format!("wire {w} is not clean outside the block")));
        }
        s.remove_wire(w, false)?;
    }
    let mut sorted = *block.wires();
    sorted.sort_unstable();
    let rank: [usize; 7] = std::array::from_fn(|p| sorted.iter().position(|&w| w == block.wires()[p]).expect("own wire"));
    let amps = s.amplitudes();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); 128];
    for (j, a) in amps.iter().enumerate() {
        let k = (0..7).fold(0usize, |acc, p| (acc << 1) | (j >> (6 - rank[p]) & 1));
        out[k] = *a;
    }
    Ok(StateVector::from_amplitudes(out)?)
}

/// Fault-tolerant `|+_θ⟩_L`: |0⟩_L, transversal H, logical phase. Returns the
/// seven-qubit payload and the physical gates spent.
pub fn prepare_block(theta: Octant, seed: u64) -> Result<(StateVector, PhysicalTally), ProtocolError> {
    let mut reg = Register::new(width(theta.is_odd()), seed)?;
    let b = reg.alloc_block()?;
    prepare_logical_zero(&mut reg, &b)?;
    transversal_gate(&mut reg, TransversalKind::H, &[b])?;
    let out = apply_logical_phase(&mut reg, &b, theta)?;
    Ok((extract_block(reg.state(), &out)?, reg.tally()))
}

/// Receiver side: the payload lands on wires 0–6 with `noise` applied, then
/// one round of syndrome extraction and correction. `wires` sizes the register.
pub fn receive_block(
    payload: &StateVector,
    noise: PauliFrame,
    wires: usize,
    seed: u64,
) -> Result<(Register, CodeBlock, Syndrome), ProtocolError> {
    let mut state = payload.clone();
    if wires > 7 {
        state = state.tensor(&StateVector::new(wires - 7)?)?;
    }
    let block = CodeBlock::contiguous(0);
    let mut reg = Register::from_state(state, block.wires(), seed);
    for (p, pauli) in noise.paulis() {
        reg.inject(p, pauli)?;
    }
    let syndrome = extract_and_correct(&mut reg, &block)?;
    Ok((reg, block, syndrome))
}

/// Server measurement in `M(δ)`: logical phase `−δ`, transversal H, destructive Z readout.
pub fn measure_block(reg: &mut Register, block: &CodeBlock, delta: Octant) -> Result<bool, ProtocolError> {
    let b = apply_logical_phase(reg, block, -delta)?;
    transversal_gate(reg, TransversalKind::H, &[b])?;
    Ok(ft_measure_z_destructive(reg, &b)?)
}

/// Result of running one coordinate's qubit through the physical pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub x: usize,
    pub y: usize,
    pub theta: Octant,
    pub delta: Octant,
    pub noise: String,
    pub syndrome: Syndrome,
    /// Logical angle the corrected block should hold.
    pub expected_angle: Octant,
    pub decoded_fidelity: f64,
    pub prep: CostVector,
    pub prep_model: CostVector,
    pub correction: CostVector,
    pub measurement: CostVector,
    pub measurement_model: CostVector,
    pub outcome: bool,
}

impl SpotCheck {
    pub fn prep_matches(&self) -> bool {
        self.prep == self.prep_model
    }

    pub fn measurement_matches(&self) -> bool {
        self.measurement == self.measurement_model
    }
}

pub(crate) fn frame_text(f: PauliFrame) -> String {
    let v: Vec<String> = f.paulis().into_iter().map(|(p, q)| format!("{q}{p}")).collect();
    if v.is_empty() {
        "I".into()
    } else {
        v.join("")
    }
}

/// Prepares `|+_θ⟩_L`, applies `noise`, corrects, decodes against the
/// logical-level prediction, then measures in `M(δ)`.
pub fn spot_check(
    model: &CostModel,
    coord: (usize, usize),
    theta: Octant,
    noise: PauliFrame,
    delta: Octant,
    seed: u64,
) -> Result<SpotCheck, ProtocolError> {
    let (payload, prep_tally) = prepare_block(theta, seed)?;
    let (mut reg, block, syndrome) = receive_block(&payload, noise, width(delta.is_odd()), seed ^ 0x5eed)?;
    let correction = reg.tally();
    let (lx, lz) = residual_logical(noise);
    let expected_angle = pauli_on_equatorial(theta, lx, lz);
    let decoded_fidelity = decode_to_logical(reg.state(), &block)?.fidelity(&StateVector::equatorial(expected_angle))?;
    let outcome = measure_block(&mut reg, &block, delta)?;
    let measurement = reg.tally().since(&correction);
    Ok(SpotCheck {
        x: coord.0,
        y: coord.1,
        theta,
        delta,
        noise: frame_text(noise),
        syndrome,
        expected_angle,
        decoded_fidelity,
        prep: CostVector::from_tally(&prep_tally),
        prep_model: model.alice_prep(theta),
        correction: CostVector::from_tally(&correction),
        measurement: CostVector::from_tally(&measurement),
        measurement_model: model.logical_measurement(delta),
        outcome,
    })
}
