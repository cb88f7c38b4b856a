use serde::{Deserialize, Serialize};

use super::code::{classical_decode, CodeBlock, StabilizerName, Syndrome};
use super::register::{Checkpoint, Register, Site};
use super::SteaneError;
use crate::simcore::{GateKind, Octant, Pauli};

/// Verification attempts per cat before giving up.
pub const MAX_CAT_ATTEMPTS: usize = 3;

/// Repetitions behind every majority-voted measurement.
pub const REPETITIONS: usize = 3;

/// Operators with a fault-tolerant measurement gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalOperator {
    Stabilizer(StabilizerName),
    XL,
    ZL,
    /// `e^{−iπ/4}SX` on the logical qubit; its +1 eigenvector is the magic state.
    Magic,
}

/// Builds a GHZ state on `cat` with a CNOT chain, then checks the end-to-end
/// parity on `verify`. Returns the verification bit (0 on success).
pub fn prepare_cat(reg: &mut Register, cat: &[usize], verify: usize) -> Result<bool, SteaneError> {
    reg.gate(GateKind::H, &[cat[0]])?;
    for pair in cat.windows(2) {
        reg.gate(GateKind::Cnot, &[pair[0], pair[1]])?;
    }
    reg.checkpoint(Checkpoint::CatPrepared, Site { cat, verify: Some(verify), block: None })?;
    reg.gate(GateKind::Cnot, &[cat[0], verify])?;
    reg.gate(GateKind::Cnot, &[cat[cat.len() - 1], verify])?;
    reg.measure(verify)
}

/// Takes `size + 1` ancillas and retries until a cat verifies.
fn verified_cat(reg: &mut Register, size: usize) -> Result<(Vec<usize>, usize), SteaneError> {
    for _ in 0..MAX_CAT_ATTEMPTS {
        let mut wires = reg.take_wires(size + 1)?;
        let verify = wires.pop().expect("size + 1 wires");
        if !prepare_cat(reg, &wires, verify)? {
            return Ok((wires, verify));
        }
        reg.usage_mut().cat_retries += 1;
        wires.push(verify);
        reg.release(&wires)?;
    }
    Err(SteaneError::FaultEscalation { attempts: MAX_CAT_ATTEMPTS })
}

/// One repetition: verified cat, transversal coupling, decode, read the parity.
fn measure_once(reg: &mut Register, block: &CodeBlock, op: LogicalOperator) -> Result<bool, SteaneError> {
    let size = match op {
        LogicalOperator::Stabilizer(_) => 4,
        _ => 7,
    };
    let (cat, verify) = verified_cat(reg, size)?;
    let d = block.wires();
    match op {
        LogicalOperator::Stabilizer(name) => {
            let k = name.stabilizer();
            let kind = if k.pauli == Pauli::X { GateKind::Cnot } else { GateKind::Cz };
            for (c, p) in cat.iter().zip(k.positions()) {
                reg.gate(kind, &[*c, d[p]])?;
            }
        }
        LogicalOperator::XL | LogicalOperator::ZL => {
            let kind = if op == LogicalOperator::XL { GateKind::Cnot } else { GateKind::Cz };
            for (c, t) in cat.iter().zip(d) {
                reg.gate(kind, &[*c, *t])?;
            }
        }
        LogicalOperator::Magic => {
            // Controlled-(e^{iπ/4}·S†X) per position; the seven phases multiply
            // to e^{−iπ/4} and S†^⊗7 acts as S on the code space.
            for (c, t) in cat.iter().zip(d) {
                reg.gate(GateKind::T, &[*c])?;
                reg.gate(GateKind::Cnot, &[*c, *t])?;
                reg.gate(GateKind::CPhase, &[*c, *t])?;
                reg.gate(GateKind::Cz, &[*c, *t])?;
            }
        }
    }
    reg.checkpoint(Checkpoint::CatCoupled, Site { cat: &cat, verify: Some(verify), block: Some(block) })?;
    for pair in cat.windows(2).rev() {
        reg.gate(GateKind::Cnot, &[pair[0], pair[1]])?;
    }
    reg.gate(GateKind::H, &[cat[0]])?;
    let bit = reg.measure(cat[0])?;
    let mut all = cat;
    all.push(verify);
    reg.release(&all)?;
    Ok(bit)
}

/// Majority of [`REPETITIONS`] repetitions, plus whether they were unanimous.
fn measure_voted(reg: &mut Register, block: &CodeBlock, op: LogicalOperator) -> Result<(bool, bool), SteaneError> {
    let mut ones = 0;
    for _ in 0..REPETITIONS {
        ones += usize::from(measure_once(reg, block, op)?);
    }
    Ok((2 * ones > REPETITIONS, ones == 0 || ones == REPETITIONS))
}

/// Fault-tolerant, non-destructive measurement; returns 1 for the −1 eigenvalue.
pub fn ft_measure_operator(reg: &mut Register, block: &CodeBlock, op: LogicalOperator) -> Result<bool, SteaneError> {
    Ok(measure_voted(reg, block, op)?.0)
}

/// Destructive Z_L readout: two cat repetitions plus a transversal readout
/// decoded classically as the third vote. The block's wires are released.
pub fn ft_measure_z_destructive(reg: &mut Register, block: &CodeBlock) -> Result<bool, SteaneError> {
    let mut ones = 0;
    for _ in 0..REPETITIONS - 1 {
        ones += usize::from(measure_once(reg, block, LogicalOperator::ZL)?);
    }
    let mut bits = [false; 7];
    for (b, &w) in bits.iter_mut().zip(block.wires()) {
        *b = reg.measure(w)?;
    }
    ones += usize::from(classical_decode(bits));
    reg.release_block(block)?;
    reg.usage_mut().destructive_z += 1;
    Ok(2 * ones > REPETITIONS)
}

/// |0⟩_L from |0⟩^⊗7: measure K1–K3, then one Z (always charged) moves the
/// block into the +1 eigenspace of all three.
pub fn prepare_logical_zero(reg: &mut Register, block: &CodeBlock) -> Result<(), SteaneError> {
    if reg.free_wires() < 5 {
        return Err(SteaneError::InsufficientAncillas { needed: 5, available: reg.free_wires() });
    }
    let mut bits = [false; 3];
    for (i, name) in StabilizerName::ALL[..3].iter().enumerate() {
        bits[i] = ft_measure_operator(reg, block, LogicalOperator::Stabilizer(*name))?;
    }
    let fix = Syndrome { x_bits: bits, z_bits: [false; 3] }.z_error_position();
    reg.conditional(GateKind::Z, &[block.wires()[fix.unwrap_or(0)]], fix.is_some())?;
    reg.usage_mut().zero_preps += 1;
    reg.checkpoint(Checkpoint::ZeroPrepared, Site { block: Some(block), ..Site::default() })
}

/// Logical gates with a transversal implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransversalKind {
    H,
    X,
    Z,
    S,
    Sdg,
    Cnot,
    Cz,
}

/// Applies the logical gate position by position. For two-block kinds `blocks[0]`
/// is the control. Logical S is S† on every position and vice versa.
pub fn transversal_gate(reg: &mut Register, kind: TransversalKind, blocks: &[CodeBlock]) -> Result<(), SteaneError> {
    let two = matches!(kind, TransversalKind::Cnot | TransversalKind::Cz);
    if blocks.len() != if two { 2 } else { 1 } {
        return Err(SteaneError::InvalidBlock(format!("{kind:?} takes {} block(s)", if two { 2 } else { 1 })));
    }
    if two && blocks[0].overlaps(&blocks[1]) {
        return Err(SteaneError::OverlappingBlocks);
    }
    let physical = match kind {
        TransversalKind::H => GateKind::H,
        TransversalKind::X => GateKind::X,
        TransversalKind::Z => GateKind::Z,
        TransversalKind::S => GateKind::Sdg,
        TransversalKind::Sdg => GateKind::S,
        TransversalKind::Cnot => GateKind::Cnot,
        TransversalKind::Cz => GateKind::Cz,
    };
    for p in 0..7 {
        if two {
            reg.gate(physical, &[blocks[0].wires()[p], blocks[1].wires()[p]])?;
        } else {
            reg.gate(physical, &[blocks[0].wires()[p]])?;
        }
    }
    Ok(())
}

/// Transversal gate charged always, applied only when `fire`.
fn conditional_transversal(reg: &mut Register, kind: TransversalKind, block: &CodeBlock, fire: bool) -> Result<(), SteaneError> {
    let physical = match kind {
        TransversalKind::X => GateKind::X,
        TransversalKind::Z => GateKind::Z,
        TransversalKind::S => GateKind::Sdg,
        other => return Err(SteaneError::InvalidBlock(format!("no conditional form for {other:?}"))),
    };
    for &w in block.wires() {
        reg.conditional(physical, &[w], fire)?;
    }
    Ok(())
}

/// Measures the magic operator on a block holding |0⟩_L and fixes a −1 outcome with Z_L.
pub fn prepare_magic_from_zero(reg: &mut Register, block: &CodeBlock) -> Result<(), SteaneError> {
    let bit = ft_measure_operator(reg, block, LogicalOperator::Magic)?;
    conditional_transversal(reg, TransversalKind::Z, block, bit)?;
    reg.usage_mut().magic_states += 1;
    reg.checkpoint(Checkpoint::MagicPrepared, Site { block: Some(block), ..Site::default() })
}

/// Fresh |0⟩_L followed by the magic measurement.
pub fn prepare_magic(reg: &mut Register, block: &CodeBlock) -> Result<(), SteaneError> {
    prepare_logical_zero(reg, block)?;
    prepare_magic_from_zero(reg, block)
}

/// Fault-tolerant T by magic-state injection. Allocates and prepares a magic
/// block, which carries the output; `data` is measured out and released.
pub fn ft_t_gate(reg: &mut Register, data: &CodeBlock) -> Result<CodeBlock, SteaneError> {
    let magic = reg.alloc_block()?;
    prepare_magic(reg, &magic)?;
    ft_t_gate_with(reg, data, &magic)?;
    Ok(magic)
}

/// The injection step proper, with a caller-supplied magic block.
pub fn ft_t_gate_with(reg: &mut Register, data: &CodeBlock, magic: &CodeBlock) -> Result<(), SteaneError> {
    transversal_gate(reg, TransversalKind::Cnot, &[*magic, *data])?;
    let z = ft_measure_z_destructive(reg, data)?;
    // (SX)_L: X then S† on every position.
    for &w in magic.wires() {
        reg.conditional(GateKind::X, &[w], z)?;
        reg.conditional(GateKind::Sdg, &[w], z)?;
    }
    reg.usage_mut().ft_t_gates += 1;
    Ok(())
}

/// Logical gate word realizing `R_z(kπ/4)` for each octant.
pub fn phase_word(theta: Octant) -> (bool, Option<TransversalKind>) {
    let clifford = match theta.index() / 2 {
        0 => None,
        1 => Some(TransversalKind::S),
        2 => Some(TransversalKind::Z),
        _ => Some(TransversalKind::Sdg),
    };
    (theta.is_odd(), clifford)
}

/// Applies logical `R_z(θ)`. Returns the block now holding the qubit, which
/// differs from `block` whenever a T gate was injected.
pub fn apply_logical_phase(reg: &mut Register, block: &CodeBlock, theta: Octant) -> Result<CodeBlock, SteaneError> {
    let (t, clifford) = phase_word(theta);
    if let Some(kind) = clifford {
        transversal_gate(reg, kind, &[*block])?;
    }
    if t {
        ft_t_gate(reg, block)
    } else {
        Ok(*block)
    }
}

/// Stabilizer readout, run until two consecutive rounds agree (at most three rounds).
fn read_syndrome(reg: &mut Register, block: &CodeBlock) -> Result<Syndrome, SteaneError> {
    let mut last: Option<Syndrome> = None;
    for _ in 0..3 {
        let mut s = Syndrome::default();
        let mut clean = true;
        for (i, name) in StabilizerName::ALL.iter().enumerate() {
            let (bit, unanimous) = measure_voted(reg, block, LogicalOperator::Stabilizer(*name))?;
            clean &= unanimous;
            if i < 3 {
                s.x_bits[i] = bit;
            } else {
                s.z_bits[i - 3] = bit;
            }
        }
        if clean || last == Some(s) {
            return Ok(s);
        }
        last = Some(s);
    }
    Err(SteaneError::Uncorrectable(format!(
        "syndrome rounds disagree, last {}",
        last.expect("at least one round")
    )))
}

/// Measures all six stabilizers and undoes the located X and Z components.
pub fn extract_and_correct(reg: &mut Register, block: &CodeBlock) -> Result<Syndrome, SteaneError> {
    let s = read_syndrome(reg, block)?;
    let d = block.wires();
    let xp = s.x_error_position();
    let zp = s.z_error_position();
    reg.conditional(GateKind::X, &[d[xp.unwrap_or(0)]], xp.is_some())?;
    reg.conditional(GateKind::Z, &[d[zp.unwrap_or(0)]], zp.is_some())?;
    Ok(s)
}

/// Measures all six stabilizers without correcting.
pub fn extract_syndrome(reg: &mut Register, block: &CodeBlock) -> Result<Syndrome, SteaneError> {
    read_syndrome(reg, block)
}
