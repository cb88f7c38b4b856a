use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CodeBlock, SteaneError};
use crate::simcore::{Gate, GateKind, Pauli, StateVector};

/// Physical operation counts in the four ledger categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhysicalTally {
    pub t_gates: u64,
    pub two_qubit: u64,
    pub one_qubit: u64,
    pub measurements: u64,
}

impl PhysicalTally {
    pub const fn new(t_gates: u64, two_qubit: u64, one_qubit: u64, measurements: u64) -> Self {
        PhysicalTally { t_gates, two_qubit, one_qubit, measurements }
    }

    /// Counts `kind` into its category. Resets and identities are free.
    pub fn charge(&mut self, kind: GateKind) {
        match kind {
            GateKind::I => {}
            GateKind::T | GateKind::Tdg => self.t_gates += 1,
            GateKind::Rz(k) if k.is_odd() => self.t_gates += 1,
            GateKind::Rz(k) if k.index() == 0 => {}
            GateKind::Cnot | GateKind::Cz | GateKind::CPhase | GateKind::Swap | GateKind::Toffoli => self.two_qubit += 1,
            _ => self.one_qubit += 1,
        }
    }

    /// Component-wise difference; saturates at zero.
    pub fn since(&self, earlier: &PhysicalTally) -> PhysicalTally {
        PhysicalTally {
            t_gates: self.t_gates.saturating_sub(earlier.t_gates),
            two_qubit: self.two_qubit.saturating_sub(earlier.two_qubit),
            one_qubit: self.one_qubit.saturating_sub(earlier.one_qubit),
            measurements: self.measurements.saturating_sub(earlier.measurements),
        }
    }
}

impl Add for PhysicalTally {
    type Output = PhysicalTally;
    fn add(self, o: PhysicalTally) -> PhysicalTally {
        PhysicalTally {
            t_gates: self.t_gates + o.t_gates,
            two_qubit: self.two_qubit + o.two_qubit,
            one_qubit: self.one_qubit + o.one_qubit,
            measurements: self.measurements + o.measurements,
        }
    }
}

impl AddAssign for PhysicalTally {
    fn add_assign(&mut self, o: PhysicalTally) {
        *self = *self + o;
    }
}

/// Counts of consumed logical resources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub zero_preps: u64,
    pub magic_states: u64,
    pub ft_t_gates: u64,
    pub destructive_z: u64,
    pub cat_retries: u64,
}

/// Named points in the gadgets where planned faults fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Checkpoint {
    /// Cat built, not yet verified.
    CatPrepared,
    /// Cat coupled to the data, not yet decoded.
    CatCoupled,
    /// End of logical |0⟩ preparation.
    ZeroPrepared,
    /// End of magic-state preparation.
    MagicPrepared,
}

/// Where a planned fault lands, relative to the gadget that hits the checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultTarget {
    Cat(usize),
    Verify,
    Block(usize),
    Wire(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub checkpoint: Checkpoint,
    /// Zero-based count of earlier hits of the same checkpoint.
    pub occurrence: usize,
    pub target: FaultTarget,
    pub pauli: Pauli,
}

/// Wires a checkpoint can resolve targets against.
#[derive(Debug, Default)]
pub(crate) struct Site<'a> {
    pub cat: &'a [usize],
    pub verify: Option<usize>,
    pub block: Option<&'a CodeBlock>,
}

/// A statevector plus everything the gadgets thread through it: the seeded
/// generator, the physical tally, planned faults and the free-ancilla pool.
#[derive(Debug, Clone)]
pub struct Register {
    state: StateVector,
    rng: ChaCha8Rng,
    tally: PhysicalTally,
    usage: Usage,
    faults: Vec<Fault>,
    hits: HashMap<Checkpoint, usize>,
    free: Vec<usize>,
}

impl Register {
    /// All wires start in |0⟩ and free.
    pub fn new(num_qubits: usize, seed: u64) -> Result<Self, SteaneError> {
        Ok(Register {
            state: StateVector::new(num_qubits)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tally: PhysicalTally::default(),
            usage: Usage::default(),
            faults: Vec::new(),
            hits: HashMap::new(),
            free: (0..num_qubits).rev().collect(),
        })
    }

    /// Wraps an existing state. Wires outside `busy` must be in |0⟩; they form the pool.
    pub fn from_state(state: StateVector, busy: &[usize], seed: u64) -> Self {
        let n = state.num_qubits();
        Register {
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tally: PhysicalTally::default(),
            usage: Usage::default(),
            faults: Vec::new(),
            hits: HashMap::new(),
            free: (0..n).rev().filter(|w| !busy.contains(w)).collect(),
        }
    }

    pub fn with_faults(mut self, faults: Vec<Fault>) -> Self {
        self.faults = faults;
        self
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut StateVector {
        &mut self.state
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn tally(&self) -> PhysicalTally {
        self.tally
    }

    pub fn usage(&self) -> Usage {
        self.usage
    }

    pub(crate) fn usage_mut(&mut self) -> &mut Usage {
        &mut self.usage
    }

    pub fn free_wires(&self) -> usize {
        self.free.len()
    }

    /// Takes `k` free wires (lowest indices first); they are in |0⟩.
    pub fn take_wires(&mut self, k: usize) -> Result<Vec<usize>, SteaneError> {
        if self.free.len() < k {
            return Err(SteaneError::InsufficientAncillas { needed: k, available: self.free.len() });
        }
        Ok((0..k).map(|_| self.free.pop().expect("length checked")).collect())
    }

    pub fn alloc_block(&mut self) -> Result<CodeBlock, SteaneError> {
        let w = self.take_wires(7)?;
        CodeBlock::new(std::array::from_fn(|i| w[i]))
    }

    /// Resets `wires` to |0⟩ (uncounted) and returns them to the pool.
    pub fn release(&mut self, wires: &[usize]) -> Result<(), SteaneError> {
        for &w in wires {
            self.state.reset(w, &mut self.rng)?;
            self.free.push(w);
        }
        self.free.sort_unstable_by(|a, b| b.cmp(a));
        Ok(())
    }

    pub fn release_block(&mut self, block: &CodeBlock) -> Result<(), SteaneError> {
        self.release(block.wires())
    }

    /// Applies and tallies one gate.
    pub fn gate(&mut self, kind: GateKind, wires: &[usize]) -> Result<(), SteaneError> {
        let g = Gate::new(kind, wires)?;
        self.state.apply(&g)?;
        self.tally.charge(kind);
        Ok(())
    }

    /// Tallies a classically controlled gate whether or not it fires.
    pub fn conditional(&mut self, kind: GateKind, wires: &[usize], fire: bool) -> Result<(), SteaneError> {
        if fire {
            self.gate(kind, wires)
        } else {
            Gate::new(kind, wires)?;
            self.tally.charge(kind);
            Ok(())
        }
    }

    pub fn measure(&mut self, wire: usize) -> Result<bool, SteaneError> {
        self.tally.measurements += 1;
        Ok(self.state.measure_z(wire, &mut self.rng)?)
    }

    /// Uncounted Pauli, as an error would apply it.
    pub fn inject(&mut self, wire: usize, pauli: Pauli) -> Result<(), SteaneError> {
        Ok(self.state.inject_pauli(wire, pauli)?)
    }

    pub(crate) fn checkpoint(&mut self, cp: Checkpoint, site: Site<'_>) -> Result<(), SteaneError> {
        let count = self.hits.entry(cp).or_insert(0);
        let occurrence = *count;
        *count += 1;
        let due: Vec<Fault> = self
            .faults
            .iter()
            .filter(|f| f.checkpoint == cp && f.occurrence == occurrence)
            .copied()
            .collect();
        for f in due {
            let wire = match f.target {
                FaultTarget::Cat(i) => site.cat.get(i).copied(),
                FaultTarget::Verify => site.verify,
                FaultTarget::Block(i) => site.block.map(|b| b.wires()[i]),
                FaultTarget::Wire(w) => Some(w),
            };
            let wire = wire.ok_or_else(|| {
                SteaneError::InvalidBlock(format!("fault target {:?} has no wire at {cp:?}", f.target))
            })?;
            self.inject(wire, f.pauli)?;
        }
        Ok(())
    }
}
