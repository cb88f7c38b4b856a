use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::CostVector;
use crate::simcore::Octant;
use crate::steane::phase_word;

/// Per-primitive logical costs on the [[7,1,3]] code. Each constant is
/// reproduced gate-for-gate by the physical gadgets in `steane`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    /// Magic-state T gate.
    pub ft_t: CostVector,
    /// Verified logical |0⟩.
    pub zero_prep: CostVector,
    /// Destructive logical Z readout.
    pub ft_meas_z: CostVector,
    /// Physical qubits per logical qubit.
    pub block: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::steane()
    }
}

fn avg<I: IntoIterator<Item = CostVector>>(it: I) -> CostVector {
    let v: Vec<CostVector> = it.into_iter().collect();
    let n = v.len() as i64;
    v.into_iter().sum::<CostVector>().scale(Rational64::new(1, n))
}

impl CostModel {
    pub const fn steane() -> Self {
        CostModel {
            ft_t: CostVector::ints(21, 262, 50, 35),
            zero_prep: CostVector::ints(0, 108, 19, 18),
            ft_meas_z: CostVector::ints(0, 42, 4, 11),
            block: 7,
        }
    }

    /// One transversal single-qubit gate.
    pub fn transversal_one(&self) -> CostVector {
        CostVector::ints(0, 0, self.block as i64, 0)
    }

    /// One transversal two-qubit gate (the FT CZ).
    pub fn transversal_two(&self) -> CostVector {
        CostVector::ints(0, self.block as i64, 0, 0)
    }

    /// Logical `R_z(kπ/4)`: an injected T when `k` is odd, then at most one transversal Clifford.
    pub fn phase_shift(&self, k: Octant) -> CostVector {
        let (t, clifford) = phase_word(k);
        let mut c = CostVector::ZERO;
        if t {
            c += self.ft_t;
        }
        if clifford.is_some() {
            c += self.transversal_one();
        }
        c
    }

    pub fn phase_shift_avg(&self) -> CostVector {
        avg(Octant::ALL.map(|k| self.phase_shift(k)))
    }

    /// Client-side preparation of one padded qubit `|+_θ⟩_L`.
    pub fn alice_prep(&self, theta: Octant) -> CostVector {
        self.zero_prep + self.transversal_one() + self.phase_shift(theta)
    }

    pub fn alice_prep_avg(&self) -> CostVector {
        avg(Octant::ALL.map(|k| self.alice_prep(k)))
    }

    /// Server-side measurement of one logical qubit in `M(δ)`: phase `−δ`, H, Z readout.
    pub fn logical_measurement(&self, delta: Octant) -> CostVector {
        self.phase_shift(-delta) + self.transversal_one() + self.ft_meas_z
    }

    pub fn logical_measurement_avg(&self) -> CostVector {
        avg(Octant::ALL.map(|k| self.logical_measurement(k)))
    }

    /// 8 measured qubits and 10 CZ edges.
    pub fn brick_cost(&self) -> CostVector {
        self.logical_measurement_avg() * 8 + self.transversal_two() * 10
    }

    /// 4 measured qubits and 4 CZ edges.
    pub fn half_brick_cost(&self) -> CostVector {
        self.logical_measurement_avg() * 4 + self.transversal_two() * 4
    }

    /// Unencoded `R_z(kπ/4)`: one T when `k` is odd, at most one Clifford.
    pub fn physical_phase_shift(k: Octant) -> CostVector {
        let (t, clifford) = phase_word(k);
        CostVector::ints(i64::from(t), 0, i64::from(clifford.is_some()), 0)
    }

    /// Unencoded `M(δ)` measurement: phase, H, Z readout.
    pub fn physical_measurement(delta: Octant) -> CostVector {
        Self::physical_phase_shift(-delta) + CostVector::ints(0, 0, 1, 1)
    }

    pub fn physical_measurement_avg() -> CostVector {
        avg(Octant::ALL.map(Self::physical_measurement))
    }

    /// Exact client preparation cost for a concrete list of pad angles.
    pub fn alice_prep_exact(&self, thetas: &[Octant]) -> CostVector {
        thetas.iter().map(|&t| self.alice_prep(t)).sum()
    }

    /// Exact preparation cost for `count` seeded uniform pad angles.
    pub fn alice_prep_sampled<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> CostVector {
        (0..count).map(|_| self.alice_prep(Octant::new(rng.random_range(0..8)))).sum()
    }
}
