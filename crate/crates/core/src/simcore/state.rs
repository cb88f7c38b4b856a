use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::gate::{Gate, GateKind, Matrix2, Pauli};
use super::{Octant, SimError};

/// Default qubit cap: 2^24 amplitudes is 256 MiB of `Complex64`.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Below this many amplitudes the kernels stay single-threaded.
const PAR_THRESHOLD: usize = 1 << 14;

const NORM_TOLERANCE: f64 = 1e-9;

/// Dense statevector over `num_qubits` physical qubits.
///
/// Wire 0 is the most significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` wires with the default cap.
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        Self::with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self, SimError> {
        if num_qubits == 0 {
            return Err(SimError::InvalidArgument("a state needs at least one qubit".into()));
        }
        if num_qubits > cap {
            return Err(SimError::ResourceLimit { requested: num_qubits, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, SimError> {
        let mut s = Self::new(num_qubits)?;
        if index >= s.amps.len() {
            return Err(SimError::InvalidArgument(format!("basis index {index} out of range")));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Builds a state from raw amplitudes, which must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::InvalidArgument(format!("amplitude count {len} is not a power of two ≥ 2")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > DEFAULT_QUBIT_CAP {
            return Err(SimError::ResourceLimit { requested: num_qubits, cap: DEFAULT_QUBIT_CAP });
        }
        let s = StateVector { num_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::InvalidArgument(format!("amplitudes have squared norm {norm}")));
        }
        Ok(s)
    }

    /// `(|0⟩ + e^{iθ}|1⟩)/√2`
    pub fn equatorial(theta: Octant) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector {
            num_qubits: 1,
            amps: vec![Complex64::new(h, 0.0), theta.phase() * h],
        }
    }

    /// Single-qubit state `α|0⟩ + β|1⟩`, normalized on the way in.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self, SimError> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n < 1e-12 {
            return Err(SimError::InvalidArgument("zero vector".into()));
        }
        Ok(StateVector { num_qubits: 1, amps: vec![alpha / n, beta / n] })
    }

    /// Haar-ish random state: normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self, SimError> {
        let mut s = Self::new(num_qubits)?;
        for a in s.amps.iter_mut() {
            // Box-Muller
            let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
            let r = (-2.0 * u1.ln()).sqrt();
            let (u3, u4): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
            let r2 = (-2.0 * u3.ln()).sqrt();
            *a = Complex64::new(r * (std::f64::consts::TAU * u2).cos(), r2 * (std::f64::consts::TAU * u4).cos());
        }
        s.renormalize();
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn renormalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
    }

    fn check_wire(&self, wire: usize) -> Result<(), SimError> {
        if wire >= self.num_qubits {
            Err(SimError::WireOutOfRange { wire, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.num_qubits - 1 - wire)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        for &w in gate.wires() {
            self.check_wire(w)?;
        }
        let w = gate.wires();
        match gate.kind {
            GateKind::I => {}
            GateKind::X => self.apply_x(w[0], &[]),
            GateKind::H => self.apply_matrix_unchecked(w[0], &GateKind::H.matrix().unwrap()),
            GateKind::Cnot => self.apply_x(w[1], &[w[0]]),
            GateKind::Toffoli => self.apply_x(w[2], &[w[0], w[1]]),
            GateKind::Cz => self.apply_phase(&[w[0], w[1]], Octant::PI),
            GateKind::CPhase => self.apply_phase(&[w[0], w[1]], Octant::HALF),
            GateKind::Swap => self.apply_swap(w[0], w[1]),
            kind => {
                let k = kind.diagonal_phase().expect("remaining kinds are diagonal");
                self.apply_phase(&[w[0]], k);
            }
        }
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix on `wire`.
    pub fn apply_matrix(&mut self, wire: usize, m: &Matrix2) -> Result<(), SimError> {
        self.check_wire(wire)?;
        self.apply_matrix_unchecked(wire, m);
        Ok(())
    }

    fn apply_matrix_unchecked(&mut self, wire: usize, m: &Matrix2) {
        let stride = self.mask(wire);
        let kernel = |lo: &mut Complex64, hi: &mut Complex64| {
            let (a, b) = (*lo, *hi);
            *lo = m[0][0] * a + m[0][1] * b;
            *hi = m[1][0] * a + m[1][1] * b;
        };
        for_each_pair(&mut self.amps, stride, |_, lo, hi| kernel(lo, hi));
    }

    /// X on `target`, controlled on every wire in `controls` being 1.
    fn apply_x(&mut self, target: usize, controls: &[usize]) {
        let stride = self.mask(target);
        let cmask: usize = controls.iter().map(|&c| self.mask(c)).fold(0, |a, b| a | b);
        for_each_pair(&mut self.amps, stride, |idx, lo, hi| {
            if idx & cmask == cmask {
                std::mem::swap(lo, hi);
            }
        });
    }

    /// Multiplies by `e^{iθ}` every amplitude whose listed wires are all 1.
    fn apply_phase(&mut self, wires: &[usize], theta: Octant) {
        if theta == Octant::ZERO {
            return;
        }
        let mask: usize = wires.iter().map(|&w| self.mask(w)).fold(0, |a, b| a | b);
        let ph = theta.phase();
        let f = |(i, a): (usize, &mut Complex64)| {
            if i & mask == mask {
                *a *= ph;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(f);
        } else {
            self.amps.iter_mut().enumerate().for_each(f);
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (self.mask(a), self.mask(b));
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// Probability that `wire` reads 1 in the computational basis.
    pub fn probability_one(&self, wire: usize) -> Result<f64, SimError> {
        self.check_wire(wire)?;
        let m = self.mask(wire);
        let p = if self.amps.len() >= PAR_THRESHOLD {
            self.amps
                .par_iter()
                .enumerate()
                .filter(|(i, _)| i & m != 0)
                .map(|(_, a)| a.norm_sqr())
                .sum()
        } else {
            self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
        };
        Ok(p)
    }

    /// Projects `wire` onto `|bit⟩` and renormalizes.
    pub fn collapse(&mut self, wire: usize, bit: bool) -> Result<(), SimError> {
        self.check_wire(wire)?;
        let m = self.mask(wire);
        let kept: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & m != 0) == bit)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if kept < 1e-300 {
            return Err(SimError::InvalidArgument(format!("cannot collapse wire {wire} onto a zero-probability outcome")));
        }
        let inv = 1.0 / kept.sqrt();
        let f = |(i, a): (usize, &mut Complex64)| {
            if (i & m != 0) == bit {
                *a *= inv;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(f);
        } else {
            self.amps.iter_mut().enumerate().for_each(f);
        }
        Ok(())
    }

    /// Computational-basis measurement. Returns 1 with probability |β|² on the wire's marginal.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, wire: usize, rng: &mut R) -> Result<bool, SimError> {
        let p1 = self.probability_one(wire)?;
        let u: f64 = rng.random();
        let bit = u < p1;
        self.collapse(wire, bit)?;
        Ok(bit)
    }

    /// Measures `wire` in `{|0⟩ ± e^{iδ}|1⟩}`; outcome 0 is the `+` vector.
    ///
    /// Realized as `Rz(−δ)`, `H`, computational measurement, so the wire is
    /// left in `|outcome⟩`. Bases δ and δ+π share one random draw: the same
    /// seed selects the same projector and only the outcome label differs.
    pub fn measure_in_angle_basis<R: Rng + ?Sized>(
        &mut self,
        wire: usize,
        delta: Octant,
        rng: &mut R,
    ) -> Result<bool, SimError> {
        self.check_wire(wire)?;
        let canonical = Octant::new(i64::from(delta.index() & 3));
        let flipped = delta.index() >= 4;
        self.apply_phase(&[wire], -canonical);
        self.apply_matrix_unchecked(wire, &GateKind::H.matrix().unwrap());
        let bit = self.measure_z(wire, rng)?;
        if flipped {
            self.apply_x(wire, &[]);
        }
        Ok(bit ^ flipped)
    }

    /// Returns `wire` to |0⟩ by measuring it and flipping on a 1.
    pub fn reset<R: Rng + ?Sized>(&mut self, wire: usize, rng: &mut R) -> Result<(), SimError> {
        if self.measure_z(wire, rng)? {
            self.apply_x(wire, &[]);
        }
        Ok(())
    }

    /// Applies a Pauli deterministically; `Y = iXZ`.
    pub fn inject_pauli(&mut self, wire: usize, pauli: Pauli) -> Result<(), SimError> {
        self.check_wire(wire)?;
        match pauli {
            Pauli::X => self.apply_x(wire, &[]),
            Pauli::Z => self.apply_phase(&[wire], Octant::PI),
            Pauli::Y => {
                self.apply_phase(&[wire], Octant::PI);
                self.apply_x(wire, &[]);
                let i = Complex64::new(0.0, 1.0);
                self.amps.iter_mut().for_each(|a| *a *= i);
            }
        }
        Ok(())
    }

    /// Depolarizing channel on one wire: with probability `p`, a uniformly chosen
    /// Pauli is applied. Returns the injected Pauli, if any.
    pub fn depolarize<R: Rng + ?Sized>(&mut self, wire: usize, p: f64, rng: &mut R) -> Result<Option<Pauli>, SimError> {
        let pauli = sample_depolarizing(p, rng)?;
        if let Some(pa) = pauli {
            self.inject_pauli(wire, pa)?;
        }
        Ok(pauli)
    }

    /// Tensor product with `other` appended as the trailing wires.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        let n = self.num_qubits + other.num_qubits;
        if n > DEFAULT_QUBIT_CAP {
            return Err(SimError::ResourceLimit { requested: n, cap: DEFAULT_QUBIT_CAP });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Drops a wire known to be in `|bit⟩` (for instance right after measuring it).
    ///
    /// The remaining wires keep their relative order.
    pub fn remove_wire(&mut self, wire: usize, bit: bool) -> Result<(), SimError> {
        self.check_wire(wire)?;
        if self.num_qubits == 1 {
            return Err(SimError::InvalidArgument("cannot remove the last wire".into()));
        }
        let m = self.mask(wire);
        let low = m - 1;
        let amps: Vec<Complex64> = (0..self.amps.len() / 2)
            .map(|j| {
                let i = ((j & !low) << 1) | (j & low) | if bit { m } else { 0 };
                self.amps[i]
            })
            .collect();
        self.amps = amps;
        self.num_qubits -= 1;
        self.renormalize();
        Ok(())
    }

    /// `(index, re, im)` for every amplitude with magnitude above 1e-12.
    pub fn support(&self) -> Vec<(usize, f64, f64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-12)
            .map(|(i, a)| (i, a.re, a.im))
            .collect()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::SizeMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, SimError> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Draws the Pauli a depolarizing channel of strength `p` would inject.
pub fn sample_depolarizing<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<Option<Pauli>, SimError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(None);
    }
    if rng.random::<f64>() < p {
        Ok(Some(Pauli::ALL[rng.random_range(0..3)]))
    } else {
        Ok(None)
    }
}

/// Visits every amplitude pair that differs only in the bit `stride`,
/// passing the index of the lower element.
fn for_each_pair<F>(amps: &mut [Complex64], stride: usize, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync + Send,
{
    let block = stride * 2;
    let run = |(k, chunk): (usize, &mut [Complex64])| {
        let base = k * block;
        let (lo, hi) = chunk.split_at_mut(stride);
        for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(base + j, a, b);
        }
    };
    if amps.len() < PAR_THRESHOLD {
        amps.chunks_mut(block).enumerate().for_each(run);
    } else if amps.len() / block >= 64 {
        amps.par_chunks_mut(block).enumerate().for_each(run);
    } else {
        for (k, chunk) in amps.chunks_mut(block).enumerate() {
            let base = k * block;
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .enumerate()
                .for_each(|(j, (a, b))| f(base + j, a, b));
        }
    }
}
