use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SteaneError;
use crate::simcore::{Pauli, StateVector};

/// Seven wires holding one encoded qubit. Position `i` of the code is `wires[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeBlock {
    wires: [usize; 7],
}

impl CodeBlock {
    pub fn new(wires: [usize; 7]) -> Result<Self, SteaneError> {
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].contains(w) {
                return Err(SteaneError::InvalidBlock(format!("repeated wire {w}")));
            }
        }
        Ok(CodeBlock { wires })
    }

    /// Block on wires `start..start + 7`.
    pub fn contiguous(start: usize) -> Self {
        CodeBlock { wires: std::array::from_fn(|i| start + i) }
    }

    pub fn wires(&self) -> &[usize; 7] {
        &self.wires
    }

    pub fn overlaps(&self, other: &CodeBlock) -> bool {
        self.wires.iter().any(|w| other.wires.contains(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StabilizerName {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

impl StabilizerName {
    pub const ALL: [StabilizerName; 6] = [
        StabilizerName::K1,
        StabilizerName::K2,
        StabilizerName::K3,
        StabilizerName::K4,
        StabilizerName::K5,
        StabilizerName::K6,
    ];

    pub fn stabilizer(self) -> &'static Stabilizer {
        &STABILIZERS[self as usize]
    }
}

impl fmt::Display for StabilizerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", *self as usize + 1)
    }
}

/// A weight-4 Pauli word; `support` is a 7-bit mask with position 1 as the high bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stabilizer {
    pub name: StabilizerName,
    pub pauli: Pauli,
    pub support: u8,
}

impl Stabilizer {
    /// Zero-based code positions in the support, ascending.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..7).filter(move |&p| self.support & position_bit(p) != 0)
    }

    pub fn word(&self) -> String {
        let letter = match self.pauli {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        (0..7).map(|p| if self.support & position_bit(p) != 0 { letter } else { 'I' }).collect()
    }
}

const fn position_bit(p: usize) -> u8 {
    1 << (6 - p)
}

pub const STABILIZERS: [Stabilizer; 6] = [
    Stabilizer { name: StabilizerName::K1, pauli: Pauli::X, support: 0b0001111 },
    Stabilizer { name: StabilizerName::K2, pauli: Pauli::X, support: 0b1010101 },
    Stabilizer { name: StabilizerName::K3, pauli: Pauli::X, support: 0b0110011 },
    Stabilizer { name: StabilizerName::K4, pauli: Pauli::Z, support: 0b0001111 },
    Stabilizer { name: StabilizerName::K5, pauli: Pauli::Z, support: 0b1010101 },
    Stabilizer { name: StabilizerName::K6, pauli: Pauli::Z, support: 0b0110011 },
];

/// Which single position, if any, an error at `position` lights up: the
/// 3-bit pattern of supports (first / second / third of a stabilizer triple)
/// that contain it.
fn pattern_of(position: usize, triple: &[Stabilizer]) -> [bool; 3] {
    std::array::from_fn(|i| triple[i].support & position_bit(position) != 0)
}

/// Maps a 3-bit pattern from one stabilizer triple to the unique position
/// it names, built from the supports.
pub fn locate(bits: [bool; 3]) -> Option<usize> {
    if bits == [false; 3] {
        return None;
    }
    (0..7).find(|&p| pattern_of(p, &STABILIZERS[..3]) == bits)
}

/// Outcomes of the six stabilizer measurements (true = −1 eigenvalue).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Syndrome {
    /// K1–K3: these flag Z errors.
    pub x_bits: [bool; 3],
    /// K4–K6: these flag X errors.
    pub z_bits: [bool; 3],
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        self.x_bits == [false; 3] && self.z_bits == [false; 3]
    }

    /// Position of a Z component, zero-based.
    pub fn z_error_position(&self) -> Option<usize> {
        locate(self.x_bits)
    }

    /// Position of an X component, zero-based.
    pub fn x_error_position(&self) -> Option<usize> {
        locate(self.z_bits)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |v: &[bool; 3]| v.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>();
        write!(f, "({},{})", b(&self.x_bits), b(&self.z_bits))
    }
}

/// The 8 words of the even subcode, spanned by the X-stabilizer supports.
pub fn even_codewords() -> Vec<u8> {
    let mut words = Vec::with_capacity(8);
    for mask in 0..8u8 {
        let mut w = 0u8;
        for (i, s) in STABILIZERS[..3].iter().enumerate() {
            if mask & (1 << i) != 0 {
                w ^= s.support;
            }
        }
        words.push(w);
    }
    words.sort_unstable();
    words
}

/// Logical class of each 7-bit word: `Some(0)` for |0⟩_L support, `Some(1)` for |1⟩_L.
fn word_classes() -> [Option<u8>; 128] {
    let mut classes = [None; 128];
    for w in even_codewords() {
        classes[w as usize] = Some(0);
        classes[(w ^ 0x7f) as usize] = Some(1);
    }
    classes
}

/// Decodes a transversal Z readout: corrects one flip using K4–K6 parities
/// and returns the logical bit.
pub fn classical_decode(bits: [bool; 7]) -> bool {
    let word: u8 = bits.iter().fold(0, |acc, &b| (acc << 1) | u8::from(b));
    let syndrome: [bool; 3] = std::array::from_fn(|i| (word & STABILIZERS[3 + i].support).count_ones() % 2 == 1);
    let corrected = match locate(syndrome) {
        Some(p) => word ^ position_bit(p),
        None => word,
    };
    corrected.count_ones() % 2 == 1
}

/// `α|0⟩_L + β|1⟩_L` on exactly seven qubits.
pub fn encoded_state(alpha: Complex64, beta: Complex64) -> Result<StateVector, SteaneError> {
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let scale = 1.0 / (norm * 8f64.sqrt());
    let mut amps = vec![Complex64::new(0.0, 0.0); 128];
    for w in even_codewords() {
        amps[w as usize] += alpha * scale;
        amps[(w ^ 0x7f) as usize] += beta * scale;
    }
    Ok(StateVector::from_amplitudes(amps)?)
}

/// 2×2 logical density matrix of one block, traced over every other wire.
///
/// Only the code-space component survives, so the trace is the probability
/// that the block sits in the code space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalDensity(pub [[Complex64; 2]; 2]);

impl LogicalDensity {
    pub fn trace(&self) -> f64 {
        (self.0[0][0] + self.0[1][1]).re
    }

    /// `⟨t|ρ|t⟩` for a single-qubit target.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64, SteaneError> {
        if target.num_qubits() != 1 {
            return Err(SteaneError::InvalidBlock("logical target must be one qubit".into()));
        }
        let t = target.amplitudes();
        let mut f = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                f += t[a].conj() * self.0[a][b] * t[b];
            }
        }
        Ok(f.re)
    }
}

/// Ideal decoder: projects `block` onto the code space and reports the logical state.
pub fn decode_to_logical(state: &StateVector, block: &CodeBlock) -> Result<LogicalDensity, SteaneError> {
    let n = state.num_qubits();
    if block.wires.iter().any(|&w| w >= n) {
        return Err(SteaneError::InvalidBlock("block wire outside the state".into()));
    }
    let classes = word_classes();
    let block_masks: Vec<usize> = block.wires.iter().map(|&w| 1 << (n - 1 - w)).collect();
    let rest_masks: Vec<usize> = (0..n)
        .filter(|w| !block.wires.contains(w))
        .map(|w| 1 << (n - 1 - w))
        .collect();
    let scale = 1.0 / 8f64.sqrt();
    let mut proj = vec![[Complex64::new(0.0, 0.0); 2]; 1 << rest_masks.len()];
    for (index, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let word = block_masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(index & m != 0));
        if let Some(class) = classes[word] {
            let rest = rest_masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(index & m != 0));
            proj[rest][class as usize] += amp * scale;
        }
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for v in &proj {
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += v[a] * v[b].conj();
            }
        }
    }
    Ok(LogicalDensity(rho))
}
