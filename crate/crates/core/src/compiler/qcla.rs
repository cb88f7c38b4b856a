//! Logarithmic-depth carry-lookahead adder, in place: `|a, b, 0⟩ ↦ |a, a + b⟩`.
//!
//! The low `n` sum bits land on the `b` register and the carry-out on `z[n]`.
//! Every other ancilla returns to |0⟩.

use super::{CircuitIR, CompileError};
use crate::simcore::GateKind;

pub const MAX_QCLA_BITS: usize = 64;

/// Wire roles of the adder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QclaWire {
    A(usize),
    B(usize),
    /// Carry into bit `j`, `1 ≤ j ≤ n`.
    Z(usize),
    /// Propagate product `P_t[m]`, `t ≥ 1`.
    P(usize, usize),
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// Propagate ancillas needed for an `n`-bit carry network.
fn propagate_slots(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for t in 1..floor_log2(n) {
        for m in 1..(n >> t) {
            v.push((t, m));
        }
    }
    v
}

/// Wire assignment: bit-sliced `a_i, b_i, z_{i+1}`, with each propagate
/// ancilla `P_t[m]` placed right after the slice of bit `2^t·m`.
#[derive(Debug, Clone)]
pub struct QclaRegisters {
    pub bits: usize,
    order: Vec<QclaWire>,
}

impl QclaRegisters {
    pub fn new(bits: usize) -> Self {
        let slots = propagate_slots(bits);
        let mut order = Vec::new();
        for i in 0..bits {
            order.push(QclaWire::A(i));
            order.push(QclaWire::B(i));
            order.push(QclaWire::Z(i + 1));
            for &(t, m) in slots.iter().rev() {
                if (m << t) + (1 << t) - 1 == i {
                    order.push(QclaWire::P(t, m));
                }
            }
        }
        QclaRegisters { bits, order }
    }

    pub fn wire_count(&self) -> usize {
        self.order.len()
    }

    pub fn wire(&self, w: QclaWire) -> usize {
        self.order.iter().position(|&o| o == w).expect("wire exists")
    }

    pub fn name(w: QclaWire) -> String {
        match w {
            QclaWire::A(i) => format!("a{i}"),
            QclaWire::B(i) => format!("b{i}"),
            QclaWire::Z(j) => format!("z{j}"),
            QclaWire::P(t, m) => format!("p{t}_{m}"),
        }
    }

    /// Input bits for operands `a`, `b` with all ancillas clear.
    pub fn encode(&self, a: u128, b: u128) -> Vec<bool> {
        self.order
            .iter()
            .map(|w| match *w {
                QclaWire::A(i) => (a >> i) & 1 == 1,
                QclaWire::B(i) => (b >> i) & 1 == 1,
                _ => false,
            })
            .collect()
    }

    /// `(a, sum, ancillas_clean)` read back from output bits.
    pub fn decode(&self, bits: &[bool]) -> (u128, u128, bool) {
        let n = self.bits;
        let (mut a, mut s, mut clean) = (0u128, 0u128, true);
        for (w, &v) in self.order.iter().zip(bits) {
            match *w {
                QclaWire::A(i) => a |= u128::from(v) << i,
                QclaWire::B(i) => s |= u128::from(v) << i,
                QclaWire::Z(j) if j == n => s |= u128::from(v) << n,
                _ => clean &= !v,
            }
        }
        (a, s, clean)
    }
}

/// One carry-network Toffoli, symbolically.
type Tof = (QclaWire, QclaWire, QclaWire);

fn prop(t: usize, m: usize) -> QclaWire {
    if t == 0 {
        QclaWire::B(m)
    } else {
        QclaWire::P(t, m)
    }
}

fn carry_network(n: usize) -> Vec<Tof> {
    let mut v = Vec::new();
    if n < 2 {
        return v;
    }
    let log = floor_log2(n);
    let mut p_rounds = Vec::new();
    for t in 1..log {
        for m in 1..(n >> t) {
            p_rounds.push((prop(t - 1, 2 * m), prop(t - 1, 2 * m + 1), prop(t, m)));
        }
    }
    v.extend(p_rounds.iter().copied());
    for t in 1..=log {
        for m in 0..(n >> t) {
            let hi = (1 << t) * m + (1 << t);
            let mid = (1 << t) * m + (1 << (t - 1));
            v.push((QclaWire::Z(mid), prop(t - 1, 2 * m + 1), QclaWire::Z(hi)));
        }
    }
    // Largest t with 2^t ≤ 2n/3.
    let mut tc = 0;
    while 3 << (tc + 1) <= 2 * n {
        tc += 1;
    }
    for t in (1..=tc).rev() {
        let count = (n - (1 << (t - 1))) >> t;
        for m in 1..=count {
            let lo = (1 << t) * m;
            let mid = lo + (1 << (t - 1));
            v.push((QclaWire::Z(lo), prop(t - 1, 2 * m), QclaWire::Z(mid)));
        }
    }
    v.extend(p_rounds.iter().rev().copied());
    v
}

/// The `bits`-bit adder over the [`QclaRegisters`] wire order.
pub fn qcla_adder(bits: usize) -> Result<CircuitIR, CompileError> {
    if bits == 0 || bits > MAX_QCLA_BITS {
        return Err(CompileError::Invalid(format!("adder width {bits} outside 1..={MAX_QCLA_BITS}")));
    }
    let n = bits;
    let regs = QclaRegisters::new(n);
    let mut c = CircuitIR::with_names(regs.order.iter().map(|&w| QclaRegisters::name(w)).collect());
    let w = |x: QclaWire| regs.wire(x);
    use QclaWire::{A, B, Z};

    for i in 0..n {
        c.add(GateKind::Toffoli, &[w(A(i)), w(B(i)), w(Z(i + 1))])?;
    }
    for i in 0..n {
        c.add(GateKind::Cnot, &[w(A(i)), w(B(i))])?;
    }
    for (x, y, z) in carry_network(n) {
        c.add(GateKind::Toffoli, &[w(x), w(y), w(z)])?;
    }
    for i in 1..n {
        c.add(GateKind::Cnot, &[w(Z(i)), w(B(i))])?;
    }
    let low = n.saturating_sub(1);
    for i in 0..low {
        c.add(GateKind::X, &[w(B(i))])?;
    }
    for i in 1..low {
        c.add(GateKind::Cnot, &[w(A(i)), w(B(i))])?;
    }
    for (x, y, z) in carry_network(low).into_iter().rev() {
        c.add(GateKind::Toffoli, &[w(x), w(y), w(z)])?;
    }
    for i in 1..low {
        c.add(GateKind::Cnot, &[w(A(i)), w(B(i))])?;
    }
    for i in 0..low {
        c.add(GateKind::Toffoli, &[w(A(i)), w(B(i)), w(Z(i + 1))])?;
    }
    for i in 0..low {
        c.add(GateKind::X, &[w(B(i))])?;
    }
    Ok(c)
}
