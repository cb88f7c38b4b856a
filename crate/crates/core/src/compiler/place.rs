use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CircuitIR, CompileError};
use crate::brickwork::{cnot_pattern, BrickworkLayout};
use crate::simcore::{Gate, GateKind, Matrix2, Octant};

fn mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Hashable form of a unitary up to global phase.
fn phase_key(m: &Matrix2) -> [i64; 8] {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    let pivot = flat.iter().find(|z| z.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let unit = pivot / pivot.norm();
    let mut key = [0i64; 8];
    for (i, z) in flat.iter().enumerate() {
        let w = z / unit;
        key[2 * i] = (w.re * 1e6).round() as i64;
        key[2 * i + 1] = (w.im * 1e6).round() as i64;
    }
    key
}

fn row_unitary(a: u8, b: u8, c: u8) -> Matrix2 {
    let rz = |k: u8| GateKind::Rz(-Octant::new(i64::from(k))).matrix().expect("diagonal");
    let h = GateKind::H.matrix().expect("single-qubit");
    mul(&rz(c), &mul(&h, &mul(&rz(b), &mul(&h, &rz(a)))))
}

fn table() -> &'static HashMap<[i64; 8], [Octant; 4]> {
    static TABLE: OnceLock<HashMap<[i64; 8], [Octant; 4]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = HashMap::new();
        // Iterate so that shorter patterns (more zeros) win.
        for c in 0..8u8 {
            for b in 0..8u8 {
                for a in 0..8u8 {
                    let row = [Octant::new(a.into()), Octant::new(b.into()), Octant::new(c.into()), Octant::ZERO];
                    t.entry(phase_key(&row_unitary(a, b, c))).or_insert(row);
                }
            }
        }
        t
    })
}

/// Single-row pattern realising `m` up to global phase, if one exists.
pub fn pattern_for(m: &Matrix2) -> Option<[Octant; 4]> {
    table().get(&phase_key(m)).copied()
}

/// `(a, b)` with `H·Rz(−b)·H·Rz(−a) = m` up to phase: the part of a brick row
/// before its first rung.
fn prefix_for(m: &Matrix2) -> Option<(Octant, Octant)> {
    static TABLE: OnceLock<HashMap<[i64; 8], (Octant, Octant)>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let h = GateKind::H.matrix().expect("single-qubit");
        let mut t = HashMap::new();
        for b in 0..8i64 {
            for a in 0..8i64 {
                let rz = |k: i64| GateKind::Rz(Octant::new(-k)).matrix().expect("diagonal");
                let u = mul(&h, &mul(&rz(b), &mul(&h, &rz(a))));
                t.entry(phase_key(&u)).or_insert((Octant::new(a), Octant::new(b)));
            }
        }
        t
    });
    t.get(&phase_key(m)).copied()
}

fn identity() -> Matrix2 {
    GateKind::I.matrix().expect("single-qubit")
}

/// Rows of a CNOT brick that first applies `pre[0]` on the top row and `pre[1]` on the bottom.
fn cnot_rows(control_on_top: bool, pre: &[Matrix2; 2]) -> Option<[[Octant; 4]; 2]> {
    let base = cnot_pattern(control_on_top);
    let mut rows = [base.rows[0], base.rows[1]];
    for (row, m) in rows.iter_mut().zip(pre) {
        let [a, b, c, d] = *row;
        let default = row_prefix(a, b);
        let (a2, b2) = prefix_for(&mul(&default, m))?;
        *row = [a2, b2, c, d];
    }
    Some(rows)
}

fn row_prefix(a: Octant, b: Octant) -> Matrix2 {
    let h = GateKind::H.matrix().expect("single-qubit");
    let rz = |k: Octant| GateKind::Rz(-k).matrix().expect("diagonal");
    mul(&h, &mul(&rz(b), &mul(&h, &rz(a))))
}

/// Packed layout plus where every gate went.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    #[serde(skip, default = "empty_layout")]
    pub layout: BrickworkLayout,
    pub rows: usize,
    pub layers: usize,
    /// Gates absorbed into an earlier single-qubit slot.
    pub merged: usize,
}

fn empty_layout() -> BrickworkLayout {
    BrickworkLayout::identity(2, 1).expect("valid shape")
}

#[derive(Clone)]
enum Slot {
    One(Matrix2),
    Cnot { control_on_top: bool, pre: [Matrix2; 2] },
}

/// Packs a nearest-neighbour circuit over `{single-qubit, CNOT, SWAP}` into a
/// brickwork layout, as early as each gate's wires allow. Consecutive
/// single-qubit gates share a slot when their product has a row pattern.
/// Empty slots stay identity.
pub fn place_bricks(circuit: &CircuitIR) -> Result<Placement, CompileError> {
    let rows = circuit.wire_count().max(2);
    // ready[w]: first free 0-based layer on wire w.
    let mut ready = vec![0usize; rows];
    let mut slots: HashMap<(usize, usize), Slot> = HashMap::new();
    let mut merged = 0;
    let mut gates: Vec<Gate> = Vec::new();
    for g in circuit.gates() {
        if g.kind == GateKind::Swap {
            let (a, b) = (g.wires()[0], g.wires()[1]);
            gates.extend([Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)]);
        } else {
            gates.push(g.clone());
        }
    }
    for g in &gates {
        match (g.kind, g.wires()) {
            (GateKind::I, _) => {}
            (kind, &[w]) => {
                let m = kind.matrix().ok_or(CompileError::Unsupported(kind))?;
                if ready[w] > 0 {
                    if let Some(Slot::One(prev)) = slots.get(&(ready[w] - 1, w)) {
                        let prod = mul(&m, prev);
                        if pattern_for(&prod).is_some() {
                            slots.insert((ready[w] - 1, w), Slot::One(prod));
                            merged += 1;
                            continue;
                        }
                    }
                }
                if pattern_for(&m).is_none() {
                    return Err(CompileError::Unsupported(kind));
                }
                slots.insert((ready[w], w), Slot::One(m));
                ready[w] += 1;
            }
            (GateKind::Cnot, &[c, t]) => {
                if c.abs_diff(t) != 1 {
                    return Err(CompileError::NotAdjacent(g.clone()));
                }
                let top = c.min(t);
                // Fold a trailing single-qubit slot on either wire into the brick
                // when the brick's first stage can absorb it.
                let mut pre = [identity(), identity()];
                for (i, w) in [top, top + 1].into_iter().enumerate() {
                    if ready[w] == 0 {
                        continue;
                    }
                    if let Some(Slot::One(m)) = slots.get(&(ready[w] - 1, w)) {
                        let mut trial = pre;
                        trial[i] = *m;
                        if cnot_rows(c == top, &trial).is_some() {
                            pre = trial;
                            slots.remove(&(ready[w] - 1, w));
                            ready[w] -= 1;
                            merged += 1;
                        }
                    }
                }
                let mut layer = ready[c].max(ready[t]);
                // 0-based layer L pairs (top, top+1) when L and top share parity.
                if layer % 2 != top % 2 {
                    layer += 1;
                }
                slots.insert((layer, top), Slot::Cnot { control_on_top: c == top, pre });
                ready[c] = layer + 1;
                ready[t] = layer + 1;
            }
            (kind, _) => return Err(CompileError::Unsupported(kind)),
        }
    }
    let layers = ready.iter().copied().max().unwrap_or(0).max(1);
    let mut layout = BrickworkLayout::identity(rows, layers)?;
    for (&(layer, w), slot) in &slots {
        match slot {
            Slot::One(m) => {
                let row = pattern_for(m).expect("checked on insertion");
                layout.set_row_pattern(layer + 1, w + 1, row)?;
            }
            Slot::Cnot { control_on_top, pre } => {
                let [top, bottom] = cnot_rows(*control_on_top, pre).expect("checked on insertion");
                layout.set_row_pattern(layer + 1, w + 1, top)?;
                layout.set_row_pattern(layer + 1, w + 2, bottom)?;
            }
        }
    }
    Ok(Placement { layout, rows, layers, merged })
}
