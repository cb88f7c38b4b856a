use serde::{Deserialize, Serialize};

use super::{CircuitIR, CompileError};
use crate::simcore::{Gate, GateKind};

/// `H, X, Z, S, S†, T, T†, CNOT` sequence for `kind` on `w`.
fn expand(kind: GateKind, w: &[usize]) -> Vec<Gate> {
    use GateKind::*;
    let s = |k, q| Gate::single(k, q);
    match kind {
        I => vec![],
        Toffoli => {
            let (c1, c2, t) = (w[0], w[1], w[2]);
            vec![
                s(H, t),
                Gate::cnot(c2, t),
                s(Tdg, t),
                Gate::cnot(c1, t),
                s(T, t),
                Gate::cnot(c2, t),
                s(Tdg, t),
                Gate::cnot(c1, t),
                s(T, c2),
                s(T, t),
                s(H, t),
                Gate::cnot(c1, c2),
                s(T, c1),
                s(Tdg, c2),
                Gate::cnot(c1, c2),
            ]
        }
        Swap => vec![Gate::cnot(w[0], w[1]), Gate::cnot(w[1], w[0]), Gate::cnot(w[0], w[1])],
        Cz => vec![s(H, w[1]), Gate::cnot(w[0], w[1]), s(H, w[1])],
        CPhase => vec![s(T, w[0]), s(T, w[1]), Gate::cnot(w[0], w[1]), s(Tdg, w[1]), Gate::cnot(w[0], w[1])],
        Rz(k) => {
            let q = w[0];
            match k.index() {
                0 => vec![],
                1 => vec![s(T, q)],
                2 => vec![s(S, q)],
                3 => vec![s(S, q), s(T, q)],
                4 => vec![s(Z, q)],
                5 => vec![s(Z, q), s(T, q)],
                6 => vec![s(Sdg, q)],
                _ => vec![s(Tdg, q)],
            }
        }
        other => vec![Gate::new(other, w).expect("arity preserved")],
    }
}

/// Rewrites into `{H, X, Z, S, S†, T, T†, CNOT}`; Toffoli uses the 7-T network.
pub fn decompose(circuit: &CircuitIR) -> CircuitIR {
    let mut out = circuit.clone();
    let gates: Vec<Gate> = circuit.gates().iter().flat_map(|g| expand(g.kind, g.wires())).collect();
    out.replace_gates(gates);
    out
}

/// Nearest-neighbour circuit plus the wire permutation left in place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routed {
    #[serde(skip)]
    pub circuit: CircuitIR,
    pub swaps: usize,
    /// `initial_position[w]` is the physical wire logical wire `w` starts on.
    pub initial_position: Vec<usize>,
    /// `final_position[w]` is the physical wire holding logical wire `w` at the end.
    pub final_position: Vec<usize>,
}

impl Routed {
    /// Physical basis index for a logical one, under `position`.
    pub fn permute_index(position: &[usize], logical: usize) -> usize {
        let n = position.len();
        let mut out = 0;
        for (w, &p) in position.iter().enumerate() {
            if (logical >> (n - 1 - w)) & 1 == 1 {
                out |= 1 << (n - 1 - p);
            }
        }
        out
    }
}

/// Circuits up to this many wires get every initial placement tried.
pub const PLACEMENT_SEARCH_WIRES: usize = 5;

/// Makes every two-qubit gate act on adjacent wires by inserting SWAPs,
/// starting from the identity placement. The final permutation is reported,
/// not undone.
pub fn insert_swaps(circuit: &CircuitIR) -> Result<Routed, CompileError> {
    insert_swaps_with(circuit, RouterConfig::default())
}

/// [`insert_swaps`], except that circuits of at most [`PLACEMENT_SEARCH_WIRES`]
/// wires start from whichever initial placement packs into the fewest layers.
pub fn route_and_place(circuit: &CircuitIR) -> Result<Routed, CompileError> {
    let config = RouterConfig::default();
    let n = circuit.wire_count();
    if n < 3 || n > PLACEMENT_SEARCH_WIRES {
        return insert_swaps_with(circuit, config);
    }
    let mut best: Option<(usize, usize, Routed)> = None;
    for perm in permutations(n) {
        let r = route_from(circuit, config, perm)?;
        let layers = super::place_bricks(&r.circuit)?.layers;
        if best.as_ref().is_none_or(|(l, s, _)| (layers, r.swaps) < (*l, *s)) {
            best = Some((layers, r.swaps, r));
        }
    }
    Ok(best.expect("at least one permutation").2)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for w in (0..n).filter(|w| !p.contains(w)) {
                let mut q = p.clone();
                q.push(w);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Lookahead used to pick which end of a long-range gate moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouterConfig {
    /// Upcoming two-qubit gates considered.
    pub lookahead: usize,
    /// Weight ratio between consecutive upcoming gates.
    pub decay: f64,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig { lookahead: 12, decay: 0.5 }
    }
}

/// Routing from the identity placement.
pub fn insert_swaps_with(circuit: &CircuitIR, config: RouterConfig) -> Result<Routed, CompileError> {
    route_from(circuit, config, (0..circuit.wire_count()).collect())
}

fn route_from(circuit: &CircuitIR, config: RouterConfig, initial: Vec<usize>) -> Result<Routed, CompileError> {
    let n = circuit.wire_count();
    let mut pos = initial.clone();
    let mut at = vec![0; n];
    for (w, &p) in pos.iter().enumerate() {
        at[p] = w;
    }
    let mut out = CircuitIR::new(n);
    let mut swaps = 0;
    let gates = circuit.gates();
    for (i, g) in gates.iter().enumerate() {
        match g.wires() {
            [w] => out.push(Gate::single(g.kind, pos[*w]))?,
            [a, b] => {
                let (a, b) = (*a, *b);
                while pos[a].abs_diff(pos[b]) > 1 {
                    let mover = pick_mover(gates, i, a, b, &pos, config);
                    let other = if mover == a { b } else { a };
                    let p = pos[mover];
                    let q = if pos[other] > p { p + 1 } else { p - 1 };
                    out.add(GateKind::Swap, &[p.min(q), p.max(q)])?;
                    swaps += 1;
                    let displaced = at[q];
                    at.swap(p, q);
                    pos[mover] = q;
                    pos[displaced] = p;
                }
                out.push(Gate::new(g.kind, &[pos[a], pos[b]]).expect("two distinct wires"))?;
            }
            _ => return Err(CompileError::Unsupported(g.kind)),
        }
    }
    Ok(Routed { circuit: out, swaps, initial_position: initial, final_position: pos })
}

/// Moves whichever endpoint leaves the next few two-qubit gates shorter.
fn pick_mover(gates: &[Gate], i: usize, a: usize, b: usize, pos: &[usize], config: RouterConfig) -> usize {
    let cost = |mover: usize| -> f64 {
        let other = if mover == a { b } else { a };
        let step = if pos[other] > pos[mover] { pos[mover] + 1 } else { pos[mover] - 1 };
        let place = |w: usize| -> usize {
            if w == mover {
                step
            } else if pos[w] == step {
                pos[mover]
            } else {
                pos[w]
            }
        };
        let mut weight = 1.0;
        let mut total = 0.0;
        for g in gates[i + 1..].iter().filter(|g| g.wires().len() == 2).take(config.lookahead) {
            total += weight * (place(g.wires()[0]).abs_diff(place(g.wires()[1])) - 1) as f64;
            weight *= config.decay;
        }
        total
    };
    if cost(b) < cost(a) {
        b
    } else {
        a
    }
}
