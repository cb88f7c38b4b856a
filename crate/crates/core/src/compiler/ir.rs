use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CompileError;
use crate::simcore::{Gate, GateKind, StateVector};

/// Ordered gate list over `wire_count` wires.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircuitIR {
    wire_count: usize,
    gates: Vec<Gate>,
    names: Vec<String>,
}

impl CircuitIR {
    pub fn new(wire_count: usize) -> Self {
        CircuitIR { wire_count, gates: Vec::new(), names: (0..wire_count).map(|i| format!("q{i}")).collect() }
    }

    pub fn with_names(names: Vec<String>) -> Self {
        CircuitIR { wire_count: names.len(), gates: Vec::new(), names }
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CompileError> {
        if let Some(&w) = gate.wires().iter().find(|&&w| w >= self.wire_count) {
            return Err(CompileError::WireOutOfRange { wire: w, wire_count: self.wire_count });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub(crate) fn replace_gates(&mut self, gates: Vec<Gate>) {
        self.gates = gates;
    }

    pub fn add(&mut self, kind: GateKind, wires: &[usize]) -> Result<(), CompileError> {
        let g = Gate::new(kind, wires).map_err(|e| CompileError::Invalid(e.to_string()))?;
        self.push(g)
    }

    /// Same gates, wires relabelled through `map` (a permutation of `0..wire_count`).
    pub fn relabel(&self, map: &[usize]) -> CircuitIR {
        let mut names = vec![String::new(); self.wire_count];
        for (i, &m) in map.iter().enumerate() {
            names[m] = self.names[i].clone();
        }
        CircuitIR { wire_count: self.wire_count, gates: self.gates.iter().map(|g| g.remap(|w| map[w])).collect(), names }
    }

    /// Line format: optional `WIRES n`, then one `GATE w1 [w2 [w3]]` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<CircuitIR, CompileError> {
        let mut declared: Option<usize> = None;
        let mut gates: Vec<(usize, Gate)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CompileError::Parse { line: line_no, message };
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("line is non-empty");
            let rest: Vec<&str> = tokens.collect();
            if head.eq_ignore_ascii_case("WIRES") {
                if declared.is_some() || !gates.is_empty() {
                    return Err(err("WIRES must appear once, before any gate".into()));
                }
                match rest.as_slice() {
                    [n] => declared = Some(n.parse().map_err(|_| err(format!("bad wire count `{n}`")))?),
                    _ => return Err(err("WIRES takes one integer".into())),
                }
                continue;
            }
            let kind: GateKind = head.parse().map_err(err)?;
            let wires: Vec<usize> = rest
                .iter()
                .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad wire index `{t}`"))))
                .collect::<Result<_, _>>()?;
            let gate = Gate::new(kind, &wires).map_err(|e| err(e.to_string()))?;
            gates.push((line_no, gate));
        }
        let needed = gates.iter().flat_map(|(_, g)| g.wires().iter().map(|w| w + 1)).max().unwrap_or(0);
        let wire_count = match declared {
            Some(n) => {
                if let Some((line, g)) = gates.iter().find(|(_, g)| g.wires().iter().any(|&w| w >= n)) {
                    return Err(CompileError::Parse { line: *line, message: format!("`{g}` uses a wire beyond WIRES {n}") });
                }
                n
            }
            None => needed,
        };
        let mut c = CircuitIR::new(wire_count);
        c.gates = gates.into_iter().map(|(_, g)| g).collect();
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "WIRES {}", self.wire_count).unwrap();
        for g in &self.gates {
            writeln!(s, "{g}").unwrap();
        }
        s
    }

    /// Computational-basis evaluation of a reversible circuit (X, CNOT, Toffoli, SWAP only).
    pub fn evaluate_classical(&self, bits: &mut [bool]) -> Result<(), CompileError> {
        if bits.len() != self.wire_count {
            return Err(CompileError::Invalid(format!("{} input bits for {} wires", bits.len(), self.wire_count)));
        }
        for g in &self.gates {
            let w = g.wires();
            match g.kind {
                GateKind::X => bits[w[0]] ^= true,
                GateKind::Cnot => bits[w[1]] ^= bits[w[0]],
                GateKind::Toffoli => bits[w[2]] ^= bits[w[0]] & bits[w[1]],
                GateKind::Swap => bits.swap(w[0], w[1]),
                GateKind::I => {}
                other => return Err(CompileError::Unsupported(other)),
            }
        }
        Ok(())
    }

    /// Applies every gate to `state`.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<(), CompileError> {
        for g in &self.gates {
            state.apply(g).map_err(|e| CompileError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    pub fn tally(&self) -> GateTally {
        let mut t = GateTally::default();
        for g in &self.gates {
            t.count(g.kind);
        }
        t
    }
}

/// Disjoint per-category gate counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateTally {
    /// T and T† (and odd-octant rotations).
    pub t_count: u64,
    pub toffoli: u64,
    pub cnot: u64,
    pub swap: u64,
    /// CZ and controlled-S.
    pub other_two_qubit: u64,
    /// X gates.
    pub not: u64,
    /// H, Z, S, S† and even-octant rotations.
    pub other_one_qubit: u64,
    pub measurements: u64,
}

impl GateTally {
    fn count(&mut self, kind: GateKind) {
        match kind {
            GateKind::I => {}
            GateKind::T | GateKind::Tdg => self.t_count += 1,
            GateKind::Rz(k) if k.is_odd() => self.t_count += 1,
            GateKind::Rz(k) if k.index() == 0 => {}
            GateKind::X => self.not += 1,
            GateKind::H | GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::Rz(_) => self.other_one_qubit += 1,
            GateKind::Cnot => self.cnot += 1,
            GateKind::Cz | GateKind::CPhase => self.other_two_qubit += 1,
            GateKind::Swap => self.swap += 1,
            GateKind::Toffoli => self.toffoli += 1,
        }
    }

    pub fn two_qubit_clifford(&self) -> u64 {
        self.cnot + self.swap + self.other_two_qubit
    }

    pub fn one_qubit_clifford(&self) -> u64 {
        self.not + self.other_one_qubit
    }

    pub fn to_csv(&self) -> String {
        format!(
            "category,count\nt_count,{}\ntoffoli,{}\ncnot,{}\nswap,{}\nother_two_qubit,{}\nnot,{}\nother_one_qubit,{}\nmeasurements,{}\ntwo_qubit_clifford,{}\none_qubit_clifford,{}\n",
            self.t_count,
            self.toffoli,
            self.cnot,
            self.swap,
            self.other_two_qubit,
            self.not,
            self.other_one_qubit,
            self.measurements,
            self.two_qubit_clifford(),
            self.one_qubit_clifford()
        )
    }
}
