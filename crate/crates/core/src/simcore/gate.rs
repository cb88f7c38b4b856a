use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Octant, SimError};

/// Gate alphabet shared by the simulator and the compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    I,
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rz(Octant),
    Cnot,
    Cz,
    /// Controlled-S.
    CPhase,
    Swap,
    Toffoli,
}

/// A 2×2 complex matrix in row-major order.
pub type Matrix2 = [[Complex64; 2]; 2];

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::CPhase | GateKind::Swap => 2,
            GateKind::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn is_single_qubit(self) -> bool {
        self.arity() == 1
    }

    /// Phase applied to |1⟩ by a diagonal single-qubit gate.
    pub fn diagonal_phase(self) -> Option<Octant> {
        match self {
            GateKind::I => Some(Octant::ZERO),
            GateKind::Z => Some(Octant::PI),
            GateKind::S => Some(Octant::HALF),
            GateKind::Sdg => Some(Octant::new(6)),
            GateKind::T => Some(Octant::QUARTER),
            GateKind::Tdg => Some(Octant::new(7)),
            GateKind::Rz(k) => Some(k),
            _ => None,
        }
    }

    /// Unitary of a single-qubit kind.
    pub fn matrix(self) -> Option<Matrix2> {
        if let Some(k) = self.diagonal_phase() {
            return Some([[ONE, ZERO], [ZERO, k.phase()]]);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            GateKind::H => Some([
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ]),
            GateKind::X => Some([[ZERO, ONE], [ONE, ZERO]]),
            _ => None,
        }
    }

    /// Inverse kind, when it is expressible in the alphabet.
    pub fn inverse(self) -> Option<GateKind> {
        Some(match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rz(k) => GateKind::Rz(-k),
            GateKind::CPhase => return None,
            other => other,
        })
    }

    pub fn name(self) -> String {
        match self {
            GateKind::I => "I".into(),
            GateKind::H => "H".into(),
            GateKind::X => "X".into(),
            GateKind::Z => "Z".into(),
            GateKind::S => "S".into(),
            GateKind::Sdg => "SDG".into(),
            GateKind::T => "T".into(),
            GateKind::Tdg => "TDG".into(),
            GateKind::Rz(k) => format!("RZ{}", k.index()),
            GateKind::Cnot => "CNOT".into(),
            GateKind::Cz => "CZ".into(),
            GateKind::CPhase => "CPHASE".into(),
            GateKind::Swap => "SWAP".into(),
            GateKind::Toffoli => "TOFFOLI".into(),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        let kind = match upper.as_str() {
            "I" | "ID" => GateKind::I,
            "H" => GateKind::H,
            "X" | "NOT" => GateKind::X,
            "Z" => GateKind::Z,
            "S" => GateKind::S,
            "SDG" | "SDAG" => GateKind::Sdg,
            "T" => GateKind::T,
            "TDG" | "TDAG" => GateKind::Tdg,
            "CNOT" | "CX" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            "CPHASE" | "CS" => GateKind::CPhase,
            "SWAP" => GateKind::Swap,
            "TOFFOLI" | "CCX" | "CCNOT" => GateKind::Toffoli,
            other => match other.strip_prefix("RZ") {
                Some(k) => {
                    let k: i64 = k.parse().map_err(|_| format!("bad rotation octant in `{s}`"))?;
                    GateKind::Rz(Octant::new(k))
                }
                None => return Err(format!("unknown gate `{s}`")),
            },
        };
        Ok(kind)
    }
}

/// A gate kind bound to concrete wires.
///
/// Controls come first: `CNOT c t`, `TOFFOLI c1 c2 t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    wires: [usize; 3],
}

impl Gate {
    pub fn new(kind: GateKind, wires: &[usize]) -> Result<Self, SimError> {
        if wires.len() != kind.arity() {
            return Err(SimError::InvalidArgument(format!(
                "{kind} takes {} operand(s), got {}",
                kind.arity(),
                wires.len()
            )));
        }
        for (i, a) in wires.iter().enumerate() {
            if wires[..i].contains(a) {
                return Err(SimError::InvalidArgument(format!("{kind} operands must be distinct, got {wires:?}")));
            }
        }
        let mut w = [0; 3];
        w[..wires.len()].copy_from_slice(wires);
        Ok(Gate { kind, wires: w })
    }

    /// Single-qubit shorthand. Never fails because arity is checked statically by the caller.
    pub fn single(kind: GateKind, wire: usize) -> Self {
        debug_assert!(kind.is_single_qubit());
        Gate { kind, wires: [wire, 0, 0] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        debug_assert_ne!(control, target);
        Gate { kind: GateKind::Cnot, wires: [control, target, 0] }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        debug_assert_ne!(a, b);
        Gate { kind: GateKind::Cz, wires: [a, b, 0] }
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires[..self.kind.arity()]
    }

    /// The same gate with every wire passed through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        let mut g = *self;
        for w in g.wires.iter_mut().take(self.kind.arity()) {
            *w = map(*w);
        }
        g
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for w in self.wires() {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// The single-qubit Paulis used for error injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_and_distinct_operands() {
        assert!(Gate::new(GateKind::Cnot, &[0, 1]).is_ok());
        assert!(Gate::new(GateKind::Cnot, &[1, 1]).is_err());
        assert!(Gate::new(GateKind::Toffoli, &[0, 1]).is_err());
        assert!(Gate::new(GateKind::H, &[3]).is_ok());
    }

    #[test]
    fn parse_roundtrip_names() {
        for k in [
            GateKind::I,
            GateKind::H,
            GateKind::X,
            GateKind::Z,
            GateKind::S,
            GateKind::Sdg,
            GateKind::T,
            GateKind::Tdg,
            GateKind::Rz(Octant::new(5)),
            GateKind::Cnot,
            GateKind::Cz,
            GateKind::CPhase,
            GateKind::Swap,
            GateKind::Toffoli,
        ] {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
        }
        assert!("FOO".parse::<GateKind>().is_err());
    }
}
