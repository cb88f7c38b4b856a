use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{format_decimal, CostModel, CostVector, LedgerError};
use crate::brickwork::{brick_census, BrickworkLayout};
use crate::compiler::GateTally;

/// Size of an `n × m` brickwork state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub rows: usize,
    pub layers: usize,
    pub bricks: u64,
    pub half_bricks: u64,
    pub qubits: u64,
    pub measured: u64,
    pub edges: u64,
}

impl Census {
    pub fn new(rows: usize, layers: usize) -> Result<Self, LedgerError> {
        let (bricks, half_bricks, qubits) = brick_census(rows, layers)?;
        Ok(Census {
            rows,
            layers,
            bricks,
            half_bricks,
            qubits,
            measured: 4 * (layers * rows) as u64,
            edges: 10 * bricks + 4 * half_bricks,
        })
    }

    pub fn of_layout(layout: &BrickworkLayout) -> Self {
        Census::new(layout.rows(), layout.layers()).expect("layout shapes are valid")
    }
}

impl FromStr for Census {
    type Err = LedgerError;

    /// `ROWSxLAYERS`, e.g. `35x612`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LedgerError::Argument(format!("census `{s}` is not ROWSxLAYERS"));
        let (r, l) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Census::new(r.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    BfkBasic,
    Protocol1,
    Protocol2,
    FtCircuit,
    BfkFtComparison,
}

impl Protocol {
    pub const ALL: [Protocol; 5] =
        [Protocol::BfkBasic, Protocol::Protocol1, Protocol::Protocol2, Protocol::FtCircuit, Protocol::BfkFtComparison];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::BfkBasic => "bfk_basic",
            Protocol::Protocol1 => "protocol1",
            Protocol::Protocol2 => "protocol2",
            Protocol::FtCircuit => "ft_circuit",
            Protocol::BfkFtComparison => "bfk_ft_comparison",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = LedgerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| LedgerError::Argument(format!("unknown protocol `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyCost {
    pub party: String,
    pub cost: CostVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub protocol: Protocol,
    pub census: Option<Census>,
    pub parties: Vec<PartyCost>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn party(&self, name: &str) -> Option<&CostVector> {
        self.parties.iter().find(|p| p.party == name).map(|p| &p.cost)
    }

    fn push(&mut self, party: &str, cost: CostVector) {
        self.parties.push(PartyCost { party: party.into(), cost });
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.protocol);
        if let Some(c) = &self.census {
            s += &format!(
                "  census {}x{}: {} qubits, {} bricks, {} half-bricks, {} edges\n",
                c.rows,
                c.layers,
                count(c.qubits),
                count(c.bricks),
                count(c.half_bricks),
                count(c.edges)
            );
        }
        if !self.parties.is_empty() {
            s += &format!(
                "  {:<10} {:>14} {:>16} {:>16} {:>16} {:>12}\n",
                "party", "T", "2-qubit", "1-qubit", "measurements", "transmitted"
            );
        }
        for p in &self.parties {
            let [t, two, one, m] = p.cost.display_parts();
            s += &format!(
                "  {:<10} {:>14} {:>16} {:>16} {:>16} {:>12}\n",
                p.party,
                t,
                two,
                one,
                m,
                count(p.cost.transmitted_physical_qubits)
            );
        }
        for n in &self.notes {
            s += &format!("  note: {n}\n");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("protocol,party,t_gates,two_qubit,one_qubit,measurements,transmitted_physical_qubits\n");
        for p in &self.parties {
            let [t, two, one, m] = p.cost.display_parts().map(|v| v.replace(',', ""));
            s += &format!("{},{},{t},{two},{one},{m},{}\n", self.protocol, p.party, p.cost.transmitted_physical_qubits);
        }
        s
    }
}

fn count(v: u64) -> String {
    format_decimal(num_rational::Rational64::from_integer(v as i64))
}

/// What an estimate is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateInput<'a> {
    Census(&'a Census),
    Tally(&'a GateTally),
}

/// Per-party totals for `protocol`. Brickwork protocols need a census,
/// `ft_circuit` needs the decomposed tally.
pub fn estimate(model: &CostModel, protocol: Protocol, input: EstimateInput<'_>) -> Result<Report, LedgerError> {
    let census = match (protocol, input) {
        (Protocol::FtCircuit, EstimateInput::Tally(t)) => return Ok(ft_circuit(model, t)),
        (Protocol::FtCircuit, _) => return Err(LedgerError::Argument("ft_circuit needs a gate tally".into())),
        (_, EstimateInput::Census(c)) => *c,
        (_, EstimateInput::Tally(_)) => {
            return Err(LedgerError::Argument(format!("{protocol} needs a brickwork census")))
        }
    };
    let mut r = Report { protocol, census: Some(census), parties: Vec::new(), notes: Vec::new() };
    let bqc = census_bqc(model, &census);
    match protocol {
        Protocol::BfkBasic => {
            r.push("alice", CostVector::ZERO.with_transmitted(census.qubits));
            r.push(
                "bob",
                CostModel::physical_measurement_avg() * census.measured + CostVector::ints(0, 1, 0, 0) * census.edges,
            );
            r.notes.push(format!("alice prepares {} single qubits with random phase", count(census.qubits)));
        }
        Protocol::Protocol1 => {
            r.push("alice", (model.alice_prep_avg() * census.qubits).with_transmitted(model.block * census.qubits));
            r.push("bob", bqc);
            r.notes.push(format!("alice holds one block under preparation plus 15 ancillas: {} qubits", model.block + 15));
        }
        Protocol::Protocol2 => {
            let prep = model.alice_prep_avg() * census.qubits * 8;
            r.push("alice", CostVector::ZERO.with_transmitted(9 * model.block * census.qubits));
            r.push("bob_prep", prep);
            r.push("bob_bqc", bqc);
            r.push("bob", prep + bqc);
            r.notes.push(format!(
                "alice buffers 8 blocks ({} physical qubits); measure-and-discard needs 2 ({})",
                8 * model.block,
                2 * model.block
            ));
        }
        Protocol::BfkFtComparison => {
            r.notes.push(
                "fault tolerance on top of the brickwork state: the state grows linearly with the swap count; no constants are given"
                    .into(),
            );
        }
        Protocol::FtCircuit => unreachable!("handled above"),
    }
    Ok(r)
}

fn census_bqc(model: &CostModel, c: &Census) -> CostVector {
    model.brick_cost() * c.bricks + model.half_brick_cost() * c.half_bricks
}

fn ft_circuit(model: &CostModel, t: &GateTally) -> Report {
    let cost = model.ft_t * t.t_count
        + model.transversal_two() * t.two_qubit_clifford()
        + model.transversal_one() * t.one_qubit_clifford()
        + model.ft_meas_z * t.measurements;
    Report {
        protocol: Protocol::FtCircuit,
        census: None,
        parties: vec![PartyCost { party: "circuit".into(), cost }],
        notes: Vec::new(),
    }
}

/// The four reports the ratio tables are built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reports {
    pub bfk_basic: Report,
    pub protocol1: Report,
    pub protocol2: Report,
    pub ft_circuit: Report,
}

impl Reports {
    pub fn build(model: &CostModel, census: &Census, decomposed: &GateTally) -> Result<Self, LedgerError> {
        let c = EstimateInput::Census(census);
        Ok(Reports {
            bfk_basic: estimate(model, Protocol::BfkBasic, c)?,
            protocol1: estimate(model, Protocol::Protocol1, c)?,
            protocol2: estimate(model, Protocol::Protocol2, c)?,
            ft_circuit: estimate(model, Protocol::FtCircuit, EstimateInput::Tally(decomposed))?,
        })
    }
}
