use serde::{Deserialize, Serialize};

use super::channel::ChannelStats;
use crate::ledger::{Census, CostVector, PartyCost, Protocol};

pub const LEDGER_FORMAT_VERSION: u32 = 1;

/// A charge the cost model does not contain, kept out of the party totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerItem {
    pub party: String,
    pub item: String,
    pub cost: CostVector,
}

/// Gate counts charged during one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub format_version: u32,
    pub protocol: Protocol,
    pub census: Census,
    /// Charged at the octant-averaged cost of each primitive.
    pub expected: Vec<PartyCost>,
    /// Charged at the exact cost of the angles actually drawn.
    pub realized: Vec<PartyCost>,
    pub itemized: Vec<LedgerItem>,
    pub transmitted_physical_qubits: u64,
    pub returned_physical_qubits: u64,
    /// Most logical blocks the client held at once during preparation.
    pub buffer_high_water_blocks: usize,
    pub discarded_blocks: u64,
    pub channel: ChannelStats,
}

impl ResourceLedger {
    pub(crate) fn new(protocol: Protocol, census: Census, parties: &[&str]) -> Self {
        let zero = |p: &&str| PartyCost { party: p.to_string(), cost: CostVector::ZERO };
        ResourceLedger {
            format_version: LEDGER_FORMAT_VERSION,
            protocol,
            census,
            expected: parties.iter().map(zero).collect(),
            realized: parties.iter().map(zero).collect(),
            itemized: Vec::new(),
            transmitted_physical_qubits: 0,
            returned_physical_qubits: 0,
            buffer_high_water_blocks: 0,
            discarded_blocks: 0,
            channel: ChannelStats::default(),
        }
    }

    pub(crate) fn charge(&mut self, party: &str, expected: CostVector, realized: CostVector) {
        for (list, c) in [(&mut self.expected, expected), (&mut self.realized, realized)] {
            let slot = list.iter_mut().find(|p| p.party == party).expect("party declared");
            slot.cost += c;
        }
    }

    pub fn expected_cost(&self, party: &str) -> Option<&CostVector> {
        self.expected.iter().find(|p| p.party == party).map(|p| &p.cost)
    }

    pub fn realized_cost(&self, party: &str) -> Option<&CostVector> {
        self.realized.iter().find(|p| p.party == party).map(|p| &p.cost)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} on {}x{}\n", self.protocol, self.census.rows, self.census.layers);
        for (title, list) in [("expected", &self.expected), ("realized", &self.realized)] {
            s += &format!("  {title}\n");
            for p in list {
                let [t, two, one, m] = p.cost.display_parts();
                s += &format!("    {:<9} T {t}; 2q {two}; 1q {one}; meas {m}\n", p.party);
            }
        }
        for i in &self.itemized {
            let [t, two, one, m] = i.cost.display_parts();
            s += &format!("  outside model: {} {}: T {t}; 2q {two}; 1q {one}; meas {m}\n", i.party, i.item);
        }
        s += &format!(
            "  physical qubits sent {}, returned {}; buffer high-water {} blocks; discarded {}\n",
            self.transmitted_physical_qubits, self.returned_physical_qubits, self.buffer_high_water_blocks, self.discarded_blocks
        );
        s += &format!(
            "  channel: {} Pauli-channel applications, {} errors, {} lost messages\n",
            self.channel.pauli_applications, self.channel.injected_errors, self.channel.lost_messages
        );
        s
    }
}
