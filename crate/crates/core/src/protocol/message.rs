use serde::{Deserialize, Serialize};

use crate::brickwork::Coord;
use crate::simcore::Octant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::AliceToBob => "alice_to_bob",
            Direction::BobToAlice => "bob_to_alice",
        }
    }
}

/// What crosses the channel. Quantum payloads travel as opaque handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ProtocolMessage {
    QubitTransfer {
        x: usize,
        y: usize,
        handle: u64,
        physical_qubits: u32,
        /// Position in a fixed-order preparation batch.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slot: Option<u8>,
    },
    AngleAnnounce {
        x: usize,
        y: usize,
        delta: Octant,
    },
    ResultAnnounce {
        x: usize,
        y: usize,
        bit: bool,
    },
    SelectionReturn {
        x: usize,
        y: usize,
        handle: u64,
        physical_qubits: u32,
    },
}

impl ProtocolMessage {
    pub fn coord(&self) -> Coord {
        match *self {
            ProtocolMessage::QubitTransfer { x, y, .. }
            | ProtocolMessage::AngleAnnounce { x, y, .. }
            | ProtocolMessage::ResultAnnounce { x, y, .. }
            | ProtocolMessage::SelectionReturn { x, y, .. } => Coord::new(x, y),
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            ProtocolMessage::QubitTransfer { .. } => "qubit_transfer",
            ProtocolMessage::AngleAnnounce { .. } => "angle_announce",
            ProtocolMessage::ResultAnnounce { .. } => "result_announce",
            ProtocolMessage::SelectionReturn { .. } => "selection_return",
        }
    }

    /// Physical qubits carried, zero for classical messages.
    pub fn physical_qubits(&self) -> u32 {
        match *self {
            ProtocolMessage::QubitTransfer { physical_qubits, .. }
            | ProtocolMessage::SelectionReturn { physical_qubits, .. } => physical_qubits,
            _ => 0,
        }
    }

    pub fn is_quantum(&self) -> bool {
        self.physical_qubits() > 0
    }
}

/// A delivered message with its per-direction sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub seq: u64,
    pub direction: Direction,
    pub message: ProtocolMessage,
}
