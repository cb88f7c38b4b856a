use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::message::{Direction, Envelope, ProtocolMessage};
use super::ProtocolError;
use crate::simcore::{sample_depolarizing, Pauli};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    /// Depolarizing probability per transmitted physical qubit.
    pub depolarizing: f64,
    /// Drop probability per classical message.
    pub classical_loss: f64,
    /// Resends of a dropped classical message before aborting.
    pub max_retransmits: u32,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { depolarizing: 0.0, classical_loss: 0.0, max_retransmits: 8 }
    }
}

impl ChannelConfig {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        for (name, p) in [("depolarizing", self.depolarizing), ("classical_loss", self.classical_loss)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProtocolError::Config(format!("{name} probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Pauli error on a 7-position block (or one bare qubit at position 0) as X and Z masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: u8,
    pub z: u8,
}

impl PauliFrame {
    pub fn single(position: usize, p: Pauli) -> Self {
        let bit = 1u8 << position;
        match p {
            Pauli::X => PauliFrame { x: bit, z: 0 },
            Pauli::Z => PauliFrame { x: 0, z: bit },
            Pauli::Y => PauliFrame { x: bit, z: bit },
        }
    }

    pub fn compose(self, other: PauliFrame) -> Self {
        PauliFrame { x: self.x ^ other.x, z: self.z ^ other.z }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Non-identity Paulis by position.
    pub fn paulis(&self) -> Vec<(usize, Pauli)> {
        (0..8)
            .filter_map(|p| match (self.x >> p & 1, self.z >> p & 1) {
                (1, 0) => Some((p, Pauli::X)),
                (0, 1) => Some((p, Pauli::Z)),
                (1, 1) => Some((p, Pauli::Y)),
                _ => None,
            })
            .collect()
    }
}

/// Outcome of pushing one message through the channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Delivery {
    Delivered { envelope: Envelope, noise: PauliFrame, applications: u32 },
    Lost,
}

/// One transmission attempt: quantum payloads get `depolarize(p)` on each
/// physical qubit, classical messages may be dropped. Sequence numbers are
/// left at zero; [`Channel`] assigns them on delivery.
pub fn step_channel(cfg: &ChannelConfig, message: ProtocolMessage, direction: Direction, rng: &mut ChaCha8Rng) -> Result<Delivery, ProtocolError> {
    let envelope = Envelope { seq: 0, direction, message };
    if message.is_quantum() {
        let mut noise = PauliFrame::default();
        let n = message.physical_qubits();
        for q in 0..n as usize {
            if let Some(p) = sample_depolarizing(cfg.depolarizing, rng)? {
                noise = noise.compose(PauliFrame::single(q, p));
            }
        }
        return Ok(Delivery::Delivered { envelope, noise, applications: n });
    }
    if cfg.classical_loss > 0.0 && rng.random::<f64>() < cfg.classical_loss {
        return Ok(Delivery::Lost);
    }
    Ok(Delivery::Delivered { envelope, noise: PauliFrame::default(), applications: 0 })
}

/// In-order channel with per-direction sequence numbers and bounded retransmission.
#[derive(Debug, Clone)]
pub struct Channel {
    cfg: ChannelConfig,
    rng: ChaCha8Rng,
    next_seq: [u64; 2],
    pub(crate) stats: ChannelStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChannelStats {
    pub pauli_applications: u64,
    pub injected_errors: u64,
    pub lost_messages: u64,
}

impl Channel {
    pub fn new(cfg: ChannelConfig, rng: ChaCha8Rng) -> Result<Self, ProtocolError> {
        cfg.validate()?;
        Ok(Channel { cfg, rng, next_seq: [0, 0], stats: ChannelStats::default() })
    }

    pub fn stats(&self) -> ChannelStats {
        self.stats
    }

    /// Delivers `message`, resending classical messages up to the retry limit.
    /// Returns the envelope, the payload noise and the number of lost attempts.
    pub fn send(&mut self, direction: Direction, message: ProtocolMessage) -> Result<(Envelope, PauliFrame, u32), ProtocolError> {
        let mut lost = 0;
        loop {
            match step_channel(&self.cfg, message, direction, &mut self.rng)? {
                Delivery::Delivered { mut envelope, noise, applications } => {
                    let slot = &mut self.next_seq[direction as usize];
                    envelope.seq = *slot;
                    *slot += 1;
                    self.stats.pauli_applications += u64::from(applications);
                    self.stats.injected_errors += noise.paulis().len() as u64;
                    return Ok((envelope, noise, lost));
                }
                Delivery::Lost => {
                    lost += 1;
                    self.stats.lost_messages += 1;
                    if lost > self.cfg.max_retransmits {
                        return Err(ProtocolError::Aborted {
                            message: format!("{} at {}", message.variant(), message.coord()),
                            attempts: lost,
                        });
                    }
                }
            }
        }
    }
}
