//! Client/server execution of the unencoded brickwork protocol and its two
//! encoded variants over a simulated channel, with transcripts for auditing.

mod agents;
mod audit;
mod channel;
mod message;
pub mod physical;
mod resources;
mod run;
mod transcript;

pub use audit::{blindness_audit, delta_samples, BlindnessReport, DeltaSample, GroupStats, MIN_SAMPLES_PER_GROUP, SIGNIFICANCE};
pub use channel::{step_channel, Channel, ChannelConfig, ChannelStats, Delivery, PauliFrame};
pub use message::{Direction, Envelope, ProtocolMessage};
pub use resources::{LedgerItem, ResourceLedger, LEDGER_FORMAT_VERSION};
pub use run::{
    run_bfk_basic, run_protocol, run_protocol1, run_protocol2_bsa, Backend, BufferMode, RunConfig, RunOutcome, RunStatus,
    Variant,
};
pub use transcript::{scan_bob_view, Entry, MessageShape, OmniscientRecord, Transcript, View, TRANSCRIPT_FORMAT_VERSION};

use thiserror::Error;

use crate::brickwork::{BrickworkError, Coord};
use crate::simcore::SimError;
use crate::steane::SteaneError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Brickwork(#[from] BrickworkError),
    #[error(transparent)]
    Steane(#[from] SteaneError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("protocol aborted: {message} lost {attempts} times")]
    Aborted { message: String, attempts: u32 },
    #[error("transcript leaks client data: {0}")]
    Leak(String),
    #[error("transcript invariant violated: {0}")]
    Invariant(String),
    #[error("{got} samples at {coord}, need at least {need}")]
    InsufficientSamples { coord: Coord, got: usize, need: usize },
}
