use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::agents::{logical_effect, Alice, Bob, Outgoing};
use super::channel::{Channel, ChannelConfig, PauliFrame};
use super::message::{Direction, ProtocolMessage};
use super::physical::{frame_text, spot_check, SpotCheck};
use super::resources::{LedgerItem, ResourceLedger};
use super::transcript::{scan_bob_view, OmniscientRecord, Transcript, View};
use super::ProtocolError;
use crate::brickwork::{BrickworkLayout, Coord};
use crate::ledger::{Census, CostModel, Protocol};
use crate::simcore::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Statevector execution of the brickwork computation at the logical level.
    #[default]
    Exact,
    /// Protocol structure and counts only; outcomes come from the seeded generator.
    Tally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BufferMode {
    /// The client holds a whole batch of eight blocks.
    #[default]
    EightQubit,
    /// Unselected blocks are measured out on arrival.
    MeasureAndDiscard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    BfkBasic,
    Protocol1,
    Protocol2,
}

impl Variant {
    pub fn ledger_protocol(self) -> Protocol {
        match self {
            Variant::BfkBasic => Protocol::BfkBasic,
            Variant::Protocol1 => Protocol::Protocol1,
            Variant::Protocol2 => Protocol::Protocol2,
        }
    }

    /// Physical qubits per transmitted qubit.
    pub fn block(self) -> u32 {
        match self {
            Variant::BfkBasic => 1,
            _ => 7,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ledger_protocol().name())
    }
}

impl FromStr for Variant {
    type Err = ProtocolError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfk" | "bfk_basic" => Ok(Variant::BfkBasic),
            "protocol1" | "p1" => Ok(Variant::Protocol1),
            "protocol2" | "p2" | "bsa" => Ok(Variant::Protocol2),
            _ => Err(ProtocolError::Config(format!("unknown protocol `{s}` (bfk, protocol1, bsa)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub backend: Backend,
    pub channel: ChannelConfig,
    pub buffer_mode: BufferMode,
    /// How many coordinates, first in measurement order, also go through the
    /// physical Steane pipeline. Exact backend, encoded protocols only.
    pub physical_checks: usize,
    /// Replaces the drawn `r` at these coordinates.
    pub forced_r: Vec<(Coord, bool)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::Exact,
            channel: ChannelConfig::default(),
            buffer_mode: BufferMode::EightQubit,
            physical_checks: 0,
            forced_r: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn tally() -> Self {
        RunConfig { backend: Backend::Tally, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    /// Blocks whose channel noise exceeded what the code corrects.
    Uncorrectable { coords: Vec<Coord> },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Output column after Alice's corrections; exact backend only.
    pub output: Option<StateVector>,
    /// Alice's corrected outcomes `s`, in measurement order.
    pub results: Vec<(Coord, bool)>,
    pub transcript: Transcript,
    /// SHA-256 of the Bob-view transcript.
    pub digest: String,
    pub ledger: ResourceLedger,
    pub spot_checks: Vec<SpotCheck>,
}

pub fn run_bfk_basic(
    layout: &BrickworkLayout,
    input: Option<&StateVector>,
    cfg: &RunConfig,
    seed: u64,
) -> Result<RunOutcome, ProtocolError> {
    run_protocol(Variant::BfkBasic, layout, input, cfg, seed)
}

pub fn run_protocol1(
    layout: &BrickworkLayout,
    input: Option<&StateVector>,
    cfg: &RunConfig,
    seed: u64,
) -> Result<RunOutcome, ProtocolError> {
    run_protocol(Variant::Protocol1, layout, input, cfg, seed)
}

pub fn run_protocol2_bsa(
    layout: &BrickworkLayout,
    input: Option<&StateVector>,
    cfg: &RunConfig,
    seed: u64,
    buffer_mode: BufferMode,
) -> Result<RunOutcome, ProtocolError> {
    let cfg = RunConfig { buffer_mode, ..cfg.clone() };
    run_protocol(Variant::Protocol2, layout, input, &cfg, seed)
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

fn logical_text((x, z): (bool, bool)) -> String {
    match (x, z) {
        (false, false) => "I",
        (true, false) => "X",
        (false, true) => "Z",
        (true, true) => "Y",
    }
    .into()
}

/// Everything outside the two parties: the channel, the transcript and the
/// bookkeeping that needs to see both sides.
struct Harness {
    variant: Variant,
    channel: Channel,
    t: Transcript,
    cols: usize,
    /// Total noise on the copy of each qubit Bob ends up measuring.
    frames: Vec<Vec<PauliFrame>>,
    uncorrectable: Vec<Coord>,
    sent: u64,
    returned: u64,
}

impl Harness {
    /// Pushes one message through the channel and logs it. Returns the
    /// payload noise accumulated so far.
    fn carry(&mut self, direction: Direction, out: &Outgoing) -> Result<PauliFrame, ProtocolError> {
        let message = out.message;
        let (env, noise, lost) = self.channel.send(direction, message)?;
        let c = message.coord();
        if lost > 0 {
            self.t.note(OmniscientRecord::ChannelLoss { direction, variant: message.variant().into(), x: c.x, y: c.y, attempts: lost });
        }
        self.t.message(env);
        if !noise.is_identity() {
            let logical = if message.physical_qubits() == 7 { super::physical::residual_logical(noise) } else { (noise.x & 1 == 1, noise.z & 1 == 1) };
            self.t.note(OmniscientRecord::ChannelNoise {
                direction,
                seq: env.seq,
                x: c.x,
                y: c.y,
                paulis: frame_text(noise),
                logical: logical_text(logical),
            });
        }
        let total = out.carried.compose(noise);
        match message {
            ProtocolMessage::QubitTransfer { slot: Some(_), .. } => self.sent += u64::from(message.physical_qubits()),
            ProtocolMessage::QubitTransfer { .. } | ProtocolMessage::SelectionReturn { .. } => {
                let output = direction == Direction::BobToAlice;
                if output {
                    self.returned += u64::from(message.physical_qubits());
                } else {
                    self.sent += u64::from(message.physical_qubits());
                    self.frames[c.x - 1][c.y - 1] = total;
                }
                // The receiver corrects here; an encoded block can still end
                // up with a logical error.
                let (lx, lz) = logical_effect(self.variant, total);
                if self.variant != Variant::BfkBasic && (lx || lz) {
                    self.uncorrectable.push(c);
                    self.t.note(OmniscientRecord::LogicalError { x: c.x, y: c.y, paulis: frame_text(total), logical: logical_text((lx, lz)) });
                }
                debug_assert!(!output || c.x == self.cols);
            }
            _ => {}
        }
        Ok(total)
    }
}

/// Runs one protocol instance. Alice's θ, r and pads, Bob's outcomes, the
/// channel and the physical spot checks each draw from their own stream of `seed`.
///
/// The two parties are state machines that only exchange messages; the
/// scheduler polls Alice, then Bob, delivering each message as it is sent,
/// until neither has anything left to send.
pub fn run_protocol(
    variant: Variant,
    layout: &BrickworkLayout,
    input: Option<&StateVector>,
    cfg: &RunConfig,
    seed: u64,
) -> Result<RunOutcome, ProtocolError> {
    let model = CostModel::steane();
    let rows = layout.rows();
    let exact = cfg.backend == Backend::Exact;
    let encoded = variant != Variant::BfkBasic;
    match input {
        Some(_) if !exact => return Err(ProtocolError::Config("the tally backend takes no input state".into())),
        Some(_) if variant == Variant::Protocol2 => {
            return Err(ProtocolError::Config("Protocol 2 prepares every qubit on the server and takes no input state".into()))
        }
        Some(v) if v.num_qubits() != rows => {
            return Err(ProtocolError::Config(format!("input has {} qubits, layout has {rows} rows", v.num_qubits())))
        }
        _ => {}
    }
    if cfg.physical_checks > 0 && !(exact && encoded) {
        return Err(ProtocolError::Config("physical checks need the exact backend and an encoded protocol".into()));
    }

    let mut alice = Alice::new(variant, layout, input, cfg.buffer_mode, &cfg.forced_r, &mut stream(seed, 1))?;
    let mut bob = Bob::new(variant, exact, rows, layout.layers(), stream(seed, 2))?;
    let mut h = Harness {
        variant,
        channel: Channel::new(cfg.channel, stream(seed, 3))?,
        t: Transcript::new(variant.ledger_protocol().name(), rows, layout.layers()),
        cols: layout.columns(),
        frames: vec![vec![PauliFrame::default(); rows]; layout.columns()],
        uncorrectable: Vec::new(),
        sent: 0,
        returned: 0,
    };
    let mut physical_seeds = stream(seed, 4);
    let mut checks = Vec::new();
    let mut itemized = Vec::new();
    let bqc = if variant == Variant::Protocol2 { "bob_bqc" } else { "bob" };

    loop {
        let mut idle = true;
        if let Some(out) = alice.poll()? {
            idle = false;
            let noise = h.carry(Direction::AliceToBob, &out)?;
            for n in alice.notes.drain(..) {
                h.t.note(n);
            }
            bob.deliver(out.message, out.payload, noise)?;
            if let ProtocolMessage::AngleAnnounce { x, y, delta } = out.message {
                if checks.len() < cfg.physical_checks {
                    let th = alice.theta[x - 1][y - 1];
                    let chk = spot_check(&model, (x, y), th, h.frames[x - 1][y - 1], delta, physical_seeds.random())?;
                    let c = Coord::new(x, y);
                    itemized.push(LedgerItem { party: bqc.into(), item: format!("syndrome extraction at {c}"), cost: chk.correction });
                    if !chk.prep_matches() {
                        let party = if variant == Variant::Protocol2 { "bob_prep" } else { "alice" };
                        itemized.push(LedgerItem { party: party.into(), item: format!("physical preparation at {c}"), cost: chk.prep });
                    }
                    if !chk.measurement_matches() {
                        itemized.push(LedgerItem { party: bqc.into(), item: format!("physical measurement at {c}"), cost: chk.measurement });
                    }
                    checks.push(chk);
                }
            }
        }
        if let Some(out) = bob.poll()? {
            idle = false;
            let noise = h.carry(Direction::BobToAlice, &out)?;
            alice.deliver(out.message, out.payload, noise)?;
            for n in alice.notes.drain(..) {
                h.t.note(n);
            }
        }
        if idle {
            break;
        }
    }
    if !alice.done() {
        return Err(ProtocolError::Invariant("protocol stalled before the output came back".into()));
    }

    let census = Census::of_layout(layout);
    let mut ledger = match variant {
        Variant::Protocol2 => {
            let mut l = ResourceLedger::new(variant.ledger_protocol(), census, &["alice", "bob_prep", "bob_bqc", "bob"]);
            l.charge("bob_prep", bob.prep.expected, bob.prep.realized);
            l.charge("bob_bqc", bob.bqc.expected, bob.bqc.realized);
            l.charge("bob", bob.prep.expected + bob.bqc.expected, bob.prep.realized + bob.bqc.realized);
            l
        }
        _ => {
            let mut l = ResourceLedger::new(variant.ledger_protocol(), census, &["alice", "bob"]);
            l.charge("bob", bob.bqc.expected, bob.bqc.realized);
            l
        }
    };
    let sent = h.sent;
    ledger.charge("alice", alice.cost.expected.with_transmitted(sent), alice.cost.realized.with_transmitted(sent));
    ledger.itemized = itemized;
    ledger.transmitted_physical_qubits = sent;
    ledger.returned_physical_qubits = h.returned;
    ledger.buffer_high_water_blocks = alice.high_water;
    ledger.discarded_blocks = alice.discarded;
    ledger.channel = h.channel.stats();

    let t = h.t;
    t.check_structure()?;
    let lines = t.lines(View::Bob);
    scan_bob_view(lines.iter().map(String::as_str))?;
    let mut hasher = Sha256::new();
    for l in &lines {
        hasher.update(l.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hex::encode(hasher.finalize());

    let mut uncorrectable = h.uncorrectable;
    let status = if uncorrectable.is_empty() {
        RunStatus::Success
    } else {
        uncorrectable.sort();
        uncorrectable.dedup();
        RunStatus::Uncorrectable { coords: uncorrectable }
    };
    Ok(RunOutcome {
        status,
        output: alice.final_output,
        results: alice.results,
        transcript: t,
        digest,
        ledger,
        spot_checks: checks,
    })
}
