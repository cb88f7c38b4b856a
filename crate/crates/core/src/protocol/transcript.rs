use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::message::{Direction, Envelope, ProtocolMessage};
use super::ProtocolError;
use crate::brickwork::{corrected_angle, Coord};
use crate::simcore::Octant;

pub const TRANSCRIPT_FORMAT_VERSION: u32 = 1;

/// Records only the omniscient view contains. Each serializes under an
/// `omniscient` key so it can never be mistaken for a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum OmniscientRecord {
    /// Alice's preparation angle, and the input pad on column 1 when the input is quantum.
    Preparation { x: usize, y: usize, theta: Octant, pad: Option<bool> },
    /// Everything behind one announced angle.
    Measurement { x: usize, y: usize, theta: Octant, r: bool, phi: Octant, phi_prime: Octant, delta: Octant, s: bool },
    /// Paulis the channel put on a payload, and what survives decoding.
    ChannelNoise { direction: Direction, seq: u64, x: usize, y: usize, paulis: String, logical: String },
    /// Noise on a block beyond what one round of correction undoes.
    LogicalError { x: usize, y: usize, paulis: String, logical: String },
    ChannelLoss { direction: Direction, variant: String, x: usize, y: usize, attempts: u32 },
    /// A block the client measured out instead of keeping.
    Discard { x: usize, y: usize, slot: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entry {
    Message(Envelope),
    Omniscient(OmniscientRecord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Bob,
    Omniscient,
}

/// Ordered log of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: String,
    pub rows: usize,
    pub layers: usize,
    pub entries: Vec<Entry>,
}

/// Shape of one message with its values stripped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MessageShape {
    pub direction: Direction,
    pub variant: &'static str,
    pub coord: Coord,
    pub physical_qubits: u32,
    pub slot: Option<u8>,
}

#[derive(Serialize)]
struct MessageLine<'a> {
    seq: u64,
    direction: Direction,
    #[serde(flatten)]
    message: &'a ProtocolMessage,
    payload_digest: String,
}

#[derive(Serialize)]
struct OmniscientLine<'a> {
    omniscient: &'a OmniscientRecord,
}

fn payload_digest(m: &ProtocolMessage) -> String {
    let bytes = serde_json::to_vec(m).expect("messages serialize");
    hex::encode(&Sha256::digest(bytes)[..8])
}

/// Keys a Bob-view message line may carry, by variant.
fn allowed_keys(variant: &str) -> Option<&'static [&'static str]> {
    Some(match variant {
        "qubit_transfer" => &["x", "y", "handle", "physical_qubits", "slot"],
        "angle_announce" => &["x", "y", "delta"],
        "result_announce" => &["x", "y", "bit"],
        "selection_return" => &["x", "y", "handle", "physical_qubits"],
        _ => return None,
    })
}

const ENVELOPE_KEYS: [&str; 4] = ["seq", "direction", "variant", "payload_digest"];
const HEADER_KEYS: [&str; 5] = ["format_version", "view", "protocol", "rows", "layers"];

/// Structural check that no line of a Bob-view transcript carries a field
/// outside the message schema: no θ, r, φ, φ′, s, pad or omniscient record.
pub fn scan_bob_view<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<usize, ProtocolError> {
    let mut checked = 0;
    for (i, line) in lines.into_iter().enumerate() {
        let leak = |what: String| ProtocolError::Leak(format!("line {}: {what}", i + 1));
        let v: Value = serde_json::from_str(line).map_err(|e| leak(format!("not JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| leak("not an object".into()))?;
        if i == 0 {
            if let Some(k) = obj.keys().find(|k| !HEADER_KEYS.contains(&k.as_str())) {
                return Err(leak(format!("unexpected header field `{k}`")));
            }
            if obj.get("view").and_then(Value::as_str) != Some("bob") {
                return Err(leak("header does not declare the bob view".into()));
            }
            continue;
        }
        let variant = obj.get("variant").and_then(Value::as_str).ok_or_else(|| leak("missing variant".into()))?;
        let allowed = allowed_keys(variant).ok_or_else(|| leak(format!("unknown variant `{variant}`")))?;
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str()) && !ENVELOPE_KEYS.contains(&k.as_str())) {
            return Err(leak(format!("field `{k}` outside the {variant} schema")));
        }
        checked += 1;
    }
    Ok(checked)
}

impl Transcript {
    pub fn new(protocol: &str, rows: usize, layers: usize) -> Self {
        Transcript { protocol: protocol.into(), rows, layers, entries: Vec::new() }
    }

    pub(crate) fn message(&mut self, e: Envelope) {
        self.entries.push(Entry::Message(e));
    }

    pub(crate) fn note(&mut self, r: OmniscientRecord) {
        self.entries.push(Entry::Omniscient(r));
    }

    pub fn messages(&self) -> impl Iterator<Item = &Envelope> + '_ {
        self.entries.iter().filter_map(|e| match e {
            Entry::Message(m) => Some(m),
            Entry::Omniscient(_) => None,
        })
    }

    pub fn omniscient(&self) -> impl Iterator<Item = &OmniscientRecord> + '_ {
        self.entries.iter().filter_map(|e| match e {
            Entry::Omniscient(r) => Some(r),
            Entry::Message(_) => None,
        })
    }

    fn header(&self, view: View) -> String {
        let name = if view == View::Bob { "bob" } else { "omniscient" };
        serde_json::json!({
            "format_version": TRANSCRIPT_FORMAT_VERSION,
            "view": name,
            "protocol": self.protocol,
            "rows": self.rows,
            "layers": self.layers,
        })
        .to_string()
    }

    /// One JSON object per line, header first.
    pub fn lines(&self, view: View) -> Vec<String> {
        let mut out = vec![self.header(view)];
        for e in &self.entries {
            match e {
                Entry::Message(m) => out.push(
                    serde_json::to_string(&MessageLine {
                        seq: m.seq,
                        direction: m.direction,
                        message: &m.message,
                        payload_digest: payload_digest(&m.message),
                    })
                    .expect("message lines serialize"),
                ),
                Entry::Omniscient(r) if view == View::Omniscient => {
                    out.push(serde_json::to_string(&OmniscientLine { omniscient: r }).expect("records serialize"))
                }
                Entry::Omniscient(_) => {}
            }
        }
        out
    }

    pub fn to_jsonl(&self, view: View) -> String {
        let mut s = self.lines(view).join("\n");
        s.push('\n');
        s
    }

    /// SHA-256 of the Bob-view document, hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_jsonl(View::Bob).as_bytes()))
    }

    pub fn schema(&self) -> Vec<MessageShape> {
        self.messages()
            .map(|e| {
                let slot = match e.message {
                    ProtocolMessage::QubitTransfer { slot, .. } => slot,
                    _ => None,
                };
                MessageShape {
                    direction: e.direction,
                    variant: e.message.variant(),
                    coord: e.message.coord(),
                    physical_qubits: e.message.physical_qubits(),
                    slot,
                }
            })
            .collect()
    }

    /// Announced angles in order.
    pub fn deltas(&self) -> Vec<(Coord, Octant)> {
        self.messages()
            .filter_map(|e| match e.message {
                ProtocolMessage::AngleAnnounce { x, y, delta } => Some((Coord::new(x, y), delta)),
                _ => None,
            })
            .collect()
    }

    /// Structural checks plus the Bob-view schema scan.
    pub fn check_invariants(&self) -> Result<(), ProtocolError> {
        self.check_structure()?;
        let lines = self.lines(View::Bob);
        scan_bob_view(lines.iter().map(String::as_str))?;
        Ok(())
    }

    /// Sequencing, angle-before-result ordering, the δ identity against the
    /// omniscient records, and batch order of server-side preparations.
    pub fn check_structure(&self) -> Result<(), ProtocolError> {
        let bad = |m: String| Err(ProtocolError::Invariant(m));
        let mut next_seq: HashMap<Direction, u64> = HashMap::new();
        let mut announced: HashMap<Coord, bool> = HashMap::new();
        let mut slots: BTreeMap<Coord, Vec<u8>> = BTreeMap::new();
        for e in self.messages() {
            let want = next_seq.entry(e.direction).or_insert(0);
            if e.seq != *want {
                return bad(format!("{} seq {} where {} was due", e.direction.name(), e.seq, want));
            }
            *want += 1;
            let c = e.message.coord();
            match e.message {
                ProtocolMessage::AngleAnnounce { .. } => {
                    if announced.insert(c, false).is_some() {
                        return bad(format!("second angle for {c}"));
                    }
                }
                ProtocolMessage::ResultAnnounce { .. } => match announced.get_mut(&c) {
                    Some(done @ false) => *done = true,
                    Some(true) => return bad(format!("second result for {c}")),
                    None => return bad(format!("result for {c} before its angle")),
                },
                ProtocolMessage::QubitTransfer { slot: Some(k), .. } => slots.entry(c).or_default().push(k),
                _ => {}
            }
        }
        if let Some((c, _)) = announced.iter().find(|(_, done)| !**done) {
            return bad(format!("angle for {c} never answered"));
        }
        for (c, s) in &slots {
            if s.iter().copied().ne(0..8) {
                return bad(format!("preparation batch at {c} arrived as {s:?}"));
            }
        }
        for r in self.omniscient() {
            if let OmniscientRecord::Measurement { theta, r, phi_prime, delta, .. } = *r {
                if delta - theta - Octant::new(4 * i64::from(r)) != phi_prime {
                    return bad(format!("δ identity fails: δ={delta} θ={theta} r={r} φ′={phi_prime}"));
                }
            }
        }
        Ok(())
    }

    /// Recomputes every φ′ from the recorded outcomes, column by column.
    pub fn check_corrections(&self, layout: &crate::brickwork::BrickworkLayout) -> Result<(), ProtocolError> {
        let mut record = crate::brickwork::MeasurementRecord::new(layout);
        let mut pads = vec![false; layout.rows()];
        for r in self.omniscient() {
            if let OmniscientRecord::Preparation { x: 1, y, pad: Some(p), .. } = *r {
                pads[y - 1] = p;
            }
        }
        if pads.iter().any(|&p| p) {
            record = crate::brickwork::MeasurementRecord::with_pads(layout, &pads);
        }
        for r in self.omniscient() {
            if let OmniscientRecord::Measurement { x, y, phi, phi_prime, s, .. } = *r {
                let c = Coord::new(x, y);
                let (sx, sz) = record.signals(layout, c)?;
                if corrected_angle(phi, sx, sz) != phi_prime || layout.phi(c) != phi {
                    return Err(ProtocolError::Invariant(format!("φ′ at {c} does not follow from the record")));
                }
                record.push(c, s)?;
            }
        }
        Ok(())
    }
}
