//! Reproducible run fingerprints and the debug trace dump.

use std::fmt::Write as _;

use super::message::Message;

/// FNV offset basis; also the hash of a run that sends no message.
pub const EMPTY_TRACE_HASH: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: u64,
    pub sender: u64,
    pub receiver: u64,
    pub payload: Message,
}

/// Folds messages in (round, sender, receiver) order. Each message carries its
/// round, so the result depends on the round a message was sent in but not on
/// the order of messages within a round once they are sorted.
#[derive(Debug, Clone)]
pub struct TraceHasher(u64);

impl Default for TraceHasher {
    fn default() -> Self {
        Self::new()
    }
}

impl TraceHasher {
    pub fn new() -> Self {
        Self(EMPTY_TRACE_HASH)
    }

    fn word(&mut self, w: u64) {
        // FNV-1a over whole words with a shift to carry high bits down; each
        // step is a bijection of the state, so any single change in the input
        // changes the result.
        self.0 = (self.0 ^ w).wrapping_mul(FNV_PRIME);
        self.0 ^= self.0 >> 29;
    }

    pub fn absorb(&mut self, round: u64, sender: u64, receiver: u64, payload: &Message) {
        self.word(round);
        self.word(sender);
        self.word(receiver);
        self.word(payload.len() as u64);
        for w in payload.words() {
            self.word(*w);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

fn sorted(entries: &[TraceEntry]) -> Vec<&TraceEntry> {
    let mut v: Vec<&TraceEntry> = entries.iter().collect();
    v.sort_by(|a, b| {
        (a.round, a.sender, a.receiver, a.payload.to_bit_string()).cmp(&(
            b.round,
            b.sender,
            b.receiver,
            b.payload.to_bit_string(),
        ))
    });
    v
}

/// Hash of a recorded trace, independent of the order entries were recorded in
/// within each round.
pub fn trace_hash(entries: &[TraceEntry]) -> u64 {
    let mut h = TraceHasher::new();
    for e in sorted(entries) {
        h.absorb(e.round, e.sender, e.receiver, &e.payload);
    }
    h.finish()
}

/// One line per message: `round sender receiver bit_len payload_hex`.
pub fn dump_trace(entries: &[TraceEntry]) -> String {
    let mut out = String::new();
    for e in sorted(entries) {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            e.round,
            e.sender,
            e.receiver,
            e.payload.len(),
            e.payload.to_hex()
        );
    }
    out
}
