//! Lock-step round engine.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::message::{bits_for, id_bits, Message, WireError};
use super::trace::{TraceEntry, TraceHasher};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub bandwidth_bits: usize,
    pub max_rounds: u64,
    pub global_seed: u64,
}

impl SimConfig {
    pub const DEFAULT_MAX_ROUNDS: u64 = 50_000_000;

    /// Default bandwidth of 8·⌈log₂(n+1)⌉ bits.
    pub fn new(n: usize) -> Self {
        Self {
            bandwidth_bits: Self::default_bandwidth(n),
            max_rounds: Self::DEFAULT_MAX_ROUNDS,
            global_seed: 0,
        }
    }

    pub fn default_bandwidth(n: usize) -> usize {
        8 * id_bits(n)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.global_seed = seed;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_bandwidth(mut self, bits: usize) -> Self {
        self.bandwidth_bits = bits;
        self
    }
}

/// Everything a node knows when it starts.
#[derive(Debug, Clone)]
pub struct NodeView {
    pub my_id: u64,
    /// Sorted ascending; port `p` leads to `neighbor_ids[p]`.
    pub neighbor_ids: Vec<u64>,
    pub n: usize,
    pub id_bits: usize,
    pub bandwidth_bits: usize,
    pub extra_inputs: BTreeMap<String, Message>,
    pub rng_seed: u64,
}

impl NodeView {
    pub fn degree(&self) -> usize {
        self.neighbor_ids.len()
    }

    pub fn input(&self, key: &str) -> Option<&Message> {
        self.extra_inputs.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Running,
    Halted(Message),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct NodeFault(pub String);

impl From<WireError> for NodeFault {
    fn from(e: WireError) -> Self {
        NodeFault(e.to_string())
    }
}

/// Per-port send buffer handed to [`NodeProgram::step`].
#[derive(Default)]
pub struct Outbox {
    /// Sized to the largest degree seen; only `..degree` is in use.
    slots: Vec<Option<Message>>,
    degree: usize,
    sent: Vec<usize>,
    bad_port: Option<usize>,
    duplicate: Option<usize>,
    idle_until: Option<u64>,
}

impl Outbox {
    fn reset(&mut self, degree: usize) {
        // drained slots are already None
        if self.slots.len() < degree {
            self.slots.resize(degree, None);
        }
        self.degree = degree;
        self.sent.clear();
        self.bad_port = None;
        self.duplicate = None;
        self.idle_until = None;
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Queues `msg` on `port`. Invalid or repeated sends are reported by the
    /// engine after the step returns.
    pub fn send(&mut self, port: usize, msg: Message) {
        if port >= self.degree {
            self.bad_port.get_or_insert(port);
            return;
        }
        let slot = &mut self.slots[port];
        if slot.is_some() {
            self.duplicate.get_or_insert(port);
        } else {
            self.sent.push(port);
        }
        *slot = Some(msg);
    }

    pub fn send_all(&mut self, msg: &Message) {
        for p in 0..self.degree {
            self.send(p, msg.clone());
        }
    }

    pub fn is_sending(&self, port: usize) -> bool {
        port < self.degree && self.slots[port].is_some()
    }

    /// Promises that until `round` the node would do nothing unless a message
    /// arrives, so the engine may skip stepping it. `u64::MAX` waits for mail.
    pub fn idle_until(&mut self, round: u64) {
        self.idle_until = Some(round);
    }
}

/// A per-node state machine. The factory passed to the engine plays the role
/// of `init`.
pub trait NodeProgram {
    /// `inbox[p]` holds the message sent over port `p` in the previous round.
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        outbox: &mut Outbox,
    ) -> Result<Status, NodeFault>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("bandwidth {bandwidth} is below the ID width {id_bits}")]
    BandwidthTooSmall { bandwidth: usize, id_bits: usize },
    #[error("max_rounds must be at least 1")]
    ZeroRounds,
    #[error("node IDs must be distinct and one per vertex")]
    BadIds,
    #[error("node {node} sent {bits} bits to {to} in round {round}, limit {limit}")]
    Bandwidth {
        node: u64,
        to: u64,
        round: u64,
        bits: usize,
        limit: usize,
    },
    #[error("node {node} sent on non-incident port {port} in round {round}")]
    NonIncidentPort { node: u64, port: usize, round: u64 },
    #[error("node {node} sent twice to {to} in round {round}")]
    DuplicateSend { node: u64, to: u64, round: u64 },
    #[error("node {node} faulted in round {round}: {reason}")]
    NodeFault {
        node: u64,
        round: u64,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub rounds_used: u64,
    pub total_messages: u64,
    pub total_bits: u64,
    pub max_bits_edge_round: usize,
    pub halted_all: bool,
    pub trace_hash: u64,
}

#[derive(Debug)]
pub struct RunResult<P> {
    /// Output of each vertex (indexed by vertex, not ID); `None` if it never halted.
    pub outputs: Vec<Option<Message>>,
    pub metrics: RunMetrics,
    /// Final program states, for inspection.
    pub programs: Vec<P>,
    pub trace: Option<Vec<TraceEntry>>,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Private seed of node `id` under `global_seed`.
pub fn node_seed(global_seed: u64, id: u64) -> u64 {
    mix(global_seed ^ mix(id))
}

/// Builder for one simulator run.
pub struct Simulation<'g> {
    g: &'g Graph,
    cfg: SimConfig,
    ids: Option<Vec<u64>>,
    inputs: BTreeMap<String, Message>,
    trace: bool,
}

impl<'g> Simulation<'g> {
    pub fn new(g: &'g Graph, cfg: SimConfig) -> Self {
        Self {
            g,
            cfg,
            ids: None,
            inputs: BTreeMap::new(),
            trace: false,
        }
    }

    /// Replaces the default IDs (vertex `v` has ID `v`).
    pub fn with_ids(mut self, ids: Vec<u64>) -> Self {
        self.ids = Some(ids);
        self
    }

    /// Adds a global input visible to every node.
    pub fn with_input(mut self, key: &str, value: Message) -> Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    /// Records every delivered message.
    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn run<P, F>(self, mut factory: F) -> Result<RunResult<P>, SimError>
    where
        P: NodeProgram,
        F: FnMut(&NodeView) -> P,
    {
        let g = self.g;
        let cfg = &self.cfg;
        let n = g.n();
        if n == 0 {
            return Err(SimError::EmptyGraph);
        }
        if !g.is_connected() {
            return Err(SimError::Disconnected);
        }
        if cfg.max_rounds == 0 {
            return Err(SimError::ZeroRounds);
        }
        let ids = self.ids.unwrap_or_else(|| (0..n as u64).collect());
        let mut sorted_ids = ids.clone();
        sorted_ids.sort_unstable();
        sorted_ids.dedup();
        if ids.len() != n || sorted_ids.len() != n {
            return Err(SimError::BadIds);
        }
        let width = bits_for((n as u64).max(sorted_ids[n - 1]));
        if cfg.bandwidth_bits < width {
            return Err(SimError::BandwidthTooSmall {
                bandwidth: cfg.bandwidth_bits,
                id_bits: width,
            });
        }

        // Ports of v ordered by neighbor ID; CSR layout over all ports.
        let mut offset = vec![0usize; n + 1];
        let mut port_to = Vec::with_capacity(2 * g.m());
        for v in 0..n {
            let mut nb: Vec<usize> = g.neighbors(v).to_vec();
            nb.sort_unstable_by_key(|&w| ids[w]);
            port_to.extend(nb);
            offset[v + 1] = port_to.len();
        }
        // slot_of[off[v]+p]: inbox slot at the receiver for a send on port p of v.
        let mut slot_of = vec![0usize; port_to.len()];
        for v in 0..n {
            for p in offset[v]..offset[v + 1] {
                let w = port_to[p];
                let q = port_to[offset[w]..offset[w + 1]]
                    .binary_search_by_key(&ids[v], |&x| ids[x])
                    .expect("adjacency is symmetric");
                slot_of[p] = offset[w] + q;
            }
        }

        let mut programs: Vec<P> = (0..n)
            .map(|v| {
                let view = NodeView {
                    my_id: ids[v],
                    neighbor_ids: port_to[offset[v]..offset[v + 1]]
                        .iter()
                        .map(|&w| ids[w])
                        .collect(),
                    n,
                    id_bits: width,
                    bandwidth_bits: cfg.bandwidth_bits,
                    extra_inputs: self.inputs.clone(),
                    rng_seed: node_seed(cfg.global_seed, ids[v]),
                };
                factory(&view)
            })
            .collect();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by_key(|&v| ids[v]);

        let mut cur: Vec<Option<Message>> = vec![None; port_to.len()];
        let mut next: Vec<Option<Message>> = vec![None; port_to.len()];
        let mut cur_written: Vec<usize> = Vec::new();
        let mut next_written: Vec<usize> = Vec::new();
        let mut outputs: Vec<Option<Message>> = vec![None; n];
        let mut outbox = Outbox::default();
        let mut hasher = TraceHasher::new();
        let mut trace = self.trace.then(Vec::new);
        let mut metrics = RunMetrics {
            rounds_used: 0,
            total_messages: 0,
            total_bits: 0,
            max_bits_edge_round: 0,
            halted_all: false,
            trace_hash: 0,
        };

        // Event-driven schedule: a node is stepped when mail arrives or when
        // its requested wake-up round comes; nodes are stepped in ID order.
        let mut rank = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        let mut owner = vec![0usize; port_to.len()];
        for v in 0..n {
            owner[offset[v]..offset[v + 1]].fill(v);
        }
        let mut halted = vec![false; n];
        let mut wake = vec![1u64; n];
        let mut stamp = vec![0u64; n];
        let mut live = n;
        let mut due_next: Vec<usize> = (0..n).collect();
        let mut later: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
        let mut batch: Vec<usize> = Vec::with_capacity(n);

        let mut round = 0;
        while live > 0 && round < cfg.max_rounds {
            let next_round = if !cur_written.is_empty() || !due_next.is_empty() {
                round + 1
            } else if let Some(Reverse((r, _))) = later.peek() {
                (*r).max(round + 1)
            } else {
                // Every live node waits for mail that will never come.
                cfg.max_rounds + 1
            };
            if next_round > cfg.max_rounds {
                round = cfg.max_rounds;
                break;
            }
            round = next_round;
            batch.clear();
            for k in due_next.drain(..) {
                let v = order[k];
                if !halted[v] && stamp[v] != round {
                    stamp[v] = round;
                    batch.push(k);
                }
            }
            for &s in &cur_written {
                let v = owner[s];
                if !halted[v] && stamp[v] != round {
                    stamp[v] = round;
                    batch.push(rank[v]);
                }
            }
            while let Some(&Reverse((r, k))) = later.peek() {
                if r > round {
                    break;
                }
                later.pop();
                let v = order[k];
                if r == wake[v] && !halted[v] && stamp[v] != round {
                    stamp[v] = round;
                    batch.push(k);
                }
            }
            batch.sort_unstable();
            for &k in &batch {
                let v = order[k];
                let (lo, hi) = (offset[v], offset[v + 1]);
                outbox.reset(hi - lo);
                let status = programs[v]
                    .step(round, &cur[lo..hi], &mut outbox)
                    .map_err(|f| SimError::NodeFault {
                        node: ids[v],
                        round,
                        reason: f.0,
                    })?;
                if let Some(port) = outbox.bad_port {
                    return Err(SimError::NonIncidentPort {
                        node: ids[v],
                        port,
                        round,
                    });
                }
                if let Some(port) = outbox.duplicate {
                    return Err(SimError::DuplicateSend {
                        node: ids[v],
                        to: ids[port_to[lo + port]],
                        round,
                    });
                }
                outbox.sent.sort_unstable();
                for i in 0..outbox.sent.len() {
                    let p = outbox.sent[i];
                    let Some(msg) = outbox.slots[p].take() else {
                        continue;
                    };
                    let w = port_to[lo + p];
                    if msg.len() > cfg.bandwidth_bits {
                        return Err(SimError::Bandwidth {
                            node: ids[v],
                            to: ids[w],
                            round,
                            bits: msg.len(),
                            limit: cfg.bandwidth_bits,
                        });
                    }
                    metrics.total_messages += 1;
                    metrics.total_bits += msg.len() as u64;
                    metrics.max_bits_edge_round = metrics.max_bits_edge_round.max(msg.len());
                    hasher.absorb(round, ids[v], ids[w], &msg);
                    if let Some(t) = trace.as_mut() {
                        t.push(TraceEntry {
                            round,
                            sender: ids[v],
                            receiver: ids[w],
                            payload: msg.clone(),
                        });
                    }
                    let s = slot_of[lo + p];
                    next[s] = Some(msg);
                    next_written.push(s);
                }
                match status {
                    Status::Running => {
                        let at = outbox.idle_until.unwrap_or(0).max(round + 1);
                        wake[v] = at;
                        if at == round + 1 {
                            due_next.push(k);
                        } else if at != u64::MAX {
                            later.push(Reverse((at, k)));
                        }
                    }
                    Status::Halted(out) => {
                        outputs[v] = Some(out);
                        halted[v] = true;
                        live -= 1;
                    }
                }
            }
            for &s in &cur_written {
                cur[s] = None;
            }
            cur_written.clear();
            std::mem::swap(&mut cur, &mut next);
            std::mem::swap(&mut cur_written, &mut next_written);
        }
        metrics.rounds_used = round;
        metrics.halted_all = live == 0;
        metrics.trace_hash = hasher.finish();
        Ok(RunResult {
            outputs,
            metrics,
            programs,
            trace,
        })
    }
}

/// Runs `factory`'s program at every vertex of `g` under `cfg`.
pub fn run_sync<P, F>(g: &Graph, factory: F, cfg: &SimConfig) -> Result<RunResult<P>, SimError>
where
    P: NodeProgram,
    F: FnMut(&NodeView) -> P,
{
    Simulation::new(g, cfg.clone()).run(factory)
}
