//! Cut-vertex detection by cycle-space sampling.
//!
//! Every non-tree edge gets a random label of `b` bits; a tree edge gets the
//! XOR of the labels of the non-tree edges whose fundamental cycle contains
//! it, computed by a pipelined XOR convergecast. A vertex is a cut vertex
//! exactly when some nonempty proper subset of its incident edges has
//! labels XOR-ing to zero on every sample of the cycle space, which shows up as
//! a rank deficit of the incident label vectors. With `b >= Δ + 64` bits a
//! non-cut vertex is misreported with probability at most `2^-64`.

use rand::RngCore;

use super::super::primitives::{AggOp, Ctx, Fields, SyncAggregate, TreeInfo};
use crate::sim::{Message, NodeFault, Outbox};

const TAG_LABELS: u32 = 1;

type Label = Vec<u64>;

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn get_bit(l: &[u64], i: usize) -> bool {
    l[i / 64] >> (i % 64) & 1 == 1
}

fn chunk(l: &[u64], j: usize, q: usize, b: usize) -> Result<Message, NodeFault> {
    let mut m = Message::new();
    for i in j * q..((j + 1) * q).min(b) {
        m.push_bit(get_bit(l, i));
    }
    Ok(m)
}

fn xor_chunk(l: &mut [u64], m: &Message, j: usize, q: usize) {
    for k in 0..m.len() {
        if m.bit(k) {
            let i = j * q + k;
            l[i / 64] ^= 1 << (i % 64);
        }
    }
}

/// Rank over GF(2) of the given vectors.
pub fn gf2_rank(mut rows: Vec<Label>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| get_bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && get_bit(row, col) {
                for (a, b) in row.iter_mut().zip(&p) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

enum Stage {
    MaxDegree(SyncAggregate<Fields>),
    Exchange { start: u64 },
    Converge { start: u64 },
    MinCut(SyncAggregate<Fields>),
}

/// Finds the minimum-ID cut vertex, known to every node at the end.
pub struct Articulation {
    tree: TreeInfo,
    slack: usize,
    bits: usize,
    chunk_bits: usize,
    chunks: usize,
    /// Label per port: own draws and received labels for non-tree edges,
    /// subtree XORs for child edges, own subtree XOR for the parent edge.
    labels: Vec<Label>,
    subtree: Label,
    stage: Stage,
}

impl Articulation {
    /// `slack` is the number of label bits beyond the maximum degree.
    pub fn new(ctx: &Ctx, start: u64, tree: TreeInfo, slack: usize) -> Self {
        let fields = Fields::single(AggOp::Max, ctx.id_bits, ctx.degree() as u64);
        Self {
            tree,
            slack,
            bits: 0,
            chunk_bits: ctx.bandwidth,
            chunks: 0,
            labels: Vec::new(),
            subtree: Vec::new(),
            stage: Stage::MaxDegree(SyncAggregate::new(start, fields)),
        }
    }

    /// Rounds taken for tree height `h`, maximum degree `max_deg` and
    /// bandwidth `bw`.
    pub fn rounds(h: u64, max_deg: usize, slack: usize, bw: usize) -> u64 {
        let c = (max_deg + slack).div_ceil(bw) as u64;
        (2 * h + 1) + (c + 1) + (h + c) + (2 * h + 1)
    }

    fn is_tree_port(&self, p: usize) -> bool {
        self.tree.parent == Some(p) || self.tree.children.contains(&p)
    }

    fn is_cut_vertex(&self, ctx: &Ctx) -> bool {
        let deg = ctx.degree();
        if deg < 2 {
            return false;
        }
        let mut rows = self.labels.clone();
        if let Some(p) = self.tree.parent {
            rows[p] = self.subtree.clone();
        }
        gf2_rank(rows) < deg - 1
    }

    /// Returns `Some(min cut vertex)` in the final round.
    pub fn step(
        &mut self,
        ctx: &Ctx,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<Option<u64>>, NodeFault> {
        let round = ctx.round;
        match &mut self.stage {
            Stage::MaxDegree(agg) => {
                let Some(v) = agg.step(ctx, &self.tree, inbox, out)? else {
                    return Ok(None);
                };
                self.bits = v.values[0] as usize + self.slack;
                self.chunks = self.bits.div_ceil(self.chunk_bits);
                let w = words(self.bits);
                let mut rng = ctx.rng(TAG_LABELS, 0);
                self.labels = (0..ctx.degree())
                    .map(|p| {
                        let mut l = vec![0u64; w];
                        if !self.is_tree_port(p) && ctx.id < ctx.nbr[p] {
                            for x in &mut l {
                                *x = rng.next_u64();
                            }
                            if !self.bits.is_multiple_of(64) {
                                l[w - 1] &= (1u64 << (self.bits % 64)) - 1;
                            }
                        }
                        l
                    })
                    .collect();
                self.stage = Stage::Exchange { start: round + 1 };
                Ok(None)
            }
            Stage::Exchange { start } => {
                let start = *start;
                let j = (round - start) as usize;
                for (p, m) in inbox.iter().enumerate() {
                    if let Some(m) = m {
                        xor_chunk(&mut self.labels[p], m, j - 1, self.chunk_bits);
                    }
                }
                if j < self.chunks {
                    for p in 0..ctx.degree() {
                        if !self.is_tree_port(p) && ctx.id < ctx.nbr[p] {
                            out.send(p, chunk(&self.labels[p], j, self.chunk_bits, self.bits)?);
                        }
                    }
                }
                if j == self.chunks {
                    let mut x = vec![0u64; words(self.bits)];
                    for p in (0..ctx.degree()).filter(|&p| !self.is_tree_port(p)) {
                        for (a, b) in x.iter_mut().zip(&self.labels[p]) {
                            *a ^= b;
                        }
                    }
                    self.subtree = x;
                    self.stage = Stage::Converge { start: round + 1 };
                }
                Ok(None)
            }
            Stage::Converge { start } => {
                let start = *start;
                let t = round - start;
                let h = self.tree.height;
                let d = self.tree.depth;
                for &c in &self.tree.children {
                    if let Some(m) = &inbox[c] {
                        let j = (t - (h - d)) as usize;
                        xor_chunk(&mut self.labels[c], m, j, self.chunk_bits);
                        xor_chunk(&mut self.subtree, m, j, self.chunk_bits);
                    }
                }
                let first = h - d;
                if let Some(p) = self.tree.parent {
                    if t >= first && t < first + self.chunks as u64 {
                        let j = (t - first) as usize;
                        out.send(p, chunk(&self.subtree, j, self.chunk_bits, self.bits)?);
                    }
                }
                if t + 1 == h + self.chunks as u64 {
                    let cut = self.is_cut_vertex(ctx);
                    let sentinel = 1u64 << ctx.id_bits;
                    let fields = Fields::single(
                        AggOp::Min,
                        ctx.id_bits + 1,
                        if cut { ctx.id } else { sentinel },
                    );
                    self.labels = Vec::new();
                    self.stage = Stage::MinCut(SyncAggregate::new(round + 1, fields));
                } else {
                    let idle = if self.tree.parent.is_some() && t < first {
                        first
                    } else if self.tree.parent.is_some() && t < first + self.chunks as u64 - 1 {
                        t + 1
                    } else {
                        h + self.chunks as u64 - 1
                    };
                    out.idle_until(start + idle.max(t + 1));
                }
                Ok(None)
            }
            Stage::MinCut(agg) => {
                let Some(v) = agg.step(ctx, &self.tree, inbox, out)? else {
                    return Ok(None);
                };
                let min = v.values[0];
                Ok(Some((min < 1u64 << ctx.id_bits).then_some(min)))
            }
        }
    }
}
