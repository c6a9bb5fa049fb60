//! Fixed-schedule convergecast and broadcast over a known tree.

use super::{Ctx, TreeInfo};
use crate::sim::{Message, MessageReader, MessageWriter, NodeFault, Outbox, WireError};
use smallvec::SmallVec;

/// A commutative, associative summary carried up and down a tree.
pub trait AggValue: Clone {
    fn combine(&mut self, other: &Self);
    fn encode(&self, w: &mut MessageWriter) -> Result<(), WireError>;
    /// Decodes a value shaped like `self`.
    fn decode(&self, r: &mut MessageReader<'_>) -> Result<Self, WireError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggOp {
    Min,
    Max,
    Sum,
    /// Number of nodes whose input is nonzero.
    Count,
}

/// A tuple of fixed-width fields, each with its own operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fields {
    pub ops: SmallVec<[(AggOp, usize); 4]>,
    pub values: SmallVec<[u64; 4]>,
}

impl Fields {
    /// `values[i]` is this node's input for field `i`.
    pub fn new(
        ops: impl IntoIterator<Item = (AggOp, usize)>,
        values: impl IntoIterator<Item = u64>,
    ) -> Self {
        let ops: SmallVec<_> = ops.into_iter().collect();
        let values: SmallVec<[u64; 4]> = values.into_iter().collect();
        assert_eq!(ops.len(), values.len());
        let values = ops
            .iter()
            .zip(values)
            .map(|(&(op, _), v)| {
                if op == AggOp::Count {
                    (v != 0) as u64
                } else {
                    v
                }
            })
            .collect();
        Self { ops, values }
    }

    pub fn single(op: AggOp, width: usize, value: u64) -> Self {
        Self::new([(op, width)], [value])
    }
}

impl AggValue for Fields {
    fn combine(&mut self, other: &Self) {
        for (i, &(op, _)) in self.ops.iter().enumerate() {
            let (a, b) = (self.values[i], other.values[i]);
            self.values[i] = match op {
                AggOp::Min => a.min(b),
                AggOp::Max => a.max(b),
                AggOp::Sum | AggOp::Count => a.saturating_add(b),
            };
        }
    }

    fn encode(&self, w: &mut MessageWriter) -> Result<(), WireError> {
        for (&(_, width), &v) in self.ops.iter().zip(&self.values) {
            w.counter(v, width)?;
        }
        Ok(())
    }

    fn decode(&self, r: &mut MessageReader<'_>) -> Result<Self, WireError> {
        let values = self
            .ops
            .iter()
            .map(|&(_, width)| r.bits(width))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            ops: self.ops.clone(),
            values,
        })
    }
}

/// The two smallest distinct `(key, id)` pairs; `key` has `key_bits` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoMin {
    pub key_bits: usize,
    pub id_bits: usize,
    pub best: SmallVec<[(u64, u64); 4]>,
}

impl TwoMin {
    pub fn new(key_bits: usize, id_bits: usize, own: Option<(u64, u64)>) -> Self {
        Self {
            key_bits,
            id_bits,
            best: own.into_iter().collect(),
        }
    }
}

impl AggValue for TwoMin {
    fn combine(&mut self, other: &Self) {
        self.best.extend_from_slice(&other.best);
        self.best.sort_unstable();
        self.best.dedup();
        self.best.truncate(2);
    }

    fn encode(&self, w: &mut MessageWriter) -> Result<(), WireError> {
        w.counter(self.best.len() as u64, 2)?;
        for &(key, id) in &self.best {
            w.counter(key, self.key_bits)?.counter(id, self.id_bits)?;
        }
        Ok(())
    }

    fn decode(&self, r: &mut MessageReader<'_>) -> Result<Self, WireError> {
        let len = r.bits(2)?;
        let mut best = SmallVec::new();
        for _ in 0..len {
            best.push((r.bits(self.key_bits)?, r.bits(self.id_bits)?));
        }
        Ok(Self {
            key_bits: self.key_bits,
            id_bits: self.id_bits,
            best,
        })
    }
}

/// Convergecast to the root followed by a broadcast of the result; takes
/// exactly `2H + 1` rounds for tree height `H`. A node at depth `d` sends up
/// in local round `H - d` and hears the result in local round `H + d`.
pub struct SyncAggregate<V: AggValue> {
    start: u64,
    acc: V,
    sent_up: bool,
    result: Option<V>,
}

impl<V: AggValue> SyncAggregate<V> {
    pub fn new(start: u64, input: V) -> Self {
        Self {
            start,
            acc: input,
            sent_up: false,
            result: None,
        }
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        tree: &TreeInfo,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<V>, NodeFault> {
        let t = ctx.round - self.start;
        let h = tree.height;
        let up_at = h - tree.depth;
        let tree_ports = tree.parent.iter().chain(&tree.children);
        for &p in tree_ports {
            let Some(m) = &inbox[p] else { continue };
            let v = self.acc.decode(&mut m.reader())?;
            if Some(p) == tree.parent {
                self.result = Some(v);
            } else if !self.sent_up {
                self.acc.combine(&v);
            } else {
                return Err(NodeFault(format!("late convergecast message on port {p}")));
            }
        }
        if t == up_at && !self.sent_up {
            self.sent_up = true;
            if let Some(parent) = tree.parent {
                let mut w = ctx.writer();
                self.acc.encode(&mut w)?;
                out.send(parent, w.finish());
            } else {
                self.result = Some(self.acc.clone());
            }
        }
        if self.sent_up && t == h + tree.depth {
            let Some(result) = &self.result else {
                return Err(NodeFault("aggregate result did not arrive".into()));
            };
            if !tree.children.is_empty() {
                let mut w = ctx.writer();
                result.encode(&mut w)?;
                let msg = w.finish();
                for &c in &tree.children {
                    out.send(c, msg.clone());
                }
            }
        }
        if t >= 2 * h {
            return self
                .result
                .take()
                .map(Some)
                .ok_or_else(|| NodeFault("aggregate result did not arrive".into()));
        }
        let next = if !self.sent_up { up_at } else { 2 * h };
        out.idle_until(self.start + next.max(t + 1));
        Ok(None)
    }
}

/// The root's value reaches depth `d` in local round `d`; all nodes finish
/// in local round `H`.
pub struct TreeBroadcast<V: AggValue> {
    start: u64,
    value: Option<V>,
    shape: V,
}

impl<V: AggValue> TreeBroadcast<V> {
    /// `value` is used at the root; elsewhere it only fixes the encoding shape.
    pub fn new(start: u64, value: V) -> Self {
        Self {
            start,
            value: None,
            shape: value,
        }
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        tree: &TreeInfo,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<V>, NodeFault> {
        let t = ctx.round - self.start;
        if t == 0 && tree.parent.is_none() {
            self.value = Some(self.shape.clone());
        }
        if let Some(Some(m)) = tree.parent.map(|p| &inbox[p]) {
            self.value = Some(self.shape.decode(&mut m.reader())?);
        }
        if t == tree.depth {
            let Some(v) = &self.value else {
                return Err(NodeFault("broadcast value did not arrive".into()));
            };
            if !tree.children.is_empty() && t < tree.height {
                let mut w = ctx.writer();
                v.encode(&mut w)?;
                let msg = w.finish();
                for &c in &tree.children {
                    out.send(c, msg.clone());
                }
            }
        }
        if t >= tree.height {
            return self
                .value
                .take()
                .map(Some)
                .ok_or_else(|| NodeFault("broadcast value did not arrive".into()));
        }
        out.idle_until(
            self.start
                + if t < tree.depth {
                    tree.depth
                } else {
                    tree.height
                },
        );
        Ok(None)
    }
}
