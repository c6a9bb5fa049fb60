//! Pipelined collection and dissemination of short item lists over a tree.

use std::collections::VecDeque;

use super::{Ctx, TreeInfo};
use crate::sim::{Message, NodeFault, Outbox};

/// Collects the union of all nodes' items at the root, one item per link per
/// round, smallest first. With at most `k` distinct items overall every node
/// finishes in local round `H + k + 1`.
pub struct Upcast {
    start: u64,
    width: usize,
    k: u64,
    own: VecDeque<u64>,
    buffers: Vec<(usize, VecDeque<u64>, bool)>,
    last: Option<u64>,
    sent: u64,
    done: bool,
    collected: Vec<u64>,
}

impl Upcast {
    pub fn new(start: u64, tree: &TreeInfo, width: usize, k: usize, mut items: Vec<u64>) -> Self {
        items.sort_unstable();
        items.dedup();
        Self {
            start,
            width,
            k: k as u64,
            own: items.into(),
            buffers: tree
                .children
                .iter()
                .map(|&c| (c, VecDeque::new(), false))
                .collect(),
            last: None,
            sent: 0,
            done: false,
            collected: Vec::new(),
        }
    }

    pub fn rounds(tree: &TreeInfo, k: usize) -> u64 {
        tree.height + k as u64 + 2
    }

    /// Removes and returns the smallest pending item once it is certain that
    /// no smaller one can still arrive.
    fn next_item(&mut self) -> Option<Option<u64>> {
        if self
            .buffers
            .iter()
            .any(|(_, q, done)| q.is_empty() && !done)
        {
            return None;
        }
        let min = self
            .buffers
            .iter()
            .filter_map(|(_, q, _)| q.front().copied())
            .chain(self.own.front().copied())
            .min();
        let Some(x) = min else { return Some(None) };
        if self.own.front() == Some(&x) {
            self.own.pop_front();
        }
        for (_, q, _) in &mut self.buffers {
            if q.front() == Some(&x) {
                q.pop_front();
            }
        }
        Some(Some(x))
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        tree: &TreeInfo,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<Vec<u64>>, NodeFault> {
        let t = ctx.round - self.start;
        for (c, q, done) in &mut self.buffers {
            if let Some(m) = &inbox[*c] {
                let mut r = m.reader();
                if r.flag()? {
                    *done = true;
                } else {
                    q.push_back(r.bits(self.width)?);
                }
            }
        }
        if tree.parent.is_none() {
            while let Some(item) = self.next_item() {
                match item {
                    Some(x) => self.collected.push(x),
                    None => {
                        self.done = true;
                        break;
                    }
                }
            }
        } else if let Some(parent) = tree.parent.filter(|_| !self.done) {
            loop {
                match self.next_item() {
                    Some(Some(x)) if self.last == Some(x) => continue,
                    Some(Some(x)) => {
                        self.last = Some(x);
                        self.sent += 1;
                        if self.sent > self.k {
                            return Err(NodeFault(format!("upcast exceeded {} items", self.k)));
                        }
                        let mut w = ctx.writer();
                        w.flag(false).counter(x, self.width)?;
                        out.send(parent, w.finish());
                    }
                    Some(None) => {
                        self.done = true;
                        let mut w = ctx.writer();
                        w.flag(true);
                        out.send(parent, w.finish());
                    }
                    None => {}
                }
                break;
            }
        }
        if t + 1 >= Self::rounds(tree, self.k as usize) {
            if tree.parent.is_none() && !self.done {
                return Err(NodeFault("upcast did not complete in time".into()));
            }
            return Ok(Some(std::mem::take(&mut self.collected)));
        }
        let busy = !self.done && tree.parent.is_some() && self.next_ready();
        if !busy {
            out.idle_until(self.start + Self::rounds(tree, self.k as usize) - 1);
        }
        Ok(None)
    }

    fn next_ready(&self) -> bool {
        !self
            .buffers
            .iter()
            .any(|(_, q, done)| q.is_empty() && !done)
    }
}

/// Streams the root's list down the tree, one item per round, followed by an
/// end marker. Every node finishes in local round `H + k + 1`.
pub struct ListBroadcast {
    start: u64,
    width: usize,
    k: u64,
    pending: VecDeque<u64>,
    end_pending: bool,
    received: Vec<u64>,
    complete: bool,
}

impl ListBroadcast {
    /// `items` matters only at the root.
    pub fn new(start: u64, tree: &TreeInfo, width: usize, k: usize, items: Vec<u64>) -> Self {
        let root = tree.parent.is_none();
        Self {
            start,
            width,
            k: k as u64,
            pending: if root {
                items.clone().into()
            } else {
                VecDeque::new()
            },
            end_pending: root,
            received: if root { items } else { Vec::new() },
            complete: root,
        }
    }

    pub fn rounds(tree: &TreeInfo, k: usize) -> u64 {
        tree.height + k as u64 + 2
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        tree: &TreeInfo,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<Vec<u64>>, NodeFault> {
        let t = ctx.round - self.start;
        if tree.parent.is_none() && self.received.len() as u64 > self.k {
            return Err(NodeFault(format!("list longer than {}", self.k)));
        }
        if let Some(Some(m)) = tree.parent.map(|p| &inbox[p]) {
            let mut r = m.reader();
            if r.flag()? {
                self.complete = true;
                self.end_pending = true;
            } else {
                let x = r.bits(self.width)?;
                self.received.push(x);
                self.pending.push_back(x);
            }
        }
        if !tree.children.is_empty() {
            let mut w = ctx.writer();
            if let Some(x) = self.pending.pop_front() {
                w.flag(false).counter(x, self.width)?;
            } else if self.end_pending {
                self.end_pending = false;
                w.flag(true);
            }
            if !w.is_empty() {
                let msg = w.finish();
                for &c in &tree.children {
                    out.send(c, msg.clone());
                }
            }
        } else {
            self.pending.clear();
            self.end_pending = false;
        }
        if t + 1 >= Self::rounds(tree, self.k as usize) {
            if !self.complete {
                return Err(NodeFault("list broadcast did not complete in time".into()));
            }
            return Ok(Some(std::mem::take(&mut self.received)));
        }
        if self.pending.is_empty() && !self.end_pending {
            out.idle_until(self.start + Self::rounds(tree, self.k as usize) - 1);
        }
        Ok(None)
    }
}
