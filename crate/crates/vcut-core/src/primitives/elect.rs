//! Flood-with-echo leader election and BFS tree construction.
//!
//! Every candidate floods `(root, dist)`; a node adopts the smallest root it
//! has heard of, at the distance of the first flood carrying it. Each node
//! answers every flood of its current root with a reply saying whether the
//! sender became its parent, and echoes `(subtree size, height)` upward once
//! all replies and child echoes are in. A root whose echo count reaches `n`
//! is the minimum ID; it then broadcasts a countdown so that all nodes finish
//! together. Floods always take precedence on a link, so the tree of the
//! winning root is an exact BFS tree.

use std::collections::VecDeque;

use super::{Ctx, TreeInfo};
use crate::sim::{Message, NodeFault, Outbox, WireError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectMode {
    /// Every node is a candidate; the minimum ID wins.
    AllCandidates,
    /// Only the given ID floods (BFS from a known root).
    SingleRoot(u64),
}

#[derive(Debug, Clone, Copy)]
enum Part {
    Reply { root: u64, child: bool },
    Echo { root: u64, count: u64, height: u64 },
}

impl Part {
    fn root(&self) -> u64 {
        match *self {
            Part::Reply { root, .. } | Part::Echo { root, .. } => root,
        }
    }
}

const TAG_NONE: u64 = 0;
const TAG_REPLY: u64 = 1;
const TAG_ECHO: u64 = 2;
const TAG_START: u64 = 3;

pub struct Elect {
    start: u64,
    halt_after_echo: bool,
    root: Option<u64>,
    dist: u64,
    parent: Option<usize>,
    flood_pending: bool,
    queues: Vec<VecDeque<Part>>,
    awaiting: usize,
    children: Vec<usize>,
    echoes_pending: usize,
    count: u64,
    sub_height: u64,
    echoed: bool,
    start_send: Option<u64>,
    height: u64,
    finish: Option<u64>,
    complete: bool,
}

impl Elect {
    pub fn new(ctx: &Ctx, start: u64, mode: ElectMode) -> Self {
        let candidate = match mode {
            ElectMode::AllCandidates => true,
            ElectMode::SingleRoot(r) => r == ctx.id,
        };
        Self {
            start,
            halt_after_echo: false,
            root: candidate.then_some(ctx.id),
            dist: 0,
            parent: None,
            flood_pending: candidate,
            queues: vec![VecDeque::new(); ctx.degree()],
            awaiting: ctx.degree(),
            children: Vec::new(),
            echoes_pending: 0,
            count: 0,
            sub_height: 0,
            echoed: false,
            start_send: None,
            height: 0,
            finish: None,
            complete: false,
        }
    }

    /// Finish as soon as this node's echo is out (or, at the root, once the
    /// echo completes) instead of waiting for the synchronized countdown.
    pub fn halting_after_echo(mut self) -> Self {
        self.halt_after_echo = true;
        self
    }

    fn adopt(&mut self, ctx: &Ctx, root: u64, dist: u64, parent: usize) {
        self.root = Some(root);
        self.dist = dist;
        self.parent = Some(parent);
        self.flood_pending = true;
        self.awaiting = ctx.degree() - 1;
        self.children.clear();
        self.echoes_pending = 0;
        self.count = 0;
        self.sub_height = 0;
        self.echoed = false;
        self.queues[parent].push_back(Part::Reply { root, child: true });
    }

    fn info(&self) -> TreeInfo {
        TreeInfo {
            root: self.root.expect("finished nodes have a root"),
            parent: self.parent,
            children: self.children.clone(),
            depth: self.dist,
            height: self.height,
        }
    }

    fn has_pending(&self) -> bool {
        self.flood_pending
            || self
                .queues
                .iter()
                .any(|q| q.iter().any(|p| Some(p.root()) == self.root))
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<TreeInfo>, NodeFault> {
        let t = ctx.round - self.start;
        let w = ctx.id_bits;

        // Floods first: find the best offer this round.
        let mut floods: Vec<(usize, u64, u64)> = Vec::new();
        let mut parts: Vec<(usize, u64, Message)> = Vec::new();
        for (p, m) in inbox.iter().enumerate() {
            let Some(m) = m else { continue };
            let mut r = m.reader();
            if r.flag()? {
                let root = r.bits(w)?;
                let dist = r.bits(w)?;
                floods.push((p, root, dist));
            }
            let tag = r.bits(2)?;
            if tag != TAG_NONE {
                parts.push((p, tag, m.clone()));
            }
        }
        if let Some(&(p, root, dist)) = floods.iter().min_by_key(|&&(p, r, d)| (r, d, p)) {
            if self.root.is_none_or(|mine| root < mine) {
                self.adopt(ctx, root, dist + 1, p);
            }
        }
        for &(p, root, _) in &floods {
            if Some(root) == self.root && Some(p) != self.parent {
                self.queues[p].push_back(Part::Reply { root, child: false });
            }
        }

        for (p, tag, m) in parts {
            let mut r = m.reader();
            if r.flag()? {
                r.bits(2 * w)?;
            }
            r.bits(2)?;
            match tag {
                TAG_REPLY => {
                    let root = r.bits(w)?;
                    let child = r.flag()?;
                    if Some(root) == self.root && !self.echoed {
                        self.awaiting = self.awaiting.saturating_sub(1);
                        if child {
                            self.children.push(p);
                            self.echoes_pending += 1;
                        }
                    }
                }
                TAG_ECHO => {
                    let root = r.bits(w)?;
                    let count = r.bits(w)?;
                    let height = r.bits(w)?;
                    if Some(root) == self.root && !self.echoed {
                        self.echoes_pending -= 1;
                        self.count += count;
                        self.sub_height = self.sub_height.max(height);
                    }
                }
                _ => {
                    let countdown = r.bits(w)?;
                    self.height = r.bits(w)?;
                    self.finish = Some(t + countdown);
                    if countdown > 1 {
                        self.start_send = Some(countdown - 1);
                    }
                }
            }
        }

        if !self.echoed && self.awaiting == 0 && self.echoes_pending == 0 {
            if let Some(root) = self.root {
                self.echoed = true;
                self.children.sort_unstable();
                let total = self.count + 1;
                match self.parent {
                    Some(parent) => self.queues[parent].push_back(Part::Echo {
                        root,
                        count: total,
                        height: self.sub_height + 1,
                    }),
                    None => {
                        if total != ctx.n as u64 {
                            return Err(NodeFault(format!(
                                "echo of root {root} counted {total} of {} nodes",
                                ctx.n
                            )));
                        }
                        self.complete = true;
                        self.height = self.sub_height;
                        self.finish = Some(t + self.height + 1);
                        if self.height > 0 {
                            self.start_send = Some(self.height);
                        }
                    }
                }
            }
        }

        // Compose at most one message per port.
        for p in 0..ctx.degree() {
            let flood = self.flood_pending && Some(p) != self.parent;
            let start = self
                .start_send
                .filter(|_| self.children.binary_search(&p).is_ok())
                .map(|c| (c, self.height));
            let part = if start.is_some() {
                None
            } else {
                loop {
                    match self.queues[p].pop_front() {
                        Some(part) if Some(part.root()) == self.root => break Some(part),
                        Some(_) => continue,
                        None => break None,
                    }
                }
            };
            if !flood && start.is_none() && part.is_none() {
                continue;
            }
            let mut m = ctx.writer();
            m.flag(flood);
            if flood {
                m.id(self.root.unwrap())?.counter(self.dist, w)?;
            }
            encode_part(&mut m, start, part, w)?;
            out.send(p, m.finish());
        }
        self.flood_pending = false;
        self.start_send = None;

        if self.halt_after_echo && self.echoed && !self.has_pending() {
            if self.parent.is_none() {
                self.height = self.sub_height;
            }
            return Ok(Some(self.info()));
        }
        if self.finish == Some(t) {
            return Ok(Some(self.info()));
        }
        if !self.has_pending() {
            out.idle_until(self.finish.map_or(u64::MAX, |f| self.start + f));
        }
        Ok(None)
    }

    /// True at the winning root once its echo has completed.
    pub fn is_leader(&self) -> bool {
        self.complete
    }
}

fn encode_part(
    m: &mut crate::sim::MessageWriter,
    start: Option<(u64, u64)>,
    part: Option<Part>,
    w: usize,
) -> Result<(), WireError> {
    match (start, part) {
        (Some((countdown, height)), _) => {
            m.counter(TAG_START, 2)?
                .counter(countdown, w)?
                .counter(height, w)?;
        }
        (None, Some(Part::Reply { root, child })) => {
            m.counter(TAG_REPLY, 2)?.id(root)?.flag(child);
        }
        (
            None,
            Some(Part::Echo {
                root,
                count,
                height,
            }),
        ) => {
            m.counter(TAG_ECHO, 2)?
                .id(root)?
                .counter(count, w)?
                .counter(height, w)?;
        }
        (None, None) => {
            m.counter(TAG_NONE, 2)?;
        }
    }
    Ok(())
}
