//! One ball trial: sampled centers grow disjoint radius-`ρ` balls and each
//! ball runs a flow from its center to its outermost layer.
//!
//! A candidate becomes an active center when its random priority is the
//! smallest among candidates within `2ρ` hops, so active balls are disjoint.
//! A separator between a center and the outermost layer of its ball also
//! separates the center from everything at that distance or farther.

use rand::Rng;

use super::flow::{FlowInstance, FlowOutcome, Role};
use crate::primitives::{AggOp, Ctx, Fields, SyncAggregate, TreeInfo};
use crate::sim::{Message, NodeFault, Outbox};

const TAG_BALL: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallFound {
    pub f: usize,
    pub center: u64,
    /// This node belongs to the chosen separator.
    pub member: bool,
}

// One stage per instance; boxing the large variant would only add allocations.
#[allow(clippy::large_enum_variant)]
enum Stage {
    Flood {
        start: u64,
    },
    Join {
        start: u64,
    },
    Notify {
        start: u64,
    },
    Depth {
        start: u64,
        agg: Option<SyncAggregate<Fields>>,
    },
    Flow {
        start: u64,
        flow: Option<FlowInstance>,
    },
    Collect(SyncAggregate<Fields>),
}

pub struct BallTrial {
    rho: u64,
    kappa: usize,
    window_cap: u64,
    global: TreeInfo,
    priority: Option<(u64, u64)>,
    best: Option<(u64, u64)>,
    improved: bool,
    active: bool,
    center: Option<u64>,
    dist: u64,
    parent: Option<usize>,
    ports: Vec<bool>,
    children: Vec<usize>,
    outcome: Option<FlowOutcome>,
    stage: Stage,
}

impl BallTrial {
    /// `draw` indexes the random priority stream; `candidate` says whether
    /// this node may become a center.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ctx: &Ctx,
        start: u64,
        rho: u64,
        kappa: usize,
        window_cap: u64,
        global: TreeInfo,
        candidate: bool,
        draw: u64,
    ) -> Self {
        let priority = candidate.then(|| {
            let key = ctx.rng(TAG_BALL, draw).gen::<u64>() & mask(2 * ctx.id_bits);
            (key, ctx.id)
        });
        Self {
            rho,
            kappa,
            window_cap,
            global,
            priority,
            best: priority,
            improved: candidate,
            active: false,
            center: None,
            dist: 0,
            parent: None,
            ports: vec![false; ctx.degree()],
            children: Vec::new(),
            outcome: None,
            stage: Stage::Flood { start },
        }
    }

    /// Rounds of flooding, joining, notification and the depth aggregate.
    fn setup_rounds(rho: u64) -> u64 {
        (2 * rho + 1) + (rho + 1) + 2 + (2 * rho + 1)
    }

    pub fn flow_rounds(rho: u64, kappa: usize, window_cap: u64) -> u64 {
        FlowInstance::max_rounds(rho, kappa, window_cap)
    }

    /// Total length of one trial on a global tree of height `e`.
    pub fn rounds(rho: u64, kappa: usize, window_cap: u64, e: u64) -> u64 {
        Self::setup_rounds(rho) + Self::flow_rounds(rho, kappa, window_cap) + 2 * e + 1
    }

    fn member(&self) -> bool {
        self.center.is_some()
    }

    /// Returns `Some(found)` in the final round; `found` is the same at all
    /// nodes apart from the `member` flag.
    pub fn step(
        &mut self,
        ctx: &Ctx,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<Option<BallFound>>, NodeFault> {
        let round = ctx.round;
        let w = ctx.id_bits;
        let rho = self.rho;
        match &mut self.stage {
            Stage::Flood { start } => {
                let start = *start;
                let t = round - start;
                for m in inbox.iter().flatten() {
                    let mut r = m.reader();
                    let cand = (r.bits(2 * w)?, r.bits(w)?);
                    if self.best.is_none_or(|b| cand < b) {
                        self.best = Some(cand);
                        self.improved = true;
                    }
                }
                if t < 2 * rho {
                    if self.improved {
                        self.improved = false;
                        let (key, id) = self.best.unwrap();
                        let mut wr = ctx.writer();
                        wr.counter(key, 2 * w)?.id(id)?;
                        out.send_all(&wr.finish());
                    }
                    out.idle_until(start + 2 * rho);
                } else {
                    self.active = self.priority.is_some() && self.best == self.priority;
                    self.stage = Stage::Join { start: round + 1 };
                }
                Ok(None)
            }
            Stage::Join { start } => {
                let start = *start;
                let t = round - start;
                if t == 0 && self.active {
                    self.center = Some(ctx.id);
                }
                if self.center.is_none() {
                    if let Some((p, m)) = inbox
                        .iter()
                        .enumerate()
                        .find_map(|(p, m)| m.as_ref().map(|m| (p, m)))
                    {
                        self.center = Some(m.reader().bits(w)?);
                        self.dist = t;
                        self.parent = Some(p);
                    }
                }
                if self.member() && self.dist == t && t < rho {
                    let mut wr = ctx.writer();
                    wr.id(self.center.unwrap())?;
                    let msg = wr.finish();
                    for p in 0..ctx.degree() {
                        if Some(p) != self.parent {
                            out.send(p, msg.clone());
                        }
                    }
                }
                if t == rho {
                    self.stage = Stage::Notify { start: round + 1 };
                } else {
                    out.idle_until(start + rho);
                }
                Ok(None)
            }
            Stage::Notify { start } => {
                let start = *start;
                if round == start {
                    if let Some(c) = self.center {
                        for p in 0..ctx.degree() {
                            let mut wr = ctx.writer();
                            wr.id(c)?.flag(Some(p) == self.parent);
                            out.send(p, wr.finish());
                        }
                    }
                    return Ok(None);
                }
                if let Some(c) = self.center {
                    for (p, m) in inbox.iter().enumerate() {
                        let Some(m) = m else { continue };
                        let mut r = m.reader();
                        if r.bits(w)? == c {
                            self.ports[p] = true;
                            if r.flag()? {
                                self.children.push(p);
                            }
                        }
                    }
                }
                let agg = self.member().then(|| {
                    SyncAggregate::new(round + 1, Fields::single(AggOp::Max, w, self.dist))
                });
                self.stage = Stage::Depth {
                    start: round + 1,
                    agg,
                };
                Ok(None)
            }
            Stage::Depth { start, agg } => {
                let start = *start;
                let end = start + 2 * rho;
                let Some(agg) = agg else {
                    if round >= end {
                        self.stage = Stage::Flow {
                            start: round + 1,
                            flow: None,
                        };
                    } else {
                        out.idle_until(end);
                    }
                    return Ok(None);
                };
                let tree = TreeInfo {
                    root: self.center.unwrap(),
                    parent: self.parent,
                    children: self.children.clone(),
                    depth: self.dist,
                    height: rho,
                };
                let Some(v) = agg.step(ctx, &tree, inbox, out)? else {
                    return Ok(None);
                };
                let sink_depth = v.values[0].min(rho);
                let role = if self.dist == 0 {
                    Role::Source
                } else if self.dist == sink_depth {
                    Role::Sink
                } else {
                    Role::Inner
                };
                let flow = FlowInstance::new(
                    round + 1,
                    role,
                    std::mem::take(&mut self.ports),
                    tree,
                    self.kappa,
                    self.window_cap,
                    false,
                );
                self.stage = Stage::Flow {
                    start: round + 1,
                    flow: Some(flow),
                };
                Ok(None)
            }
            Stage::Flow { start, flow } => {
                let end = *start + Self::flow_rounds(rho, self.kappa, self.window_cap) - 1;
                if let Some(f) = flow {
                    if let Some(o) = f.step(ctx, inbox, out)? {
                        self.outcome = Some(o);
                        *flow = None;
                    }
                }
                let running = flow.is_some();
                if round < end {
                    if !running {
                        out.idle_until(end);
                    }
                    return Ok(None);
                }
                if running {
                    return Err(NodeFault("ball flow overran its schedule".into()));
                }
                let width = 16 + w;
                let key = match self.outcome {
                    Some(FlowOutcome::Cut { f, .. }) if self.dist == 0 && self.member() => {
                        ((f as u64) << w) | ctx.id
                    }
                    _ => mask(width),
                };
                self.stage = Stage::Collect(SyncAggregate::new(
                    round + 1,
                    Fields::single(AggOp::Min, width, key),
                ));
                Ok(None)
            }
            Stage::Collect(agg) => {
                let Some(v) = agg.step(ctx, &self.global, inbox, out)? else {
                    return Ok(None);
                };
                let key = v.values[0];
                if key == mask(16 + w) {
                    return Ok(Some(None));
                }
                let center = key & mask(w);
                let member = self.center == Some(center)
                    && matches!(self.outcome, Some(FlowOutcome::Cut { member: true, .. }));
                Ok(Some(Some(BallFound {
                    f: (key >> w) as usize,
                    center,
                    member,
                })))
            }
        }
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
