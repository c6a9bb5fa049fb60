//! Distributed augmenting-path search in the vertex-split residual network.
//!
//! Each vertex `v` is split into `v_in -> v_out` with capacity one, edges become
//! `u_out -> v_in` with unbounded capacity. A vertex knows the residual arcs
//! around its two copies from its `pred` and `succ` ports alone, so a BFS can
//! be run by flooding two kinds of reach signals:
//!
//! * `OUT_REACH`: "my out copy is reached", sent along every instance port;
//! * `IN_REVERSE`: "my in copy is reached", sent to `pred` only (reverse of the
//!   flow arc that enters the vertex).
//!
//! The search runs in windows of `2H + 2` rounds, each followed by a decision
//! aggregate over the coordination tree of height `H`. When a sink was hit the
//! path is traced back hop by hop and the flow is updated in place.

use super::super::primitives::{AggOp, Ctx, Fields, SyncAggregate, TreeInfo};
use crate::sim::{Message, NodeFault, Outbox};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Source,
    Sink,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowOutcome {
    /// The flow reached its final value `f` in `1..=κ`; `member` is set at the
    /// vertices of the minimum separator.
    Cut { f: usize, member: bool },
    /// More than κ vertex-disjoint paths exist.
    Saturated,
    /// No sink is reachable at all.
    Empty,
    /// The source is adjacent to a sink.
    Aborted,
    /// The window cap was hit before the search settled.
    Abandoned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Par {
    None,
    Port(usize),
    Internal,
    Rev(usize),
    Start,
}

// One stage per instance; boxing the large variant would only add allocations.
#[allow(clippy::large_enum_variant)]
enum Stage {
    Window { start: u64 },
    Decide(SyncAggregate<Fields>),
    Trace { start: u64, len: u64 },
}

const KIND_REACH: u64 = 0;
const KIND_FWD: u64 = 1;
const KIND_REV: u64 = 2;

pub struct FlowInstance {
    role: Role,
    ports: Vec<bool>,
    tree: TreeInfo,
    kappa: usize,
    window_cap: u64,
    abort: bool,
    pred: Option<usize>,
    succ: Option<usize>,
    in_reached: bool,
    out_reached: bool,
    in_par: Par,
    out_par: Par,
    send_out: bool,
    send_rev: bool,
    hit_port: Option<usize>,
    growth: bool,
    f: usize,
    windows: u64,
    stage: Stage,
}

impl FlowInstance {
    /// `ports[p]` marks the neighbors taking part; `tree` must only use such
    /// ports. `abort` is raised by a source that sees a sink among its
    /// neighbors.
    pub fn new(
        start: u64,
        role: Role,
        ports: Vec<bool>,
        tree: TreeInfo,
        kappa: usize,
        window_cap: u64,
        abort: bool,
    ) -> Self {
        let mut s = Self {
            role,
            ports,
            tree,
            kappa,
            window_cap,
            abort,
            pred: None,
            succ: None,
            in_reached: false,
            out_reached: false,
            in_par: Par::None,
            out_par: Par::None,
            send_out: false,
            send_rev: false,
            hit_port: None,
            growth: false,
            f: 0,
            windows: 0,
            stage: Stage::Window { start },
        };
        s.reset_search();
        s
    }

    pub fn window_len(height: u64) -> u64 {
        2 * height + 2
    }

    /// Upper bound on the rounds one instance can take.
    pub fn max_rounds(height: u64, kappa: usize, window_cap: u64) -> u64 {
        let w = Self::window_len(height);
        let per_aug = window_cap * (w + 2 * height + 1) + window_cap * w + 1;
        (kappa as u64 + 1) * per_aug
    }

    pub fn flow_value(&self) -> usize {
        self.f
    }

    fn reset_search(&mut self) {
        self.in_reached = false;
        self.out_reached = false;
        self.in_par = Par::None;
        self.out_par = Par::None;
        self.send_out = false;
        self.send_rev = false;
        self.hit_port = None;
        self.growth = false;
        self.windows = 0;
        if self.role == Role::Source {
            self.out_reached = true;
            self.out_par = Par::Start;
            self.send_out = true;
            self.growth = true;
        }
    }

    fn on_out_reach(&mut self, p: usize) {
        match self.role {
            Role::Source => {}
            Role::Sink => {
                if self.hit_port.is_none() {
                    self.hit_port = Some(p);
                    self.growth = true;
                }
            }
            Role::Inner => {
                if !self.in_reached {
                    self.in_reached = true;
                    self.in_par = Par::Port(p);
                    self.growth = true;
                    if self.pred.is_none() {
                        if !self.out_reached {
                            self.out_reached = true;
                            self.out_par = Par::Internal;
                            self.send_out = true;
                        }
                    } else {
                        self.send_rev = true;
                    }
                }
            }
        }
    }

    fn on_in_reverse(&mut self, p: usize) -> Result<(), NodeFault> {
        if self.role != Role::Inner {
            return Ok(());
        }
        if self.succ != Some(p) {
            return Err(NodeFault(format!(
                "reverse reach from non-successor port {p}"
            )));
        }
        if !self.out_reached {
            self.out_reached = true;
            self.out_par = Par::Rev(p);
            self.growth = true;
            self.send_out = true;
            if !self.in_reached {
                self.in_reached = true;
                self.in_par = Par::Internal;
                self.send_rev = true;
            }
        }
        Ok(())
    }

    fn flush(&mut self, ctx: &Ctx, out: &mut Outbox) -> Result<(), NodeFault> {
        if !self.send_out && !self.send_rev {
            return Ok(());
        }
        for p in 0..self.ports.len() {
            let rev = self.send_rev && self.pred == Some(p);
            let fwd = self.send_out && self.ports[p];
            if rev || fwd {
                let mut w = ctx.writer();
                w.counter(KIND_REACH, 2)?.flag(fwd).flag(rev);
                out.send(p, w.finish());
            }
        }
        self.send_out = false;
        self.send_rev = false;
        Ok(())
    }

    fn trace_msg(ctx: &Ctx, kind: u64) -> Result<Message, NodeFault> {
        let mut w = ctx.writer();
        w.counter(kind, 2)?;
        Ok(w.finish())
    }

    /// Continues the trace at this vertex's out copy (`at_out`) or in copy.
    fn continue_trace(
        &mut self,
        ctx: &Ctx,
        out: &mut Outbox,
        mut at_out: bool,
    ) -> Result<(), NodeFault> {
        loop {
            if at_out {
                match self.out_par {
                    Par::Internal => at_out = false,
                    Par::Rev(q) => {
                        if self.succ == Some(q) {
                            self.succ = None;
                        }
                        out.send(q, Self::trace_msg(ctx, KIND_REV)?);
                        return Ok(());
                    }
                    Par::Start => return Ok(()),
                    _ => return Err(NodeFault("trace reached an unreached out copy".into())),
                }
            } else {
                match self.in_par {
                    Par::Port(q) => {
                        self.pred = Some(q);
                        out.send(q, Self::trace_msg(ctx, KIND_FWD)?);
                        return Ok(());
                    }
                    Par::Internal => at_out = true,
                    _ => return Err(NodeFault("trace reached an unreached in copy".into())),
                }
            }
        }
    }

    pub fn step(
        &mut self,
        ctx: &Ctx,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<FlowOutcome>, NodeFault> {
        let round = ctx.round;
        match &mut self.stage {
            Stage::Window { start } => {
                let start = *start;
                let w = Self::window_len(self.tree.height);
                let k = round - start;
                for (p, m) in inbox.iter().enumerate() {
                    let Some(m) = m.as_ref().filter(|_| self.ports[p]) else {
                        continue;
                    };
                    let mut r = m.reader();
                    if r.bits(2)? != KIND_REACH {
                        return Err(NodeFault("trace message during search".into()));
                    }
                    if r.flag()? {
                        self.on_out_reach(p);
                    }
                    if r.flag()? {
                        self.on_in_reverse(p)?;
                    }
                }
                if k + 1 < w {
                    self.flush(ctx, out)?;
                    out.idle_until(start + w - 1);
                } else {
                    let sentinel = 1u64 << ctx.id_bits;
                    let hit = if self.hit_port.is_some() {
                        ctx.id
                    } else {
                        sentinel
                    };
                    let fields = Fields::new(
                        vec![
                            (AggOp::Min, ctx.id_bits + 1),
                            (AggOp::Max, 1),
                            (AggOp::Max, 1),
                        ],
                        vec![hit, self.growth as u64, self.abort as u64],
                    );
                    self.stage = Stage::Decide(SyncAggregate::new(round + 1, fields));
                }
                Ok(None)
            }
            Stage::Decide(agg) => {
                let Some(v) = agg.step(ctx, &self.tree, inbox, out)? else {
                    return Ok(None);
                };
                let (hit, growth, abort) = (v.values[0], v.values[1] != 0, v.values[2] != 0);
                self.windows += 1;
                if abort {
                    return Ok(Some(FlowOutcome::Aborted));
                }
                let w = Self::window_len(self.tree.height);
                if hit != 1u64 << ctx.id_bits {
                    if self.role == Role::Sink && hit != ctx.id {
                        self.hit_port = None;
                    }
                    let len = self.windows * w + 1;
                    self.stage = Stage::Trace {
                        start: round + 1,
                        len,
                    };
                    if self.hit_port.is_none() {
                        out.idle_until(round + len);
                    }
                    return Ok(None);
                }
                if !growth {
                    return Ok(Some(if self.f == 0 {
                        FlowOutcome::Empty
                    } else {
                        FlowOutcome::Cut {
                            f: self.f,
                            member: self.role == Role::Inner
                                && self.in_reached
                                && !self.out_reached,
                        }
                    }));
                }
                if self.windows >= self.window_cap {
                    return Ok(Some(FlowOutcome::Abandoned));
                }
                self.growth = false;
                self.stage = Stage::Window { start: round + 1 };
                Ok(None)
            }
            Stage::Trace { start, len } => {
                let (start, len) = (*start, *len);
                let k = round - start;
                if k == 0 && self.role == Role::Sink {
                    if let Some(p) = self.hit_port {
                        out.send(p, Self::trace_msg(ctx, KIND_FWD)?);
                    }
                }
                for (p, m) in inbox.iter().enumerate() {
                    let Some(m) = m.as_ref().filter(|_| self.ports[p]) else {
                        continue;
                    };
                    match m.reader().bits(2)? {
                        KIND_FWD => {
                            if self.role == Role::Inner {
                                self.succ = Some(p);
                                self.continue_trace(ctx, out, true)?;
                            }
                        }
                        KIND_REV => {
                            if self.pred == Some(p) {
                                self.pred = None;
                            }
                            self.continue_trace(ctx, out, false)?;
                        }
                        _ => return Err(NodeFault("reach message during trace".into())),
                    }
                }
                if k + 1 < len {
                    out.idle_until(start + len - 1);
                    return Ok(None);
                }
                self.f += 1;
                if self.f > self.kappa {
                    return Ok(Some(FlowOutcome::Saturated));
                }
                self.reset_search();
                self.stage = Stage::Window { start: round + 1 };
                Ok(None)
            }
        }
    }
}
