//! The node program for `find_vertex_cut`.
//!
//! Phases, each known to end in the same round at every node:
//!
//! 1. leader election and BFS tree;
//! 2. cut-vertex detection (decides κ = 1 on its own);
//! 3. low-degree check: a vertex of degree at most κ that is not adjacent to
//!    everything is separated by its neighborhood;
//! 4. pair trials: flows between two random vertices over the whole graph,
//!    which find every cut whose sides are both large;
//! 5. ball trials: parallel local flows from sampled low-degree centers,
//!    which find cuts with a small side;
//! 6. dissemination of the chosen separator.
//!
//! The search stops at the first phase that finds a separator. All random
//! draws are indexed by trial, never by κ, and every flow is deterministic
//! given its endpoints, so a cut found for κ is found again for κ + 1.

use rand::Rng;

use super::articulation::Articulation;
use super::balls::{BallFound, BallTrial};
use super::flow::{FlowInstance, FlowOutcome, Role};
use super::plan::{PhaseKind, PhaseSpan, Schedule};
use crate::primitives::{
    AggOp, Ctx, Elect, ElectMode, Fields, ListBroadcast, SyncAggregate, TreeInfo, TwoMin, Upcast,
};
use crate::sim::{Message, NodeFault, NodeProgram, NodeView, Outbox, Status};
use crate::CutVerdict;

const TAG_PAIR: u32 = 2;

// Held behind a box, so the spread in variant sizes costs nothing.
#[allow(clippy::large_enum_variant)]
enum Stage {
    Elect(Elect),
    Articulation(Articulation),
    Neighborhood(SyncAggregate<Fields>),
    PairSelect {
        trial: u64,
        agg: SyncAggregate<TwoMin>,
    },
    PairFlow {
        trial: u64,
        flow: FlowInstance,
    },
    Ball {
        radius: usize,
        rep: u64,
        trial: BallTrial,
    },
    Upcast(Upcast),
    Broadcast(ListBroadcast),
    Done,
}

pub struct VcutProgram {
    ctx: Ctx,
    kappa: usize,
    c: u32,
    sched: Option<Schedule>,
    tree: Option<TreeInfo>,
    // boxed so the per-step take and put back moves a pointer, not the state
    stage: Option<Box<Stage>>,
    /// Phase boundaries as seen by this node; identical at all nodes.
    pub log: Vec<PhaseSpan>,
}

impl VcutProgram {
    pub fn new(view: &NodeView, kappa: usize, c: u32) -> Self {
        let ctx = Ctx::new(view);
        let stage = Stage::Elect(Elect::new(&ctx, 1, ElectMode::AllCandidates));
        Self {
            ctx,
            kappa,
            c,
            sched: None,
            tree: None,
            stage: Some(Box::new(stage)),
            log: vec![PhaseSpan::open(PhaseKind::Elect, 1)],
        }
    }

    fn enter(&mut self, kind: PhaseKind, round: u64) {
        let last = self.log.last_mut().unwrap();
        if last.kind != kind {
            last.end = round - 1;
            self.log.push(PhaseSpan::open(kind, round));
        }
    }

    fn tree(&self) -> TreeInfo {
        self.tree.clone().expect("tree is built first")
    }

    fn sched(&self) -> &Schedule {
        self.sched
            .as_ref()
            .expect("schedule is fixed after election")
    }

    fn start_pairs(&mut self, round: u64, trial: u64) -> Stage {
        if trial >= self.sched().pair_trials {
            return self.start_balls(round, 0, 0);
        }
        self.enter(PhaseKind::PairTrials, round);
        let w = self.ctx.id_bits;
        let key = self.ctx.rng(TAG_PAIR, trial).gen::<u64>() & ((1u64 << (2 * w)) - 1);
        let input = TwoMin::new(2 * w, w, Some((key, self.ctx.id)));
        Stage::PairSelect {
            trial,
            agg: SyncAggregate::new(round, input),
        }
    }

    fn start_balls(&mut self, round: u64, radius: usize, rep: u64) -> Stage {
        let (radius, rep) = if rep >= self.sched().ball_reps {
            (radius + 1, 0)
        } else {
            (radius, rep)
        };
        let Some(&rho) = self.sched().radii.get(radius) else {
            return self.finish_empty(round);
        };
        self.enter(PhaseKind::BallTrials, round);
        let threshold = Schedule::candidate_degree(radius);
        let draw = ((radius as u64) << 32) | rep;
        let trial = BallTrial::new(
            &self.ctx,
            round,
            rho,
            self.kappa,
            self.sched().ball_window_cap,
            self.tree(),
            self.ctx.degree() <= threshold,
            draw,
        );
        Stage::Ball { radius, rep, trial }
    }

    fn start_verdict(&mut self, round: u64, member: bool) -> Stage {
        self.enter(PhaseKind::Verdict, round);
        let items = if member {
            vec![self.ctx.id]
        } else {
            Vec::new()
        };
        let tree = self.tree();
        Stage::Upcast(Upcast::new(
            round,
            &tree,
            self.ctx.id_bits,
            self.kappa,
            items,
        ))
    }

    fn finish_empty(&mut self, round: u64) -> Stage {
        self.enter(PhaseKind::Verdict, round);
        Stage::Done
    }

    fn output(&mut self, verdict: CutVerdict, round: u64) -> Result<Step, NodeFault> {
        self.log.last_mut().unwrap().end = round;
        Ok(Step::Halt(Status::Halted(
            verdict.encode(self.kappa, self.ctx.id_bits)?,
        )))
    }
}

enum Step {
    Stay,
    Next(Box<Stage>),
    Halt(Status),
}

impl NodeProgram for VcutProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        let mut stage = self.stage.take().expect("stage is always set");
        match self.advance(&mut stage, inbox, out)? {
            Step::Stay => self.stage = Some(stage),
            Step::Next(s) => self.stage = Some(s),
            Step::Halt(status) => return Ok(status),
        }
        Ok(Status::Running)
    }
}

impl VcutProgram {
    fn advance(
        &mut self,
        stage: &mut Stage,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Step, NodeFault> {
        let round = self.ctx.round;
        let next = round + 1;
        let stage = match stage {
            Stage::Elect(e) => {
                let Some(tree) = e.step(&self.ctx, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                self.sched = Some(Schedule::new(self.ctx.n, tree.height, self.c));
                let art =
                    Articulation::new(&self.ctx, next, tree.clone(), self.sched().label_slack);
                self.tree = Some(tree);
                self.enter(PhaseKind::Articulation, next);
                Stage::Articulation(art)
            }
            Stage::Articulation(a) => {
                let Some(found) = a.step(&self.ctx, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                if let Some(v) = found {
                    return self.output(CutVerdict::Cut(vec![v as usize]), round);
                }
                if self.kappa == 1 {
                    return self.output(CutVerdict::NoCutWithin(1), round);
                }
                self.enter(PhaseKind::Neighborhood, next);
                let w = self.ctx.id_bits;
                let deg = self.ctx.degree();
                let low = deg <= self.kappa && deg + 1 < self.ctx.n;
                let value = if low { self.ctx.id } else { 1u64 << w };
                Stage::Neighborhood(SyncAggregate::new(
                    next,
                    Fields::single(AggOp::Min, w + 1, value),
                ))
            }
            Stage::Neighborhood(agg) => {
                let tree = self.tree.as_ref().unwrap();
                let Some(v) = agg.step(&self.ctx, tree, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                let low = v.values[0];
                if low < 1u64 << self.ctx.id_bits {
                    let member = self.ctx.port_of(low).is_some();
                    self.start_verdict(next, member)
                } else {
                    self.start_pairs(next, 0)
                }
            }
            Stage::PairSelect { trial, agg } => {
                let tree = self.tree.as_ref().unwrap();
                let Some(v) = agg.step(&self.ctx, tree, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                let trial = *trial;
                let (x, y) = match v.best[..] {
                    [(_, x), (_, y)] => (x, y),
                    _ => return Err(NodeFault("pair selection needs two vertices".into())),
                };
                let role = if self.ctx.id == x {
                    Role::Source
                } else if self.ctx.id == y {
                    Role::Sink
                } else {
                    Role::Inner
                };
                let abort = self.ctx.id == x && self.ctx.port_of(y).is_some();
                let flow = FlowInstance::new(
                    next,
                    role,
                    vec![true; self.ctx.degree()],
                    tree.clone(),
                    self.kappa,
                    self.sched().pair_window_cap,
                    abort,
                );
                Stage::PairFlow { trial, flow }
            }
            Stage::PairFlow { trial, flow } => {
                let Some(outcome) = flow.step(&self.ctx, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                let trial = *trial;
                match outcome {
                    FlowOutcome::Cut { member, .. } => self.start_verdict(next, member),
                    _ => self.start_pairs(next, trial + 1),
                }
            }
            Stage::Ball { radius, rep, trial } => {
                let Some(found) = trial.step(&self.ctx, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                let (radius, rep) = (*radius, *rep);
                match found {
                    Some(BallFound { member, .. }) => self.start_verdict(next, member),
                    None => self.start_balls(next, radius, rep + 1),
                }
            }
            Stage::Upcast(u) => {
                let tree = self.tree.as_ref().unwrap();
                let Some(items) = u.step(&self.ctx, tree, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                let tree = tree.clone();
                Stage::Broadcast(ListBroadcast::new(
                    next,
                    &tree,
                    self.ctx.id_bits,
                    self.kappa,
                    items,
                ))
            }
            Stage::Broadcast(b) => {
                let tree = self.tree.as_ref().unwrap();
                let Some(items) = b.step(&self.ctx, tree, inbox, out)? else {
                    return Ok(Step::Stay);
                };
                if items.is_empty() {
                    return Err(NodeFault("separator announced without members".into()));
                }
                return self.output(
                    CutVerdict::Cut(items.iter().map(|&v| v as usize).collect()),
                    round,
                );
            }
            Stage::Done => {
                return self.output(CutVerdict::NoCutWithin(self.kappa), round);
            }
        };
        Ok(Step::Next(Box::new(stage)))
    }
}
