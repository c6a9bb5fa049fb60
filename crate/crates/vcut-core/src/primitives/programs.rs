//! Stand-alone node programs wrapping single primitives, for tests and the CLI.

use super::{
    AggValue, ComponentLabel, Ctx, Elect, ElectMode, Fields, SyncAggregate, TreeBroadcast, TreeInfo,
};
use crate::sim::{Message, NodeFault, NodeProgram, NodeView, Outbox, Status};

/// Elects the minimum ID; every node outputs the leader's ID.
pub struct LeaderProgram {
    ctx: Ctx,
    elect: Elect,
    pub tree: Option<TreeInfo>,
}

impl LeaderProgram {
    pub fn new(view: &NodeView) -> Self {
        let ctx = Ctx::new(view);
        let elect = Elect::new(&ctx, 1, ElectMode::AllCandidates);
        Self {
            ctx,
            elect,
            tree: None,
        }
    }
}

impl NodeProgram for LeaderProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        match self.elect.step(&self.ctx, inbox, out)? {
            Some(tree) => {
                let mut w = self.ctx.writer();
                w.id(tree.root)?;
                self.tree = Some(tree);
                Ok(Status::Halted(w.finish()))
            }
            None => Ok(Status::Running),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfsLabel {
    pub root: u64,
    /// The node's own ID at the root.
    pub parent: u64,
    pub depth: u64,
}

impl BfsLabel {
    pub fn decode(msg: &Message, id_bits: usize) -> Result<Self, crate::sim::WireError> {
        let mut r = msg.reader();
        Ok(Self {
            root: r.bits(id_bits)?,
            parent: r.bits(id_bits)?,
            depth: r.bits(id_bits)?,
        })
    }
}

/// BFS tree from a known root with echo-based termination; each node halts
/// right after its own echo, so the run takes about `2D` rounds.
pub struct BfsProgram {
    ctx: Ctx,
    elect: Elect,
    pub tree: Option<TreeInfo>,
}

impl BfsProgram {
    pub fn new(view: &NodeView, root: u64) -> Self {
        let ctx = Ctx::new(view);
        let elect = Elect::new(&ctx, 1, ElectMode::SingleRoot(root)).halting_after_echo();
        Self {
            ctx,
            elect,
            tree: None,
        }
    }
}

impl NodeProgram for BfsProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        match self.elect.step(&self.ctx, inbox, out)? {
            Some(tree) => {
                let parent = tree.parent.map_or(self.ctx.id, |p| self.ctx.nbr[p]);
                let mut w = self.ctx.writer();
                w.id(tree.root)?
                    .id(parent)?
                    .counter(tree.depth, self.ctx.id_bits)?;
                self.tree = Some(tree);
                Ok(Status::Halted(w.finish()))
            }
            None => Ok(Status::Running),
        }
    }
}

enum Stage<V: AggValue> {
    Elect(Elect),
    Aggregate(TreeInfo, SyncAggregate<V>),
    Broadcast(TreeInfo, TreeBroadcast<V>),
}

/// Leader election, then a convergecast of every node's input whose result
/// is broadcast back; every node outputs the encoded result.
pub struct AggregateProgram {
    ctx: Ctx,
    input: Option<Fields>,
    stage: Stage<Fields>,
}

impl AggregateProgram {
    pub fn new(view: &NodeView, input: Fields) -> Self {
        let ctx = Ctx::new(view);
        let stage = Stage::Elect(Elect::new(&ctx, 1, ElectMode::AllCandidates));
        Self {
            ctx,
            input: Some(input),
            stage,
        }
    }
}

impl NodeProgram for AggregateProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        match &mut self.stage {
            Stage::Elect(e) => {
                if let Some(tree) = e.step(&self.ctx, inbox, out)? {
                    let input = self.input.take().expect("input consumed once");
                    self.stage = Stage::Aggregate(tree, SyncAggregate::new(round + 1, input));
                }
                Ok(Status::Running)
            }
            Stage::Aggregate(tree, agg) => match agg.step(&self.ctx, tree, inbox, out)? {
                Some(v) => {
                    let mut w = self.ctx.writer();
                    v.encode(&mut w)?;
                    Ok(Status::Halted(w.finish()))
                }
                None => Ok(Status::Running),
            },
            Stage::Broadcast(..) => unreachable!(),
        }
    }
}

/// Leader election, then the leader's value is broadcast down the tree.
pub struct BroadcastProgram {
    ctx: Ctx,
    value: Option<Fields>,
    stage: Stage<Fields>,
}

impl BroadcastProgram {
    /// `value` is only used at the node that turns out to be the leader.
    pub fn new(view: &NodeView, value: Fields) -> Self {
        let ctx = Ctx::new(view);
        let stage = Stage::Elect(Elect::new(&ctx, 1, ElectMode::AllCandidates));
        Self {
            ctx,
            value: Some(value),
            stage,
        }
    }
}

impl NodeProgram for BroadcastProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        match &mut self.stage {
            Stage::Elect(e) => {
                if let Some(tree) = e.step(&self.ctx, inbox, out)? {
                    let value = self.value.take().expect("value consumed once");
                    self.stage = Stage::Broadcast(tree, TreeBroadcast::new(round + 1, value));
                }
                Ok(Status::Running)
            }
            Stage::Broadcast(tree, b) => match b.step(&self.ctx, tree, inbox, out)? {
                Some(v) => {
                    let mut w = self.ctx.writer();
                    v.encode(&mut w)?;
                    Ok(Status::Halted(w.finish()))
                }
                None => Ok(Status::Running),
            },
            Stage::Aggregate(..) => unreachable!(),
        }
    }
}

/// Labels the components of `G - excluded`. Output: one flag (set at excluded
/// nodes) followed by the label.
pub struct ComponentLabelProgram {
    ctx: Ctx,
    phase: ComponentLabel,
}

impl ComponentLabelProgram {
    pub fn new(view: &NodeView, excluded: &[u64]) -> Self {
        let ctx = Ctx::new(view);
        let phase = ComponentLabel::new(&ctx, 1, excluded);
        Self { ctx, phase }
    }

    pub fn decode(msg: &Message, id_bits: usize) -> Result<Option<u64>, crate::sim::WireError> {
        let mut r = msg.reader();
        if r.flag()? {
            return Ok(None);
        }
        r.bits(id_bits).map(Some)
    }
}

impl NodeProgram for ComponentLabelProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        match self.phase.step(&self.ctx, inbox, out)? {
            Some(label) => {
                let mut w = self.ctx.writer();
                w.flag(label.is_none());
                w.id(label.unwrap_or(0))?;
                Ok(Status::Halted(w.finish()))
            }
            None => Ok(Status::Running),
        }
    }
}
