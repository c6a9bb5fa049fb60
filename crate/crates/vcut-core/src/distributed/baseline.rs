//! Gather-to-leader baseline: the leader learns the whole edge list, solves
//! the problem locally and broadcasts the answer.

use crate::oracle::has_cut_at_most;
use crate::primitives::{
    AggOp, Ctx, Elect, ElectMode, Fields, ListBroadcast, SyncAggregate, TreeInfo, Upcast,
};
use crate::sim::{Message, NodeFault, NodeProgram, NodeView, Outbox, Status};
use crate::{CutVerdict, Graph};

enum Stage {
    Elect(Elect),
    CountEdges(TreeInfo, SyncAggregate<Fields>),
    Gather(TreeInfo, Upcast),
    Broadcast(TreeInfo, ListBroadcast),
}

pub struct BaselineProgram {
    ctx: Ctx,
    kappa: usize,
    stage: Option<Stage>,
}

impl BaselineProgram {
    pub fn new(view: &NodeView, kappa: usize) -> Self {
        let ctx = Ctx::new(view);
        let stage = Stage::Elect(Elect::new(&ctx, 1, ElectMode::AllCandidates));
        Self {
            ctx,
            kappa,
            stage: Some(stage),
        }
    }

    /// Runs the oracle on the gathered edges; items are `u << w | v` with
    /// `u < v`. Returns whether a cut was found and the cut IDs.
    fn solve(&self, items: &[u64]) -> Result<(bool, Vec<u64>), NodeFault> {
        let w = self.ctx.id_bits;
        let mask = (1u64 << w) - 1;
        let mut ids: Vec<u64> = items.iter().flat_map(|&e| [e >> w, e & mask]).collect();
        ids.push(self.ctx.id);
        ids.sort_unstable();
        ids.dedup();
        let index = |id: u64| ids.binary_search(&id).unwrap();
        let edges = items.iter().map(|&e| (index(e >> w), index(e & mask)));
        let g = Graph::from_edges(ids.len(), edges)
            .map_err(|e| NodeFault(format!("gathered edges: {e}")))?;
        match has_cut_at_most(&g, self.kappa) {
            Ok(CutVerdict::Cut(s)) => Ok((true, s.into_iter().map(|v| ids[v]).collect())),
            Ok(CutVerdict::NoCutWithin(_)) => Ok((false, Vec::new())),
            Err(e) => Err(NodeFault(format!("leader oracle: {e}"))),
        }
    }
}

impl NodeProgram for BaselineProgram {
    fn step(
        &mut self,
        round: u64,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Status, NodeFault> {
        self.ctx.round = round;
        let next = round + 1;
        let w = self.ctx.id_bits;
        let stage = match self.stage.take().expect("stage is always set") {
            Stage::Elect(mut e) => match e.step(&self.ctx, inbox, out)? {
                None => Stage::Elect(e),
                Some(tree) => {
                    let width = 2 * w + 1;
                    let agg = SyncAggregate::new(
                        next,
                        Fields::single(AggOp::Sum, width, self.ctx.degree() as u64),
                    );
                    Stage::CountEdges(tree, agg)
                }
            },
            Stage::CountEdges(tree, mut agg) => match agg.step(&self.ctx, &tree, inbox, out)? {
                None => Stage::CountEdges(tree, agg),
                Some(v) => {
                    let m = (v.values[0] / 2) as usize;
                    let items = self
                        .ctx
                        .nbr
                        .iter()
                        .filter(|&&u| u > self.ctx.id)
                        .map(|&u| (self.ctx.id << w) | u)
                        .collect();
                    let up = Upcast::new(next, &tree, 2 * w, m, items);
                    Stage::Gather(tree, up)
                }
            },
            Stage::Gather(tree, mut up) => match up.step(&self.ctx, &tree, inbox, out)? {
                None => Stage::Gather(tree, up),
                Some(items) => {
                    let (found, cut) = if tree.parent.is_none() {
                        self.solve(&items)?
                    } else {
                        (false, Vec::new())
                    };
                    // one leading flag item tells the nodes whether a cut follows
                    let mut list = vec![found as u64];
                    list.extend(cut);
                    let b = ListBroadcast::new(next, &tree, w.max(1), self.kappa + 1, list);
                    Stage::Broadcast(tree, b)
                }
            },
            Stage::Broadcast(tree, mut b) => match b.step(&self.ctx, &tree, inbox, out)? {
                None => Stage::Broadcast(tree, b),
                Some(list) => {
                    let verdict = match list.split_first() {
                        Some((&1, cut)) => {
                            CutVerdict::Cut(cut.iter().map(|&v| v as usize).collect())
                        }
                        Some((&0, _)) => CutVerdict::NoCutWithin(self.kappa),
                        _ => return Err(NodeFault("malformed verdict list".into())),
                    };
                    return Ok(Status::Halted(verdict.encode(self.kappa, w)?));
                }
            },
        };
        self.stage = Some(stage);
        Ok(Status::Running)
    }
}

/// Rounds the baseline needs at most: election, edge count, gathering of all
/// `m` edges and the verdict broadcast.
pub fn baseline_round_bound(d: u64, m: usize, kappa: usize) -> u64 {
    (4 * d + 8) + (2 * d + 1) + (d + m as u64 + 2) + (d + kappa as u64 + 3)
}
