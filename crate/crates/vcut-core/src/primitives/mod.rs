//! Composable CONGEST phases.
//!
//! A phase is driven by a node program one round at a time through its `step`
//! method and returns `Some(output)` in its final round. Every phase here ends
//! in the same round at every node and sends nothing in that round, so the
//! next phase can start in the following round with an empty inbox.

mod aggregate;
mod elect;
mod label;
mod pipeline;
mod programs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sim::{MessageWriter, NodeView};

pub use aggregate::{AggOp, AggValue, Fields, SyncAggregate, TreeBroadcast, TwoMin};
pub use elect::{Elect, ElectMode};
pub use label::ComponentLabel;
pub use pipeline::{ListBroadcast, Upcast};
pub use programs::{
    AggregateProgram, BfsLabel, BfsProgram, BroadcastProgram, ComponentLabelProgram, LeaderProgram,
};

/// Node-local knowledge shared by all phases of one program.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub id: u64,
    pub nbr: Vec<u64>,
    pub n: usize,
    pub id_bits: usize,
    pub bandwidth: usize,
    pub seed: u64,
    /// Global round of the current step.
    pub round: u64,
}

impl Ctx {
    pub fn new(view: &NodeView) -> Self {
        Self {
            id: view.my_id,
            nbr: view.neighbor_ids.clone(),
            n: view.n,
            id_bits: view.id_bits,
            bandwidth: view.bandwidth_bits,
            seed: view.rng_seed,
            round: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.nbr.len()
    }

    pub fn writer(&self) -> MessageWriter {
        MessageWriter::new(self.id_bits)
    }

    pub fn port_of(&self, id: u64) -> Option<usize> {
        self.nbr.binary_search(&id).ok()
    }

    /// Private stream for draw number `index` of purpose `tag`; independent of
    /// how much randomness other purposes consumed.
    pub fn rng(&self, tag: u32, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((tag as u64) << 48));
        rng.set_stream(index);
        rng
    }
}

/// A node's place in a rooted spanning (or ball) tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInfo {
    pub root: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: u64,
    /// Height of the whole tree, known to every member.
    pub height: u64,
}
