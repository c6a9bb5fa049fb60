//! Minimum-ID labeling of the components of `G - excluded`.

use super::Ctx;
use crate::sim::{Message, NodeFault, Outbox};

/// Min-label flooding among non-excluded nodes. Excluded nodes neither send
/// nor forward. Labels settle within `n - 1` rounds; every node finishes in
/// local round `n`.
pub struct ComponentLabel {
    start: u64,
    excluded: bool,
    /// Ports whose neighbor takes part.
    ports: Vec<usize>,
    label: u64,
    dirty: bool,
}

impl ComponentLabel {
    pub fn new(ctx: &Ctx, start: u64, excluded: &[u64]) -> Self {
        let is_out = |id: &u64| excluded.contains(id);
        Self {
            start,
            excluded: is_out(&ctx.id),
            ports: (0..ctx.degree())
                .filter(|&p| !is_out(&ctx.nbr[p]))
                .collect(),
            label: ctx.id,
            dirty: true,
        }
    }

    pub fn rounds(n: usize) -> u64 {
        n as u64 + 1
    }

    /// Returns `Some(None)` at excluded nodes.
    pub fn step(
        &mut self,
        ctx: &Ctx,
        inbox: &[Option<Message>],
        out: &mut Outbox,
    ) -> Result<Option<Option<u64>>, NodeFault> {
        let t = ctx.round - self.start;
        let last = Self::rounds(ctx.n) - 1;
        if !self.excluded {
            for m in inbox.iter().flatten() {
                let l = m.reader().bits(ctx.id_bits)?;
                if l < self.label {
                    self.label = l;
                    self.dirty = true;
                }
            }
            if self.dirty && t < last {
                self.dirty = false;
                let mut w = ctx.writer();
                w.id(self.label)?;
                let msg = w.finish();
                for &p in &self.ports {
                    out.send(p, msg.clone());
                }
            }
        }
        if t >= last {
            return Ok(Some((!self.excluded).then_some(self.label)));
        }
        out.idle_until(self.start + last);
        Ok(None)
    }
}
