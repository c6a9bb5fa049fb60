//! The answer to "is there a vertex cut of size at most κ?".

use serde::{Deserialize, Serialize};

use crate::sim::{Message, WireError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutVerdict {
    /// Sorted separator with at most κ vertices.
    Cut(Vec<usize>),
    NoCutWithin(usize),
}

impl CutVerdict {
    pub fn is_cut(&self) -> bool {
        matches!(self, CutVerdict::Cut(_))
    }

    pub fn cut(&self) -> Option<&[usize]> {
        match self {
            CutVerdict::Cut(s) => Some(s),
            CutVerdict::NoCutWithin(_) => None,
        }
    }

    /// Tag bit (1 = cut), κ in 16 bits, then the cut IDs in `id_bits` each.
    pub fn encode(&self, kappa: usize, id_bits: usize) -> Result<Message, WireError> {
        let mut m = Message::new();
        m.push_bit(self.is_cut());
        m.push_bits(kappa as u64, 16)?;
        if let CutVerdict::Cut(s) = self {
            for &v in s {
                m.push_bits(v as u64, id_bits)?;
            }
        }
        Ok(m)
    }

    /// Inverse of [`CutVerdict::encode`]; returns the verdict and κ.
    pub fn decode(msg: &Message, id_bits: usize) -> Result<(CutVerdict, usize), WireError> {
        let mut r = msg.reader();
        let is_cut = r.flag()?;
        let kappa = r.bits(16)? as usize;
        if !is_cut {
            return Ok((CutVerdict::NoCutWithin(kappa), kappa));
        }
        let mut s = Vec::new();
        while r.remaining() >= id_bits && r.remaining() > 0 {
            s.push(r.bits(id_bits)? as usize);
        }
        Ok((CutVerdict::Cut(s), kappa))
    }
}
