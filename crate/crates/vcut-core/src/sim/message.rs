//! Bit-exact message payloads and the wire vocabulary (IDs, sized counters, flags).

use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

/// A bit string. Bits are appended most-significant first.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Message {
    words: SmallVec<[u64; 2]>,
    len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: usize },
    #[error("read of {width} bits at offset {pos} runs past the {len}-bit payload")]
    Truncated {
        pos: usize,
        width: usize,
        len: usize,
    },
}

/// Smallest width holding every value in `0..=max`.
pub fn bits_for(max: u64) -> usize {
    (64 - max.leading_zeros() as usize).max(1)
}

/// ⌈log₂(n+1)⌉, the width of a vertex-ID field.
pub fn id_bits(n: usize) -> usize {
    bits_for(n as u64)
}

impl Message {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            let w = self.len / 64;
            self.words[w] |= 1 << (63 - self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`.
    pub fn push_bits(&mut self, value: u64, width: usize) -> Result<(), WireError> {
        if width < 64 && value >> width != 0 {
            return Err(WireError::Overflow { value, width });
        }
        if width > 64 {
            // leading zero padding, then the value itself
            for _ in 64..width {
                self.push_bit(false);
            }
            return self.push_bits(value, 64);
        }
        let mut rest = width;
        while rest > 0 {
            let off = self.len % 64;
            if off == 0 {
                self.words.push(0);
            }
            let take = rest.min(64 - off);
            let chunk = if take == 64 {
                value
            } else {
                (value >> (rest - take)) & ((1u64 << take) - 1)
            };
            let last = self.words.len() - 1;
            self.words[last] |= chunk << (64 - off - take);
            self.len += take;
            rest -= take;
        }
        Ok(())
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit {i} out of range for {}-bit message",
            self.len
        );
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    /// Reads `width` bits starting at `pos` as an unsigned integer.
    pub fn read(&self, pos: usize, width: usize) -> Result<u64, WireError> {
        if pos + width > self.len || width > 64 {
            return Err(WireError::Truncated {
                pos,
                width,
                len: self.len,
            });
        }
        if width == 0 {
            return Ok(0);
        }
        let (w, off) = (pos / 64, pos % 64);
        let hi = self.words[w] << off;
        let v = if off + width > 64 {
            hi | (self.words[w + 1] >> (64 - off))
        } else {
            hi
        };
        Ok(v >> (64 - width))
    }

    pub fn from_bit_str(s: &str) -> Self {
        let mut m = Self::new();
        for c in s.chars() {
            match c {
                '0' => m.push_bit(false),
                '1' => m.push_bit(true),
                _ => panic!("not a bit: {c:?}"),
            }
        }
        m
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }

    /// Hex of the bits, zero-padded on the right to whole nibbles.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        (0..nibbles)
            .map(|k| {
                let v = (0..4).fold(0u32, |acc, j| {
                    let i = 4 * k + j;
                    (acc << 1) | (i < self.len && self.bit(i)) as u32
                });
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn reader(&self) -> MessageReader<'_> {
        MessageReader { msg: self, pos: 0 }
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Message({}b:{})", self.len, self.to_bit_string())
    }
}

/// One field of the structured wire vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Id(u64),
    Counter { value: u64, width: usize },
    Flag(bool),
}

/// Canonical encoding of `fields` for a network of `n` nodes.
pub fn measure_bits(fields: &[Field], n: usize) -> Result<Message, WireError> {
    let mut w = MessageWriter::new(id_bits(n));
    for f in fields {
        match *f {
            Field::Id(v) => w.id(v)?,
            Field::Counter { value, width } => w.counter(value, width)?,
            Field::Flag(b) => w.flag(b),
        };
    }
    Ok(w.finish())
}

/// Builds a message field by field with a fixed ID width.
pub struct MessageWriter {
    msg: Message,
    id_bits: usize,
}

impl MessageWriter {
    pub fn new(id_bits: usize) -> Self {
        Self {
            msg: Message::new(),
            id_bits,
        }
    }

    pub fn id(&mut self, v: u64) -> Result<&mut Self, WireError> {
        self.msg.push_bits(v, self.id_bits)?;
        Ok(self)
    }

    pub fn counter(&mut self, value: u64, width: usize) -> Result<&mut Self, WireError> {
        self.msg.push_bits(value, width)?;
        Ok(self)
    }

    pub fn flag(&mut self, b: bool) -> &mut Self {
        self.msg.push_bit(b);
        self
    }

    pub fn len(&self) -> usize {
        self.msg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.msg.is_empty()
    }

    pub fn finish(&mut self) -> Message {
        std::mem::take(&mut self.msg)
    }
}

/// Sequential reader mirroring [`MessageWriter`].
pub struct MessageReader<'a> {
    msg: &'a Message,
    pos: usize,
}

impl MessageReader<'_> {
    pub fn bits(&mut self, width: usize) -> Result<u64, WireError> {
        let v = self.msg.read(self.pos, width)?;
        self.pos += width;
        Ok(v)
    }

    pub fn flag(&mut self) -> Result<bool, WireError> {
        Ok(self.bits(1)? == 1)
    }

    pub fn remaining(&self) -> usize {
        self.msg.len() - self.pos
    }
}
