//! Packed bit sequences, most-significant bit first within each byte.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A packed sequence of bits with an exact length.
///
/// Bit `i` lives in byte `i / 8` at position `7 - i % 8`, so a hex dump of
/// the storage reads left to right like the printed bit string. Pad bits in
/// the final byte are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitPlane {
    bytes: Vec<u8>,
    len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit character {found:?} at position {position}")]
pub struct ParseBitsError {
    pub position: usize,
    pub found: char,
}

impl BitPlane {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: u64) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8) as usize),
            len: 0,
        }
    }

    /// Builds a plane from packed storage. Returns `None` when `bytes` is not
    /// exactly `ceil(len / 8)` long or a pad bit is set.
    pub fn from_packed(bytes: Vec<u8>, len: u64) -> Option<Self> {
        if bytes.len() as u64 != len.div_ceil(8) {
            return None;
        }
        let tail = (len % 8) as u32;
        if tail != 0 {
            let last = *bytes.last()?;
            if last & (0xFFu8 >> tail) != 0 {
                return None;
            }
        }
        Some(Self { bytes, len })
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let shift = 7 - (self.len % 8) as u32;
        if shift == 7 {
            self.bytes.push(0);
        }
        if bit {
            // Safe: a byte was pushed above whenever a new one is needed.
            *self.bytes.last_mut().unwrap() |= 1 << shift;
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, index: u64) -> Option<bool> {
        if index >= self.len {
            return None;
        }
        let byte = self.bytes[(index / 8) as usize];
        Some(byte >> (7 - index % 8) & 1 == 1)
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    pub fn iter(&self) -> BitCursor<'_> {
        BitCursor::new(self)
    }

    pub fn extend_from(&mut self, other: &BitPlane) {
        for bit in other.iter() {
            self.push(bit);
        }
    }

    /// True when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &BitPlane) -> bool {
        self.len <= other.len && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl fmt::Display for BitPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPlane({} bits: {self})", self.len)
    }
}

impl FromStr for BitPlane {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut plane = BitPlane::with_capacity(s.len() as u64);
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => plane.push(false),
                '1' => plane.push(true),
                found => return Err(ParseBitsError { position, found }),
            }
        }
        Ok(plane)
    }
}

impl FromIterator<bool> for BitPlane {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut plane = BitPlane::new();
        for bit in iter {
            plane.push(bit);
        }
        plane
    }
}

impl<'a> IntoIterator for &'a BitPlane {
    type Item = bool;
    type IntoIter = BitCursor<'a>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Sequential reader over a [`BitPlane`].
#[derive(Clone, Debug)]
pub struct BitCursor<'a> {
    plane: &'a BitPlane,
    pos: u64,
}

impl<'a> BitCursor<'a> {
    pub fn new(plane: &'a BitPlane) -> Self {
        Self { plane, pos: 0 }
    }

    /// Number of bits consumed so far.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.plane.len - self.pos
    }

    #[inline]
    pub fn read(&mut self) -> Option<bool> {
        let bit = self.plane.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }
}

impl Iterator for BitCursor<'_> {
    type Item = bool;

    #[inline]
    fn next(&mut self) -> Option<bool> {
        self.read()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BitCursor<'_> {}
