//! Adaptive binary range coder used to compress each bit plane.
//!
//! The coder keeps a 32-bit range and a 64-bit low accumulator, renormalizes
//! a byte at a time once the range drops below 2^24, and resolves carries by
//! holding back the last emitted byte together with any run of 0xFF bytes
//! behind it. A payload for `n` renormalizations is exactly `n + 5` bytes and
//! always begins with a zero byte.
//!
//! Changing any constant here changes the payload layout and therefore the
//! container version.

use thiserror::Error;

use crate::bits::BitPlane;

/// Models rescale once `c0 + c1` would exceed this.
pub const MODEL_CEILING: u32 = 1 << 16;

const TOP: u32 = 1 << 24;
const FLUSH_BYTES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoderError {
    #[error("payload ended after {consumed} bytes with {decoded} of {expected} bits decoded")]
    TruncatedPayload {
        consumed: usize,
        decoded: u64,
        expected: u64,
    },
    #[error("payload has {unused} unused trailing bytes")]
    TrailingBytes { unused: usize },
    #[error("payload does not start with a zero byte")]
    CorruptPayload,
}

/// Occurrence counts for the two bit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdaptiveBitModel {
    c0: u32,
    c1: u32,
}

impl Default for AdaptiveBitModel {
    fn default() -> Self {
        Self { c0: 1, c1: 1 }
    }
}

impl AdaptiveBitModel {
    pub fn counts(&self) -> (u32, u32) {
        (self.c0, self.c1)
    }

    /// Estimated probability of a 1-bit.
    pub fn p_one(&self) -> f64 {
        f64::from(self.c1) / f64::from(self.c0 + self.c1)
    }

    /// Width of the 1-bit subrange. Both subranges stay non-empty for any
    /// `range >= 2^24` because each count is at least 1 and the total at most
    /// 2^16.
    #[inline]
    fn split(&self, range: u32) -> u32 {
        (u64::from(range) * u64::from(self.c1) / u64::from(self.c0 + self.c1)) as u32
    }

    #[inline]
    pub fn update(&mut self, bit: bool) {
        if bit {
            self.c1 += 1;
        } else {
            self.c0 += 1;
        }
        if self.c0 + self.c1 > MODEL_CEILING {
            self.c0 = self.c0.div_ceil(2);
            self.c1 = self.c1.div_ceil(2);
        }
    }
}

#[derive(Debug, Clone)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::new(),
        }
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    #[inline]
    pub fn encode(&mut self, bit: bool, model: &mut AdaptiveBitModel) {
        let bound = model.split(self.range);
        if bit {
            self.range = bound;
        } else {
            self.low += u64::from(bound);
            self.range -= bound;
        }
        model.update(bit);
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > u64::from(u32::MAX) {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..FLUSH_BYTES {
            self.shift_low();
        }
        self.out
    }
}

#[derive(Debug, Clone)]
pub struct RangeDecoder<'a> {
    payload: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(payload: &'a [u8]) -> Result<Self, CoderError> {
        if payload.len() < FLUSH_BYTES {
            return Err(CoderError::TruncatedPayload {
                consumed: payload.len(),
                decoded: 0,
                expected: 0,
            });
        }
        if payload[0] != 0 {
            return Err(CoderError::CorruptPayload);
        }
        let code = payload[1..FLUSH_BYTES]
            .iter()
            .fold(0u32, |acc, &b| (acc << 8) | u32::from(b));
        Ok(Self {
            payload,
            pos: FLUSH_BYTES,
            code,
            range: u32::MAX,
        })
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    /// Bytes consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Decodes one bit; `None` when the payload runs out mid-renormalization.
    #[inline]
    pub fn decode(&mut self, model: &mut AdaptiveBitModel) -> Option<bool> {
        let bound = model.split(self.range);
        let bit = self.code < bound;
        if bit {
            self.range = bound;
        } else {
            self.code -= bound;
            self.range -= bound;
        }
        model.update(bit);
        while self.range < TOP {
            let byte = *self.payload.get(self.pos)?;
            self.pos += 1;
            self.range <<= 8;
            self.code = (self.code << 8) | u32::from(byte);
        }
        Some(bit)
    }

    /// Fails unless every payload byte was consumed.
    pub fn finish(self) -> Result<(), CoderError> {
        match self.payload.len() - self.pos {
            0 => Ok(()),
            unused => Err(CoderError::TrailingBytes { unused }),
        }
    }
}

/// Compresses one plane with a fresh model.
pub fn encode_plane(plane: &BitPlane) -> Vec<u8> {
    let mut model = AdaptiveBitModel::default();
    let mut encoder = RangeEncoder::new();
    for bit in plane {
        encoder.encode(bit, &mut model);
    }
    encoder.finish()
}

pub fn decode_plane(payload: &[u8], len: u64) -> Result<BitPlane, CoderError> {
    let mut model = AdaptiveBitModel::default();
    let mut decoder = RangeDecoder::new(payload)?;
    let mut plane = BitPlane::with_capacity(len);
    for decoded in 0..len {
        let bit = decoder
            .decode(&mut model)
            .ok_or(CoderError::TruncatedPayload {
                consumed: payload.len(),
                decoded,
                expected: len,
            })?;
        plane.push(bit);
    }
    decoder.finish()?;
    Ok(plane)
}
