//! Classical binarizations of symbol indices, kept for bit-count comparison.
//!
//! Conventions: unary writes `n` ones and a terminating zero; Exp-Golomb
//! writes leading zeros, then a one, then the suffix bits.

use std::fmt;

use thiserror::Error;

use crate::alphabet::{Alphabet, BinarizationOrder};
use crate::bits::{BitCursor, BitPlane};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("value {value} out of range for {scheme}")]
    OutOfRange { value: u64, scheme: Scheme },
    #[error("invalid parameter for {0}")]
    InvalidParameter(Scheme),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Unary,
    TruncatedUnary { c_max: u64 },
    FixedLength { width: u32 },
    ExpGolomb { k: u32 },
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Unary => write!(f, "unary"),
            Scheme::TruncatedUnary { c_max } => write!(f, "truncated-unary(cmax={c_max})"),
            Scheme::FixedLength { width } => write!(f, "fixed-length(width={width})"),
            Scheme::ExpGolomb { k } => write!(f, "exp-golomb(k={k})"),
        }
    }
}

pub fn unary_encode(n: u64) -> BitPlane {
    let mut bits = BitPlane::with_capacity(n + 1);
    for _ in 0..n {
        bits.push(true);
    }
    bits.push(false);
    bits
}

pub fn truncated_unary_encode(n: u64, c_max: u64) -> Result<BitPlane, BaselineError> {
    if n > c_max {
        return Err(BaselineError::OutOfRange {
            value: n,
            scheme: Scheme::TruncatedUnary { c_max },
        });
    }
    let mut bits = BitPlane::with_capacity(n + 1);
    for _ in 0..n {
        bits.push(true);
    }
    if n < c_max {
        bits.push(false);
    }
    Ok(bits)
}

pub fn fixed_length_encode(n: u64, width: u32) -> Result<BitPlane, BaselineError> {
    let scheme = Scheme::FixedLength { width };
    if width == 0 || width > 64 {
        return Err(BaselineError::InvalidParameter(scheme));
    }
    if width < 64 && n >> width != 0 {
        return Err(BaselineError::OutOfRange { value: n, scheme });
    }
    Ok((0..width).rev().map(|i| n >> i & 1 == 1).collect())
}

pub fn exp_golomb_encode(n: u64, k: u32) -> Result<BitPlane, BaselineError> {
    let scheme = Scheme::ExpGolomb { k };
    // Work in u128 so `n + 2^k` cannot overflow.
    if k >= 64 {
        return Err(BaselineError::InvalidParameter(scheme));
    }
    let shifted = u128::from(n) + (1u128 << k);
    let width = 128 - shifted.leading_zeros();
    let prefix = width - 1 - k;
    let mut bits = BitPlane::with_capacity(u64::from(prefix + width));
    for _ in 0..prefix {
        bits.push(false);
    }
    for i in (0..width).rev() {
        bits.push(shifted >> i & 1 == 1);
    }
    Ok(bits)
}

pub fn unary_decode(cursor: &mut BitCursor<'_>) -> Option<u64> {
    let mut n = 0;
    while cursor.read()? {
        n += 1;
    }
    Some(n)
}

pub fn truncated_unary_decode(cursor: &mut BitCursor<'_>, c_max: u64) -> Option<u64> {
    let mut n = 0;
    while n < c_max && cursor.read()? {
        n += 1;
    }
    Some(n)
}

pub fn fixed_length_decode(cursor: &mut BitCursor<'_>, width: u32) -> Option<u64> {
    (0..width).try_fold(0u64, |acc, _| Some(acc << 1 | u64::from(cursor.read()?)))
}

pub fn exp_golomb_decode(cursor: &mut BitCursor<'_>, k: u32) -> Option<u64> {
    let mut prefix = 0u32;
    while !cursor.read()? {
        prefix += 1;
        if prefix + k >= 64 {
            return None;
        }
    }
    let mut shifted = 1u128;
    for _ in 0..prefix + k {
        shifted = shifted << 1 | u128::from(cursor.read()?);
    }
    u64::try_from(shifted - (1u128 << k)).ok()
}

impl Scheme {
    pub fn encode(&self, n: u64) -> Result<BitPlane, BaselineError> {
        match *self {
            Scheme::Unary => Ok(unary_encode(n)),
            Scheme::TruncatedUnary { c_max } => truncated_unary_encode(n, c_max),
            Scheme::FixedLength { width } => fixed_length_encode(n, width),
            Scheme::ExpGolomb { k } => exp_golomb_encode(n, k),
        }
    }

    pub fn decode(&self, cursor: &mut BitCursor<'_>) -> Option<u64> {
        match *self {
            Scheme::Unary => unary_decode(cursor),
            Scheme::TruncatedUnary { c_max } => truncated_unary_decode(cursor, c_max),
            Scheme::FixedLength { width } => fixed_length_decode(cursor, width),
            Scheme::ExpGolomb { k } => exp_golomb_decode(cursor, k),
        }
    }

    /// Codeword length for `n` without materializing it.
    pub fn code_length(&self, n: u64) -> Result<u64, BaselineError> {
        match *self {
            Scheme::Unary => Ok(n + 1),
            Scheme::TruncatedUnary { c_max } => {
                self.encode_check(n <= c_max, n)?;
                Ok(if n == c_max { n } else { n + 1 })
            }
            Scheme::FixedLength { width } => {
                self.encode_check((1..=64).contains(&width), n)?;
                self.encode_check(width == 64 || n >> width == 0, n)?;
                Ok(u64::from(width))
            }
            Scheme::ExpGolomb { k } => {
                self.encode_check(k < 64, n)?;
                let width = u64::from(128 - (u128::from(n) + (1u128 << k)).leading_zeros());
                Ok(2 * width - 1 - u64::from(k))
            }
        }
    }

    fn encode_check(&self, ok: bool, n: u64) -> Result<(), BaselineError> {
        if ok {
            Ok(())
        } else {
            Err(BaselineError::OutOfRange {
                value: n,
                scheme: *self,
            })
        }
    }

    /// The natural parameterization of each scheme for an alphabet of `m`
    /// symbols.
    pub fn all_for_alphabet(m: usize) -> Vec<Scheme> {
        let m = m.max(1) as u64;
        let width = (64 - (m - 1).leading_zeros()).max(1);
        vec![
            Scheme::Unary,
            Scheme::TruncatedUnary { c_max: m - 1 },
            Scheme::FixedLength { width },
            Scheme::ExpGolomb { k: 0 },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Unary => "unary",
            Scheme::TruncatedUnary { .. } => "truncated-unary",
            Scheme::FixedLength { .. } => "fixed-length",
            Scheme::ExpGolomb { .. } => "exp-golomb",
        }
    }
}

/// Codewords for symbol indices `0..size` under one scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordTable {
    scheme: Scheme,
    codewords: Vec<BitPlane>,
}

impl CodewordTable {
    pub fn new(scheme: Scheme, size: u64) -> Result<Self, BaselineError> {
        let codewords = (0..size)
            .map(|n| scheme.encode(n))
            .collect::<Result<_, _>>()?;
        Ok(Self { scheme, codewords })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn codeword(&self, index: usize) -> Option<&BitPlane> {
        self.codewords.get(index)
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// True when no codeword is a prefix of another.
    ///
    /// After sorting lexicographically, any codeword that prefixes another
    /// also prefixes its immediate successor, so adjacent pairs suffice.
    pub fn is_prefix_free(&self) -> bool {
        let mut sorted: Vec<Vec<bool>> = self
            .codewords
            .iter()
            .map(|c| c.iter().collect())
            .collect();
        sorted.sort();
        sorted.windows(2).all(|w| !w[1].starts_with(&w[0]))
    }
}

/// Symbol index assignment for the baselines: position in `order`.
pub fn index_assignment(alphabet: &Alphabet, order: &BinarizationOrder) -> [u64; 256] {
    let mut index = [u64::MAX; 256];
    for (rank, sym) in order.symbols(alphabet).enumerate() {
        index[sym as usize] = rank as u64;
    }
    index
}

/// Average codeword length per symbol when `data` is binarized with
/// `scheme` under the given index assignment.
pub fn bits_per_symbol(
    data: &[u8],
    alphabet: &Alphabet,
    order: &BinarizationOrder,
    scheme: Scheme,
) -> Result<f64, BaselineError> {
    if alphabet.total() == 0 {
        return Ok(0.0);
    }
    let index = index_assignment(alphabet, order);
    let mut total = 0u64;
    for (&sym, &count) in alphabet.symbols().iter().zip(alphabet.counts()) {
        total += scheme.code_length(index[sym as usize])? * count;
    }
    debug_assert_eq!(data.len() as u64, alphabet.total());
    Ok(total as f64 / alphabet.total() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(bits: BitPlane) -> String {
        bits.to_string()
    }

    /// Exp-Golomb codebook built group by group: group `g` holds the
    /// `2^(g+k)` codewords made of `g` zeros, a one, and every `(g+k)`-bit
    /// suffix in ascending order.
    fn exp_golomb_enumerated(k: u32, count: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut g = 0;
        while out.len() < count {
            let suffix_bits = g + k;
            for suffix in 0..(1u64 << suffix_bits) {
                let mut word = "0".repeat(g as usize);
                word.push('1');
                for i in (0..suffix_bits).rev() {
                    word.push(if suffix >> i & 1 == 1 { '1' } else { '0' });
                }
                out.push(word);
                if out.len() == count {
                    break;
                }
            }
            g += 1;
        }
        out
    }

    #[test]
    fn unary_examples() {
        assert_eq!(s(unary_encode(0)), "0");
        assert_eq!(s(unary_encode(1)), "10");
        assert_eq!(s(unary_encode(3)), "1110");
    }

    #[test]
    fn truncated_unary_examples() {
        assert_eq!(s(truncated_unary_encode(2, 3).unwrap()), "110");
        assert_eq!(s(truncated_unary_encode(3, 3).unwrap()), "111");
        assert_eq!(s(truncated_unary_encode(0, 3).unwrap()), "0");
        assert!(matches!(
            truncated_unary_encode(4, 3),
            Err(BaselineError::OutOfRange { value: 4, .. })
        ));
    }

    #[test]
    fn fixed_length_examples() {
        assert_eq!(s(fixed_length_encode(5, 3).unwrap()), "101");
        assert_eq!(s(fixed_length_encode(0, 3).unwrap()), "000");
        assert_eq!(s(fixed_length_encode(7, 3).unwrap()), "111");
        assert!(fixed_length_encode(8, 3).is_err());
        assert!(fixed_length_encode(0, 0).is_err());
        assert_eq!(fixed_length_encode(u64::MAX, 64).unwrap().count_ones(), 64);
    }

    #[test]
    fn exp_golomb_examples() {
        assert_eq!(s(exp_golomb_encode(0, 0).unwrap()), "1");
        assert_eq!(s(exp_golomb_encode(2, 0).unwrap()), "011");
        assert_eq!(s(exp_golomb_encode(1, 1).unwrap()), "11");
        assert_eq!(s(exp_golomb_encode(2, 1).unwrap()), "0100");
    }

    #[test]
    fn exp_golomb_matches_enumerated_codebook() {
        for k in 0..4 {
            let book = exp_golomb_enumerated(k, 64);
            for (n, word) in book.iter().enumerate() {
                assert_eq!(&s(exp_golomb_encode(n as u64, k).unwrap()), word, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn code_length_agrees_with_encoder() {
        for scheme in [
            Scheme::Unary,
            Scheme::TruncatedUnary { c_max: 9 },
            Scheme::FixedLength { width: 4 },
            Scheme::ExpGolomb { k: 0 },
            Scheme::ExpGolomb { k: 3 },
        ] {
            for n in 0..10 {
                assert_eq!(scheme.code_length(n).unwrap(), scheme.encode(n).unwrap().len());
            }
        }
    }

    #[test]
    fn prefix_free_tables() {
        let size = 1 << 10;
        for scheme in [
            Scheme::Unary,
            Scheme::TruncatedUnary { c_max: size - 1 },
            Scheme::FixedLength { width: 10 },
            Scheme::ExpGolomb { k: 0 },
            Scheme::ExpGolomb { k: 2 },
        ] {
            let table = CodewordTable::new(scheme, size).unwrap();
            assert_eq!(table.len(), size as usize);
            assert!(table.is_prefix_free(), "{scheme}");
        }
        // Sanity check that the detector can fail.
        let broken = CodewordTable {
            scheme: Scheme::Unary,
            codewords: vec!["1".parse().unwrap(), "10".parse().unwrap()],
        };
        assert!(!broken.is_prefix_free());
    }

    #[test]
    fn default_parameters_for_alphabets() {
        assert_eq!(
            Scheme::all_for_alphabet(5),
            [
                Scheme::Unary,
                Scheme::TruncatedUnary { c_max: 4 },
                Scheme::FixedLength { width: 3 },
                Scheme::ExpGolomb { k: 0 },
            ]
        );
        assert_eq!(Scheme::all_for_alphabet(256)[2], Scheme::FixedLength { width: 8 });
        assert_eq!(Scheme::all_for_alphabet(1)[2], Scheme::FixedLength { width: 1 });
    }

    #[test]
    fn bits_per_symbol_of_uniform_five() {
        let data: Vec<u8> = (0..500).map(|i| (i % 5) as u8).collect();
        let a = Alphabet::discover(&data);
        let o = BinarizationOrder::by_frequency(&a);
        assert_eq!(bits_per_symbol(&data, &a, &o, Scheme::Unary).unwrap(), 3.0);
        assert_eq!(
            bits_per_symbol(&data, &a, &o, Scheme::TruncatedUnary { c_max: 4 }).unwrap(),
            2.8
        );
        assert_eq!(
            bits_per_symbol(&data, &a, &o, Scheme::FixedLength { width: 3 }).unwrap(),
            3.0
        );
    }
}
