//! End-to-end compression: discover the alphabet, binarize, code each plane,
//! and wrap everything in a container.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::alphabet::{discover_alphabet, Alphabet, AlphabetError, BinarizationOrder};
use crate::binarizer::{binarize, debinarize, BinarizeError, PlaneSet};
use crate::bincoder::{decode_plane, encode_plane, CoderError};
use crate::bits::BitPlane;
use crate::container::{read_container, write_container, ContainerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error(transparent)]
    Order(#[from] AlphabetError),
    #[error(transparent)]
    Binarize(#[from] BinarizeError),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("plane {plane} (payload at offset {offset}): {source}")]
    Coder {
        plane: usize,
        offset: usize,
        source: CoderError,
    },
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

/// How the binarization order is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// Descending count, ties by first occurrence.
    #[default]
    Frequency,
    FirstSeen,
    /// Every discovered symbol, listed once, in peel order.
    Explicit(Vec<u8>),
}

impl OrderPolicy {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<BinarizationOrder, AlphabetError> {
        match self {
            OrderPolicy::Frequency => Ok(BinarizationOrder::by_frequency(alphabet)),
            OrderPolicy::FirstSeen => Ok(BinarizationOrder::identity(alphabet.len())),
            OrderPolicy::Explicit(symbols) => BinarizationOrder::from_symbols(alphabet, symbols),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid order policy {0:?}: expected freq, first-seen, or explicit:<symbols>")]
pub struct ParseOrderPolicyError(String);

impl FromStr for OrderPolicy {
    type Err = ParseOrderPolicyError;

    /// Accepts `freq`, `first-seen`, or `explicit:` followed by a comma list.
    /// A one-character item is that character's byte; longer items are
    /// decimal or `0x`-prefixed hex byte values.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "freq" => return Ok(OrderPolicy::Frequency),
            "first-seen" => return Ok(OrderPolicy::FirstSeen),
            _ => {}
        }
        let err = || ParseOrderPolicyError(s.to_owned());
        let list = s.strip_prefix("explicit:").ok_or_else(err)?;
        if list.is_empty() {
            return Ok(OrderPolicy::Explicit(Vec::new()));
        }
        list.split(',')
            .map(|item| {
                let mut chars = item.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii() => Ok(c as u8),
                    _ => match item.strip_prefix("0x").or_else(|| item.strip_prefix("0X")) {
                        Some(hex) => u8::from_str_radix(hex, 16).map_err(|_| err()),
                        None => item.parse::<u8>().map_err(|_| err()),
                    },
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(OrderPolicy::Explicit)
    }
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderPolicy::Frequency => f.write_str("freq"),
            OrderPolicy::FirstSeen => f.write_str("first-seen"),
            OrderPolicy::Explicit(symbols) => {
                f.write_str("explicit:")?;
                for (i, s) in symbols.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s:#04x}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeSummary {
    pub input_len: u64,
    pub alphabet_size: usize,
    pub order: Vec<u8>,
    pub plane_bits: u64,
    pub compressed_len: u64,
}

impl fmt::Display for EncodeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} m={} order=[{}] plane_bits={} compressed_bytes={}",
            self.input_len,
            self.alphabet_size,
            self.order
                .iter()
                .map(|s| format!("{s:#04x}"))
                .collect::<Vec<_>>()
                .join(","),
            self.plane_bits,
            self.compressed_len
        )
    }
}

/// Runs `f` on a pool of `threads` workers, or inline for one thread.
fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CodecError> {
    if threads <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CodecError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn compress_planes(planes: &[BitPlane], threads: usize) -> Result<Vec<Vec<u8>>, CodecError> {
    with_threads(threads, || planes.par_iter().map(encode_plane).collect())
}

/// Compresses `data` into a container. Output bytes do not depend on
/// `threads`.
pub fn encode(
    data: &[u8],
    policy: &OrderPolicy,
    threads: usize,
) -> Result<(Vec<u8>, EncodeSummary), CodecError> {
    let alphabet = discover_alphabet(data);
    let order = policy.resolve(&alphabet)?;
    let planes = binarize(data, &alphabet, &order)?;
    let payloads = compress_planes(planes.planes(), threads)?;
    let bytes = write_container(&planes, &payloads)?;
    let summary = EncodeSummary {
        input_len: alphabet.total(),
        alphabet_size: alphabet.len(),
        order: order.symbols(&alphabet).collect(),
        plane_bits: planes.total_bits(),
        compressed_len: bytes.len() as u64,
    };
    log::debug!("encoded {summary}");
    Ok((bytes, summary))
}

/// Parses a container and decodes its planes without de-binarizing.
pub fn decode_planes(bytes: &[u8], threads: usize) -> Result<PlaneSet, CodecError> {
    let container = read_container(bytes)?;
    let planes = with_threads(threads, || {
        container
            .planes
            .par_iter()
            .enumerate()
            .map(|(k, record)| {
                decode_plane(&record.payload, record.bit_len).map_err(|source| CodecError::Coder {
                    plane: k,
                    offset: container.payload_offset(k),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    Ok(PlaneSet::from_parts(
        container.symbols,
        container.order,
        container.total,
        planes,
    )?)
}

pub fn decode(bytes: &[u8], threads: usize) -> Result<Vec<u8>, CodecError> {
    let planes = decode_planes(bytes, threads)?;
    Ok(debinarize(&planes)?)
}
