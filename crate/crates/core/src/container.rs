//! The `ECB1` container: header, alphabet, order, and compressed planes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "ECB1" | version u8 | m u16 | symbols m*u8 | order m*u8 | N u64
//!        | plane_count u16 | per plane: bit_len u64, payload_len u64, payload
//! ```
//!
//! Symbol counts are not stored; they follow from the decoded planes.

use thiserror::Error;

use crate::alphabet::BinarizationOrder;
use crate::binarizer::PlaneSet;

pub const MAGIC: [u8; 4] = *b"ECB1";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("bad magic at offset {offset}")]
    BadMagic { offset: usize },
    #[error("unsupported version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u8 },
    #[error("input ends inside {field} at offset {offset}")]
    TruncatedHeader { offset: usize, field: &'static str },
    #[error("alphabet size {m} at offset {offset} exceeds 256")]
    AlphabetTooLarge { offset: usize, m: u16 },
    #[error("duplicate symbol {symbol:#04x} at offset {offset}")]
    DuplicateSymbol { offset: usize, symbol: u8 },
    #[error("order is not a permutation (offset {offset})")]
    InvalidOrder { offset: usize },
    #[error("plane length chain violated at offset {offset}: {reason}")]
    ChainInvariantViolated { offset: usize, reason: String },
    #[error("payload of plane {plane} at offset {offset} runs past the end of input")]
    TruncatedPayload { offset: usize, plane: usize },
    #[error("{count} unexpected trailing bytes at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
}

impl ContainerError {
    /// Byte offset of the offending field, when there is one.
    pub fn offset(&self) -> Option<usize> {
        match *self {
            ContainerError::BadMagic { offset }
            | ContainerError::UnsupportedVersion { offset, .. }
            | ContainerError::TruncatedHeader { offset, .. }
            | ContainerError::AlphabetTooLarge { offset, .. }
            | ContainerError::DuplicateSymbol { offset, .. }
            | ContainerError::InvalidOrder { offset }
            | ContainerError::ChainInvariantViolated { offset, .. }
            | ContainerError::TruncatedPayload { offset, .. }
            | ContainerError::TrailingBytes { offset, .. } => Some(offset),
            ContainerError::InconsistentInput(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneRecord {
    pub bit_len: u64,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcbContainer {
    pub symbols: Vec<u8>,
    pub order: BinarizationOrder,
    pub total: u64,
    pub planes: Vec<PlaneRecord>,
}

impl EcbContainer {
    pub fn header_len(&self) -> usize {
        4 + 1 + 2 + 2 * self.symbols.len() + 8 + 2
    }

    /// Byte offset of plane `k`'s payload within the serialized container.
    pub fn payload_offset(&self, k: usize) -> usize {
        self.header_len()
            + self.planes[..k].iter().map(|p| 16 + p.payload.len()).sum::<usize>()
            + 16
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, ContainerError> {
        let m = self.symbols.len();
        if m > 256 {
            return Err(ContainerError::InconsistentInput(format!("{m} symbols")));
        }
        if self.order.len() != m || self.order.as_slice().iter().any(|&i| i >= m) {
            return Err(ContainerError::InconsistentInput("order does not match symbols".into()));
        }
        let payload_bytes: usize = self.planes.iter().map(|p| 16 + p.payload.len()).sum();
        let mut out = Vec::with_capacity(4 + 1 + 2 + 2 * m + 8 + 2 + payload_bytes);
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(m as u16).to_le_bytes());
        out.extend_from_slice(&self.symbols);
        out.extend(self.order.as_slice().iter().map(|&i| i as u8));
        out.extend_from_slice(&self.total.to_le_bytes());
        let plane_count = u16::try_from(self.planes.len())
            .map_err(|_| ContainerError::InconsistentInput("too many planes".into()))?;
        out.extend_from_slice(&plane_count.to_le_bytes());
        for plane in &self.planes {
            out.extend_from_slice(&plane.bit_len.to_le_bytes());
            out.extend_from_slice(&(plane.payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&plane.payload);
        }
        Ok(out)
    }
}

/// Serializes a plane set with one compressed payload per plane.
pub fn write_container(planes: &PlaneSet, payloads: &[Vec<u8>]) -> Result<Vec<u8>, ContainerError> {
    if payloads.len() != planes.planes().len() {
        return Err(ContainerError::InconsistentInput(format!(
            "{} payloads for {} planes",
            payloads.len(),
            planes.planes().len()
        )));
    }
    let container = EcbContainer {
        symbols: planes.alphabet().symbols().to_vec(),
        order: planes.order().clone(),
        total: planes.alphabet().total(),
        planes: planes
            .planes()
            .iter()
            .zip(payloads)
            .map(|(plane, payload)| PlaneRecord {
                bit_len: plane.len(),
                payload: payload.clone(),
            })
            .collect(),
    };
    container.to_bytes()
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, field: &'static str) -> Result<&'a [u8], ContainerError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.bytes.len())
            .ok_or(ContainerError::TruncatedHeader {
                offset: self.pos,
                field,
            })?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self, field: &'static str) -> Result<u8, ContainerError> {
        Ok(self.take(1, field)?[0])
    }

    fn u16(&mut self, field: &'static str) -> Result<u16, ContainerError> {
        Ok(u16::from_le_bytes(self.take(2, field)?.try_into().unwrap()))
    }

    fn u64(&mut self, field: &'static str) -> Result<u64, ContainerError> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }
}

/// Parses and structurally validates a container.
pub fn read_container(bytes: &[u8]) -> Result<EcbContainer, ContainerError> {
    let mut r = Reader { bytes, pos: 0 };

    if r.take(4, "magic")? != MAGIC {
        return Err(ContainerError::BadMagic { offset: 0 });
    }
    let version_offset = r.pos;
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(ContainerError::UnsupportedVersion {
            offset: version_offset,
            version,
        });
    }

    let m_offset = r.pos;
    let m16 = r.u16("alphabet size")?;
    if m16 > 256 {
        return Err(ContainerError::AlphabetTooLarge {
            offset: m_offset,
            m: m16,
        });
    }
    let m = usize::from(m16);

    let symbols_offset = r.pos;
    let symbols = r.take(m, "symbols")?.to_vec();
    let mut seen = [false; 256];
    for (i, &s) in symbols.iter().enumerate() {
        if std::mem::replace(&mut seen[s as usize], true) {
            return Err(ContainerError::DuplicateSymbol {
                offset: symbols_offset + i,
                symbol: s,
            });
        }
    }

    let order_offset = r.pos;
    let order_bytes = r.take(m, "order")?;
    let mut used = vec![false; m];
    for (i, &idx) in order_bytes.iter().enumerate() {
        let idx = usize::from(idx);
        if idx >= m || std::mem::replace(&mut used[idx], true) {
            return Err(ContainerError::InvalidOrder {
                offset: order_offset + i,
            });
        }
    }
    let order = BinarizationOrder::new(order_bytes.iter().map(|&i| usize::from(i)).collect());

    let total_offset = r.pos;
    let total = r.u64("original length")?;
    let chain = |offset: usize, reason: String| ContainerError::ChainInvariantViolated { offset, reason };
    if m == 0 && total != 0 {
        return Err(chain(total_offset, format!("empty alphabet with length {total}")));
    }
    if m == 1 && total == 0 {
        return Err(chain(total_offset, "one symbol with zero length".into()));
    }

    let count_offset = r.pos;
    let plane_count = usize::from(r.u16("plane count")?);
    if plane_count != m.saturating_sub(1) {
        return Err(chain(
            count_offset,
            format!("{plane_count} planes for {m} symbols"),
        ));
    }

    // Every symbol occurs at least once, so each plane is strictly shorter
    // than the one before and plane k still holds the m - k unpeeled symbols.
    let mut planes = Vec::with_capacity(plane_count);
    let mut previous = None;
    for k in 0..plane_count {
        let len_offset = r.pos;
        let bit_len = r.u64("plane bit length")?;
        let expected_first = (k == 0).then_some(total);
        if let Some(first) = expected_first {
            if bit_len != first {
                return Err(chain(len_offset, format!("first plane has {bit_len} bits, N is {first}")));
            }
        }
        if let Some(prev) = previous {
            if bit_len >= prev {
                return Err(chain(len_offset, format!("plane {k} has {bit_len} bits after {prev}")));
            }
        }
        if bit_len < (m - k) as u64 {
            return Err(chain(
                len_offset,
                format!("plane {k} has {bit_len} bits for {} remaining symbols", m - k),
            ));
        }
        previous = Some(bit_len);

        let payload_len = r.u64("payload length")?;
        let payload_offset = r.pos;
        let payload_len = usize::try_from(payload_len)
            .map_err(|_| ContainerError::TruncatedPayload { offset: payload_offset, plane: k })?;
        let payload = r
            .take(payload_len, "payload")
            .map_err(|_| ContainerError::TruncatedPayload { offset: payload_offset, plane: k })?
            .to_vec();
        planes.push(PlaneRecord { bit_len, payload });
    }

    if r.pos != bytes.len() {
        return Err(ContainerError::TrailingBytes {
            offset: r.pos,
            count: bytes.len() - r.pos,
        });
    }

    Ok(EcbContainer {
        symbols,
        order,
        total,
        planes,
    })
}
