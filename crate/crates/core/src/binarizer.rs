//! Conversion between an m-ary byte stream and its m−1 binary planes.
//!
//! Plane `k` marks, with a 1, every occurrence of symbol `order[k]` in the
//! stream that remains after the symbols `order[0..k]` have been removed.
//! The final symbol would produce an all-ones plane and is never emitted.

use thiserror::Error;

use crate::alphabet::{validate_order, Alphabet, AlphabetError, BinarizationOrder};
use crate::bits::{BitCursor, BitPlane};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinarizeError {
    #[error("byte {symbol:#04x} at position {position} is not in the alphabet")]
    SymbolNotInAlphabet { symbol: u8, position: u64 },
    #[error("alphabet declares {expected} occurrences of {symbol:#04x} but the data has {found}")]
    CountMismatch { symbol: u8, expected: u64, found: u64 },
    #[error("plane {plane} has {found} bits, expected {expected}")]
    PlaneLengthMismatch { plane: usize, expected: u64, found: u64 },
    #[error("expected {expected} planes, found {found}")]
    PlaneCountMismatch { expected: usize, found: usize },
    #[error("plane {plane} ran out of bits at output position {position}")]
    PlaneUnderflow { plane: usize, position: u64 },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// The binary planes of one stream, with the alphabet and order that
/// produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneSet {
    planes: Vec<BitPlane>,
    alphabet: Alphabet,
    order: BinarizationOrder,
}

impl PlaneSet {
    /// Reassembles a plane set from stored parts, recovering symbol counts
    /// from the planes themselves and checking the length chain.
    pub fn from_parts(
        symbols: Vec<u8>,
        order: BinarizationOrder,
        total: u64,
        planes: Vec<BitPlane>,
    ) -> Result<Self, BinarizeError> {
        let m = symbols.len();
        let expected_planes = m.saturating_sub(1);
        if planes.len() != expected_planes {
            return Err(BinarizeError::PlaneCountMismatch {
                expected: expected_planes,
                found: planes.len(),
            });
        }
        let mut counts = vec![0u64; m];
        if m == 1 {
            counts[0] = total;
        } else if m == 0 && total != 0 {
            return Err(BinarizeError::PlaneLengthMismatch {
                plane: 0,
                expected: 0,
                found: total,
            });
        }
        // Placeholder counts only to validate the order shape.
        let shape = Alphabet::new(symbols.clone(), vec![1; m])?;
        validate_order(&shape, &order)?;

        if m >= 2 {
            let mut remaining = total;
            for (k, plane) in planes.iter().enumerate() {
                if plane.len() != remaining {
                    return Err(BinarizeError::PlaneLengthMismatch {
                        plane: k,
                        expected: remaining,
                        found: plane.len(),
                    });
                }
                let ones = plane.count_ones();
                counts[order.as_slice()[k]] = ones;
                remaining -= ones;
            }
            counts[order.as_slice()[m - 1]] = remaining;
        }
        let alphabet = Alphabet::new(symbols, counts)?;
        Ok(Self {
            planes,
            alphabet,
            order,
        })
    }

    pub fn planes(&self) -> &[BitPlane] {
        &self.planes
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn order(&self) -> &BinarizationOrder {
        &self.order
    }

    pub fn into_planes(self) -> Vec<BitPlane> {
        self.planes
    }

    /// Sum of plane lengths.
    pub fn total_bits(&self) -> u64 {
        self.planes.iter().map(BitPlane::len).sum()
    }
}

/// Bit lengths of the emitted planes: `N` minus the counts of the symbols
/// already peeled.
pub fn plane_lengths(alphabet: &Alphabet, order: &BinarizationOrder) -> Vec<u64> {
    let m = alphabet.len();
    let mut remaining = alphabet.total();
    let mut lengths = Vec::with_capacity(m.saturating_sub(1));
    for &i in order.as_slice().iter().take(m.saturating_sub(1)) {
        lengths.push(remaining);
        remaining -= alphabet.counts()[i];
    }
    lengths
}

pub fn binarize(
    data: &[u8],
    alphabet: &Alphabet,
    order: &BinarizationOrder,
) -> Result<PlaneSet, BinarizeError> {
    binarize_counted(data, alphabet, order, &mut 0)
}

pub fn debinarize(planes: &PlaneSet) -> Result<Vec<u8>, BinarizeError> {
    debinarize_counted(planes, &mut 0)
}

/// Rank of each byte value in the peel order, `usize::MAX` if absent.
fn ranks(alphabet: &Alphabet, order: &BinarizationOrder) -> [usize; 256] {
    let mut rank = [usize::MAX; 256];
    for (k, sym) in order.symbols(alphabet).enumerate() {
        rank[sym as usize] = k;
    }
    rank
}

/// `binarize`, adding the number of plane bits written to `work`.
pub(crate) fn binarize_counted(
    data: &[u8],
    alphabet: &Alphabet,
    order: &BinarizationOrder,
    work: &mut u64,
) -> Result<PlaneSet, BinarizeError> {
    validate_order(alphabet, order)?;
    let m = alphabet.len();
    let last = m.saturating_sub(1);
    let rank = ranks(alphabet, order);

    let mut planes: Vec<BitPlane> = plane_lengths(alphabet, order)
        .into_iter()
        .map(BitPlane::with_capacity)
        .collect();
    let mut seen = vec![0u64; m];

    // A byte of rank r is a 0 in planes 0..r and a 1 in plane r; the final
    // symbol is only ever a 0.
    for (position, &b) in data.iter().enumerate() {
        let r = rank[b as usize];
        if r == usize::MAX {
            return Err(BinarizeError::SymbolNotInAlphabet {
                symbol: b,
                position: position as u64,
            });
        }
        seen[r] += 1;
        for plane in &mut planes[..r.min(last)] {
            plane.push(false);
        }
        if r < last {
            planes[r].push(true);
            *work += r as u64 + 1;
        } else {
            *work += last as u64;
        }
    }

    for (k, sym) in order.symbols(alphabet).enumerate() {
        let expected = alphabet.counts()[order.as_slice()[k]];
        if seen[k] != expected {
            return Err(BinarizeError::CountMismatch {
                symbol: sym,
                expected,
                found: seen[k],
            });
        }
    }

    Ok(PlaneSet {
        planes,
        alphabet: alphabet.clone(),
        order: order.clone(),
    })
}

/// `debinarize`, adding the number of plane bits read to `work`.
///
/// One left-to-right pass with a read cursor per plane: at each output
/// position the planes are consulted in peel order until one yields a 1;
/// if none does, the position holds the final symbol.
pub(crate) fn debinarize_counted(
    planes: &PlaneSet,
    work: &mut u64,
) -> Result<Vec<u8>, BinarizeError> {
    let alphabet = &planes.alphabet;
    let m = alphabet.len();
    let total = alphabet.total();
    let peel: Vec<u8> = planes.order.symbols(alphabet).collect();

    let expected = plane_lengths(alphabet, &planes.order);
    for (k, (plane, &len)) in planes.planes.iter().zip(&expected).enumerate() {
        if plane.len() != len {
            return Err(BinarizeError::PlaneLengthMismatch {
                plane: k,
                expected: len,
                found: plane.len(),
            });
        }
    }
    if m <= 1 {
        return Ok(peel.first().map_or_else(Vec::new, |&s| vec![s; total as usize]));
    }

    let last_symbol = peel[m - 1];
    let mut cursors: Vec<BitCursor<'_>> = planes.planes.iter().map(BitPlane::iter).collect();
    let mut out = Vec::with_capacity(total as usize);
    for position in 0..total {
        let mut symbol = last_symbol;
        for (k, cursor) in cursors.iter_mut().enumerate() {
            let bit = cursor
                .read()
                .ok_or(BinarizeError::PlaneUnderflow { plane: k, position })?;
            *work += 1;
            if bit {
                symbol = peel[k];
                break;
            }
        }
        out.push(symbol);
    }

    for (k, cursor) in cursors.iter().enumerate() {
        if cursor.remaining() != 0 {
            return Err(BinarizeError::PlaneLengthMismatch {
                plane: k,
                expected: expected[k],
                found: cursor.position(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::discover_alphabet;
    use proptest::prelude::*;

    const TABLE_INPUT: &[u8] = b"AABCBACBBACCABACB";

    fn planes_for(order: &[u8]) -> PlaneSet {
        let a = discover_alphabet(TABLE_INPUT);
        let o = BinarizationOrder::from_symbols(&a, order).unwrap();
        binarize(TABLE_INPUT, &a, &o).unwrap()
    }

    fn strings(ps: &PlaneSet) -> Vec<String> {
        ps.planes().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn worked_example_abc_and_cab() {
        assert_eq!(
            strings(&planes_for(b"ABC")),
            ["11000100010010100", "10101100101"]
        );
        assert_eq!(
            strings(&planes_for(b"CAB")),
            ["00010010001100010", "110010011010"]
        );
    }

    #[test]
    fn single_symbol_has_no_planes() {
        let a = discover_alphabet(b"ZZZZ");
        let ps = binarize(b"ZZZZ", &a, &BinarizationOrder::identity(1)).unwrap();
        assert!(ps.planes().is_empty());
        assert_eq!(debinarize(&ps).unwrap(), b"ZZZZ");
    }

    #[test]
    fn empty_input_round_trips() {
        let a = discover_alphabet(b"");
        let ps = binarize(b"", &a, &BinarizationOrder::identity(0)).unwrap();
        assert!(ps.planes().is_empty());
        assert_eq!(ps.alphabet().total(), 0);
        assert!(debinarize(&ps).unwrap().is_empty());
    }

    #[test]
    fn two_symbols_give_one_plane() {
        let a = discover_alphabet(b"abba");
        let ps = binarize(b"abba", &a, &BinarizationOrder::identity(2)).unwrap();
        assert_eq!(strings(&ps), ["1001"]);
    }

    #[test]
    fn lengths_for_worked_example() {
        let a = discover_alphabet(TABLE_INPUT);
        let abc = BinarizationOrder::from_symbols(&a, b"ABC").unwrap();
        let cba = BinarizationOrder::from_symbols(&a, b"CBA").unwrap();
        assert_eq!(plane_lengths(&a, &abc), [17, 11]);
        assert_eq!(plane_lengths(&a, &cba), [17, 12]);
        let z = discover_alphabet(b"ZZZZ");
        assert!(plane_lengths(&z, &BinarizationOrder::identity(1)).is_empty());
    }

    #[test]
    fn stale_alphabet_is_rejected() {
        let a = discover_alphabet(b"AAB");
        let o = BinarizationOrder::identity(2);
        assert_eq!(
            binarize(b"AABC", &a, &o),
            Err(BinarizeError::SymbolNotInAlphabet {
                symbol: b'C',
                position: 3
            })
        );
        assert!(matches!(
            binarize(b"ABB", &a, &o),
            Err(BinarizeError::CountMismatch { .. })
        ));
    }

    #[test]
    fn from_parts_recovers_counts() {
        let ps = planes_for(b"BCA");
        let rebuilt = PlaneSet::from_parts(
            ps.alphabet().symbols().to_vec(),
            ps.order().clone(),
            17,
            ps.planes().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, ps);
        assert_eq!(rebuilt.alphabet().counts(), &[6, 6, 5]);
    }

    #[test]
    fn from_parts_rejects_broken_chain() {
        let ps = planes_for(b"ABC");
        let mut planes = ps.planes().to_vec();
        planes[1].push(false);
        assert_eq!(
            PlaneSet::from_parts(b"ABC".to_vec(), ps.order().clone(), 17, planes),
            Err(BinarizeError::PlaneLengthMismatch {
                plane: 1,
                expected: 11,
                found: 12
            })
        );
        assert!(matches!(
            PlaneSet::from_parts(b"ABC".to_vec(), ps.order().clone(), 17, vec![]),
            Err(BinarizeError::PlaneCountMismatch { .. })
        ));
    }

    #[test]
    fn debinarize_detects_length_mismatch() {
        let ps = planes_for(b"ABC");
        let mut bad = ps.clone();
        bad.planes[1] = "1010110010".parse().unwrap();
        assert!(matches!(
            debinarize(&bad),
            Err(BinarizeError::PlaneLengthMismatch { plane: 1, .. })
        ));
    }

    #[test]
    fn work_equals_total_plane_bits() {
        let data: Vec<u8> = (0..5000u32).map(|i| (i * i % 7 + i % 3) as u8).collect();
        let a = discover_alphabet(&data);
        for order in [BinarizationOrder::identity(a.len()), BinarizationOrder::by_frequency(&a)] {
            let mut enc_work = 0;
            let ps = binarize_counted(&data, &a, &order, &mut enc_work).unwrap();
            let mut dec_work = 0;
            let out = debinarize_counted(&ps, &mut dec_work).unwrap();
            assert_eq!(out, data);
            let expected: u64 = plane_lengths(&a, &order).iter().sum();
            assert_eq!(enc_work, expected);
            assert_eq!(dec_work, expected);
            assert_eq!(ps.total_bits(), expected);
        }
    }

    fn data_and_order() -> impl Strategy<Value = (Vec<u8>, Vec<usize>)> {
        (1u16..=256, proptest::collection::vec(any::<u8>(), 0..3000)).prop_flat_map(|(m, raw)| {
            let data: Vec<u8> = raw.into_iter().map(|b| (u16::from(b) % m) as u8).collect();
            let distinct = discover_alphabet(&data).len();
            let perm = Just((0..distinct).collect::<Vec<_>>()).prop_shuffle();
            (Just(data), perm)
        })
    }

    proptest! {
        #[test]
        fn round_trip_and_chain((data, perm) in data_and_order()) {
            let a = discover_alphabet(&data);
            let o = BinarizationOrder::new(perm);
            let ps = binarize(&data, &a, &o).unwrap();
            let lengths: Vec<u64> = ps.planes().iter().map(BitPlane::len).collect();
            prop_assert_eq!(&lengths, &plane_lengths(&a, &o));
            for (k, plane) in ps.planes().iter().enumerate() {
                prop_assert_eq!(plane.count_ones(), a.counts()[o.as_slice()[k]]);
                if k > 0 {
                    let prev = &ps.planes()[k - 1];
                    prop_assert_eq!(plane.len(), prev.len() - prev.count_ones());
                }
            }
            prop_assert_eq!(debinarize(&ps).unwrap(), data);
        }
    }
}
