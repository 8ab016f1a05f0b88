//! Symbol alphabets and binarization orders.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("symbol {0:#04x} appears more than once in the alphabet")]
    DuplicateSymbol(u8),
    #[error("symbol {0:#04x} has a zero count")]
    ZeroCount(u8),
    #[error("{symbols} symbols but {counts} counts")]
    LengthMismatch { symbols: usize, counts: usize },
    #[error("order is not a permutation of 0..{m}: {reason}")]
    NotAPermutation { m: usize, reason: String },
}

/// The distinct byte symbols of a stream together with their occurrence
/// counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    counts: Vec<u64>,
    total: u64,
}

impl Alphabet {
    /// Builds an alphabet from explicit symbols and counts. Symbols must be
    /// distinct and every count positive.
    pub fn new(symbols: Vec<u8>, counts: Vec<u64>) -> Result<Self, AlphabetError> {
        if symbols.len() != counts.len() {
            return Err(AlphabetError::LengthMismatch {
                symbols: symbols.len(),
                counts: counts.len(),
            });
        }
        let mut seen = [false; 256];
        for (&s, &c) in symbols.iter().zip(&counts) {
            if std::mem::replace(&mut seen[s as usize], true) {
                return Err(AlphabetError::DuplicateSymbol(s));
            }
            if c == 0 {
                return Err(AlphabetError::ZeroCount(s));
            }
        }
        let total = counts.iter().sum();
        Ok(Self {
            symbols,
            counts,
            total,
        })
    }

    /// Tallies `data`, listing symbols in order of first occurrence.
    pub fn discover(data: &[u8]) -> Self {
        let mut tally = [0u64; 256];
        let mut first_seen = Vec::new();
        for &b in data {
            if tally[b as usize] == 0 {
                first_seen.push(b);
            }
            tally[b as usize] += 1;
        }
        let counts = first_seen.iter().map(|&s| tally[s as usize]).collect();
        Self {
            symbols: first_seen,
            counts,
            total: data.len() as u64,
        }
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of distinct symbols, `m`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Stream length `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn index_of(&self, symbol: u8) -> Option<usize> {
        self.symbols.iter().position(|&s| s == symbol)
    }

    /// Empirical probability of the symbol at `index`.
    pub fn probability(&self, index: usize) -> f64 {
        self.counts[index] as f64 / self.total as f64
    }
}

/// Peel order for binarization: `sequence[k]` is the alphabet index of the
/// symbol isolated by plane `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarizationOrder {
    sequence: Vec<usize>,
}

impl BinarizationOrder {
    /// Wraps a sequence without checking it; see [`validate_order`].
    pub fn new(sequence: Vec<usize>) -> Self {
        Self { sequence }
    }

    pub fn identity(m: usize) -> Self {
        Self::new((0..m).collect())
    }

    /// Descending count, ties broken by first occurrence.
    pub fn by_frequency(alphabet: &Alphabet) -> Self {
        let mut sequence: Vec<usize> = (0..alphabet.len()).collect();
        // Stable sort keeps first-occurrence order among equal counts.
        sequence.sort_by(|&a, &b| alphabet.counts[b].cmp(&alphabet.counts[a]));
        Self { sequence }
    }

    /// Order given as symbol values; every alphabet symbol must appear once.
    pub fn from_symbols(alphabet: &Alphabet, symbols: &[u8]) -> Result<Self, AlphabetError> {
        let m = alphabet.len();
        let sequence = symbols
            .iter()
            .map(|&s| {
                alphabet
                    .index_of(s)
                    .ok_or_else(|| AlphabetError::NotAPermutation {
                        m,
                        reason: format!("symbol {s:#04x} is not in the alphabet"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let order = Self { sequence };
        validate_order(alphabet, &order)?;
        Ok(order)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Symbol values in peel order.
    pub fn symbols<'a>(&'a self, alphabet: &'a Alphabet) -> impl Iterator<Item = u8> + 'a {
        self.sequence.iter().map(move |&i| alphabet.symbols[i])
    }
}

pub fn discover_alphabet(data: &[u8]) -> Alphabet {
    Alphabet::discover(data)
}

pub fn order_by_frequency(alphabet: &Alphabet) -> BinarizationOrder {
    BinarizationOrder::by_frequency(alphabet)
}

/// Checks that `order` is a permutation of `0..alphabet.len()`.
pub fn validate_order(alphabet: &Alphabet, order: &BinarizationOrder) -> Result<(), AlphabetError> {
    let m = alphabet.len();
    if order.len() != m {
        return Err(AlphabetError::NotAPermutation {
            m,
            reason: format!("length {} differs from alphabet size", order.len()),
        });
    }
    let mut seen = vec![false; m];
    for &i in order.as_slice() {
        if i >= m {
            return Err(AlphabetError::NotAPermutation {
                m,
                reason: format!("index {i} out of range"),
            });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(AlphabetError::NotAPermutation {
                m,
                reason: format!("index {i} repeated"),
            });
        }
    }
    Ok(())
}
