//! Synthetic sources and the bit-count / timing harness behind `ecbin bench`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::alphabet::{discover_alphabet, BinarizationOrder};
use crate::baselines::{bits_per_symbol, BaselineError, Scheme};
use crate::codec::{decode, encode, CodecError, OrderPolicy};
use crate::entropy::{mary_entropy, weighted_plane_entropy, EntropyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("invalid distribution {0:?}")]
    BadDistribution(String),
    #[error("alphabet size must be in 1..=256, got {0}")]
    BadAlphabetSize(usize),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("round trip mismatch for {distribution} at size {size}")]
    RoundTrip { distribution: String, size: u64 },
}

/// Symbol distributions over indices `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Uniform,
    /// `p (1-p)^i`, with the tail mass folded into the last symbol.
    Geometric(f64),
    /// Proportional to `1 / (i+1)^s`.
    Zipf(f64),
    /// Symbols 0 and 1 share mass `p` equally; the rest share `1 - p`.
    TwoSpike(f64),
    /// Explicit weights, normalized on use.
    Weights(Vec<f64>),
}

impl Distribution {
    pub fn probabilities(&self, m: usize) -> Vec<f64> {
        assert!((1..=256).contains(&m), "alphabet size {m}");
        let raw: Vec<f64> = match self {
            Distribution::Uniform => vec![1.0; m],
            Distribution::Geometric(p) => {
                let mut w: Vec<f64> = (0..m - 1).map(|i| p * (1.0 - p).powi(i as i32)).collect();
                w.push((1.0 - p).powi(m as i32 - 1));
                w
            }
            Distribution::Zipf(s) => (0..m).map(|i| ((i + 1) as f64).powf(-s)).collect(),
            Distribution::TwoSpike(p) => match m {
                1 => vec![1.0],
                2 => vec![1.0, 1.0],
                _ => {
                    let mut w = vec![p / 2.0, p / 2.0];
                    w.extend(std::iter::repeat((1.0 - p) / (m - 2) as f64).take(m - 2));
                    w
                }
            },
            Distribution::Weights(w) => {
                let mut w = w.clone();
                w.resize(m, 0.0);
                w
            }
        };
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / sum).collect()
    }

    /// Entropy in bits of `probabilities(m)`.
    pub fn entropy(&self, m: usize) -> f64 {
        self.probabilities(m)
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform => f.write_str("uniform"),
            Distribution::Geometric(p) => write!(f, "geometric:{p}"),
            Distribution::Zipf(s) => write!(f, "zipf:{s}"),
            Distribution::TwoSpike(p) => write!(f, "twospike:{p}"),
            Distribution::Weights(w) => write!(f, "weights:{}", w.len()),
        }
    }
}

impl FromStr for Distribution {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || BenchError::BadDistribution(s.to_owned());
        if s == "uniform" {
            return Ok(Distribution::Uniform);
        }
        let (kind, param) = s.split_once(':').ok_or_else(err)?;
        let value: f64 = param.parse().map_err(|_| err())?;
        let probability = |v: f64| if v > 0.0 && v < 1.0 { Ok(v) } else { Err(err()) };
        match kind {
            "geometric" => Ok(Distribution::Geometric(probability(value)?)),
            "twospike" => Ok(Distribution::TwoSpike(probability(value)?)),
            "zipf" if value.is_finite() && value >= 0.0 => Ok(Distribution::Zipf(value)),
            _ => Err(err()),
        }
    }
}

/// `len` i.i.d. symbols drawn from `probabilities`, symbol `i` written as
/// byte `i`.
pub fn sample(probabilities: &[f64], len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = WeightedIndex::new(probabilities).expect("valid weights");
    (0..len).map(|_| index.sample(&mut rng) as u8).collect()
}

/// Best-of-`reps` wall time for a full encode and a full decode of `data`.
pub fn time_codec(
    data: &[u8],
    policy: &OrderPolicy,
    threads: usize,
    reps: usize,
) -> Result<(Duration, Duration), CodecError> {
    let mut best_encode = Duration::MAX;
    let mut best_decode = Duration::MAX;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let (bytes, _) = encode(data, policy, threads)?;
        best_encode = best_encode.min(start.elapsed());

        let start = Instant::now();
        let decoded = decode(&bytes, threads)?;
        best_decode = best_decode.min(start.elapsed());
        debug_assert_eq!(decoded, data);
    }
    Ok((best_encode, best_decode))
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<u64>,
    pub distributions: Vec<Distribution>,
    pub alphabet_size: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub order: OrderPolicy,
    pub threads: usize,
    /// Measure encode/decode wall time. Off by default so output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1 << 20, 1 << 21, 1 << 22],
            distributions: vec![
                Distribution::Uniform,
                Distribution::Geometric(0.5),
                Distribution::Zipf(1.0),
                Distribution::TwoSpike(0.9),
            ],
            alphabet_size: 16,
            repetitions: 3,
            seed: 0,
            order: OrderPolicy::Frequency,
            threads: 1,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scheme: String,
    pub distribution: String,
    pub size: u64,
    pub bits_per_symbol: f64,
    pub source_entropy: f64,
    pub ratio: Option<f64>,
    pub encode_seconds: Option<f64>,
    pub decode_seconds: Option<f64>,
}

fn derive_seed(seed: u64, dist: usize, size: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((dist as u64) << 40) ^ size);
    rng.next_u64()
}

/// Runs every (distribution, size) pair and reports, per scheme, the bits
/// spent per source symbol against the empirical source entropy.
///
/// Scheme rows: `ecb` is the actual container size; `ecb-planes` is the
/// weighted plane entropy (an ideal coder on each plane); the rest are the
/// classical codes measured by raw codeword length.
pub fn run(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    let m = config.alphabet_size;
    if !(1..=256).contains(&m) {
        return Err(BenchError::BadAlphabetSize(m));
    }
    let mut rows = Vec::new();
    for (d, dist) in config.distributions.iter().enumerate() {
        let probabilities = dist.probabilities(m);
        for &size in &config.sizes {
            let data = sample(&probabilities, size as usize, derive_seed(config.seed, d, size));
            let alphabet = discover_alphabet(&data);
            let n = size.max(1) as f64;
            let entropy = if size == 0 { 0.0 } else { mary_entropy(&alphabet)? };
            let ratio = |bits: f64| (entropy > 0.0).then(|| bits / entropy);
            let row = |scheme: &str, bits: f64| BenchRow {
                scheme: scheme.to_owned(),
                distribution: dist.to_string(),
                size,
                bits_per_symbol: bits,
                source_entropy: entropy,
                ratio: ratio(bits),
                encode_seconds: None,
                decode_seconds: None,
            };

            let (bytes, _) = encode(&data, &config.order, config.threads)?;
            if decode(&bytes, config.threads)? != data {
                return Err(BenchError::RoundTrip {
                    distribution: dist.to_string(),
                    size,
                });
            }
            let mut ecb = row("ecb", bytes.len() as f64 * 8.0 / n);
            if config.timing {
                let (enc, dec) =
                    time_codec(&data, &config.order, config.threads, config.repetitions)?;
                ecb.encode_seconds = Some(enc.as_secs_f64());
                ecb.decode_seconds = Some(dec.as_secs_f64());
            }
            rows.push(ecb);

            let order = config.order.resolve(&alphabet).map_err(CodecError::from)?;
            if size > 0 {
                let report = weighted_plane_entropy(&alphabet, &order)?;
                rows.push(row("ecb-planes", report.h_weighted_sum));
            }

            // Baselines index symbols by descending frequency.
            let by_freq = BinarizationOrder::by_frequency(&alphabet);
            for scheme in Scheme::all_for_alphabet(m) {
                let bits = bits_per_symbol(&data, &alphabet, &by_freq, scheme)?;
                rows.push(row(scheme.name(), bits));
            }
        }
    }
    Ok(rows)
}
