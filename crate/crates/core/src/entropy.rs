//! Empirical entropies and the plane-entropy conservation check.
//!
//! All entropies are base 2. Probabilities are the exact empirical
//! frequencies `count / total` evaluated in double precision.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{validate_order, Alphabet, AlphabetError, BinarizationOrder};
use crate::binarizer::plane_lengths;

/// Default conservation tolerance in bits per symbol.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("entropy of an empty input is undefined")]
    EmptyInput,
    #[error("value {0} outside the valid domain")]
    DomainError(f64),
    #[error(transparent)]
    Order(#[from] AlphabetError),
}

/// Source entropy next to the weighted sum of the emitted planes' binary
/// entropies.
///
/// `plane_weights[k]` is the fraction of the stream still present when plane
/// `k` is formed, and `plane_entropies[k]` the binary entropy of that plane's
/// conditional probability. The final symbol's all-ones plane is not listed;
/// it would contribute `weight × H(1) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_source: f64,
    pub plane_weights: Vec<f64>,
    pub plane_entropies: Vec<f64>,
    pub h_weighted_sum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conservation {
    Holds { residual: f64 },
    Violated { residual: f64 },
}

impl Conservation {
    pub fn holds(&self) -> bool {
        matches!(self, Conservation::Holds { .. })
    }

    pub fn residual(&self) -> f64 {
        match *self {
            Conservation::Holds { residual } | Conservation::Violated { residual } => residual,
        }
    }
}

/// Shannon entropy of the alphabet's empirical distribution.
pub fn mary_entropy(alphabet: &Alphabet) -> Result<f64, EntropyError> {
    let total = alphabet.total();
    if total == 0 {
        return Err(EntropyError::EmptyInput);
    }
    let n = total as f64;
    Ok(alphabet
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

pub fn binary_entropy(p: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EntropyError::DomainError(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    Ok(-p * p.log2() - q * q.log2())
}

pub fn weighted_plane_entropy(
    alphabet: &Alphabet,
    order: &BinarizationOrder,
) -> Result<EntropyReport, EntropyError> {
    let h_source = mary_entropy(alphabet)?;
    validate_order(alphabet, order)?;
    let n = alphabet.total() as f64;

    let lengths = plane_lengths(alphabet, order);
    let mut plane_weights = Vec::with_capacity(lengths.len());
    let mut plane_entropies = Vec::with_capacity(lengths.len());
    for (&len, &index) in lengths.iter().zip(order.as_slice()) {
        let ones = alphabet.counts()[index];
        plane_weights.push(len as f64 / n);
        plane_entropies.push(binary_entropy(ones as f64 / len as f64)?);
    }
    let h_weighted_sum = plane_weights
        .iter()
        .zip(&plane_entropies)
        .map(|(w, h)| w * h)
        .sum::<f64>();

    Ok(EntropyReport {
        h_source,
        residual: (h_source - h_weighted_sum).abs(),
        plane_weights,
        plane_entropies,
        h_weighted_sum,
    })
}

pub fn verify_conservation(
    alphabet: &Alphabet,
    order: &BinarizationOrder,
    tol: f64,
) -> Result<Conservation, EntropyError> {
    if !(tol > 0.0) {
        return Err(EntropyError::DomainError(tol));
    }
    let residual = weighted_plane_entropy(alphabet, order)?.residual;
    Ok(if residual <= tol {
        Conservation::Holds { residual }
    } else {
        Conservation::Violated { residual }
    })
}

/// Total number of plane bits the binarizer emits for this order.
pub fn predicted_total_bits(alphabet: &Alphabet, order: &BinarizationOrder) -> u64 {
    plane_lengths(alphabet, order).iter().sum()
}
