//! Similarity primitives: cosine similarity, Shannon entropy, rating
//! differences, weighted difference entropy (WDE), and its min-max
//! normalization (NWDE).
//!
//! WDE weights the entropy of the rating-difference distribution between two
//! users by the difference magnitude and by the inverse common-set size;
//! lower WDE means more similar. NWDE flips and rescales it so 1 is most
//! similar and 0 least.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ratings::{Score, UserId};

pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimilarityError {
    #[error("vector lengths differ")]
    LengthMismatch,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("probabilities must lie in [0, 1] and sum to 1")]
    NotADistribution,
    #[error("users share no rated items")]
    EmptyCommonSet,
}

/// Cosine of the angle between two attribute vectors; in `[0, 1]` for
/// nonnegative inputs. `1 - cosine_similarity` is the matching dissimilarity.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, SimilarityError> {
    if u.len() != v.len() {
        return Err(SimilarityError::LengthMismatch);
    }
    let mut dot = 0.0;
    let mut norm_u = 0.0;
    let mut norm_v = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        norm_u += a * a;
        norm_v += b * b;
    }
    if norm_u == 0.0 || norm_v == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    Ok(dot / (libm::sqrt(norm_u) * libm::sqrt(norm_v)))
}

/// Shannon entropy in bits: `Σ p·log2(1/p)` with `0·log 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> Result<f64, SimilarityError> {
    let mut sum = 0.0;
    for &p in probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimilarityError::NotADistribution);
        }
        sum += p;
    }
    if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(SimilarityError::NotADistribution);
    }
    Ok(probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * libm::log2(1.0 / p))
        .sum())
}

/// Componentwise rating differences over a common rated index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffVector {
    pub diffs: Vec<i32>,
}

impl DiffVector {
    /// Size of the common set.
    pub fn n(&self) -> usize {
        self.diffs.len()
    }
}

/// Componentwise `ui - uj` over the common rated set, preserving order.
pub fn rating_diff(ui: &[Score], uj: &[Score]) -> Result<DiffVector, SimilarityError> {
    if ui.len() != uj.len() {
        return Err(SimilarityError::LengthMismatch);
    }
    if ui.is_empty() {
        return Err(SimilarityError::EmptyCommonSet);
    }
    let diffs = ui
        .iter()
        .zip(uj)
        .map(|(&a, &b)| i32::from(a) - i32::from(b))
        .collect();
    Ok(DiffVector { diffs })
}

/// Weighted difference entropy: `(1/n) Σ p(d)·log2(1/p(d))·|d|`, where the
/// sum runs over the distinct difference values and `p(d)` is the empirical
/// frequency of `d` in the vector. Zero iff the difference distribution has
/// no weighted spread; identical rating vectors always give 0.
pub fn weighted_diff_entropy(d: &DiffVector) -> f64 {
    let n = d.n();
    if n == 0 {
        return 0.0;
    }
    let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
    for &value in &d.diffs {
        *counts.entry(value).or_insert(0) += 1;
    }
    let total = n as f64;
    let spread: f64 = counts
        .iter()
        .map(|(&value, &count)| {
            let p = count as f64 / total;
            p * libm::log2(1.0 / p) * libm::fabs(f64::from(value))
        })
        .sum();
    spread / total
}

/// Min-max normalization of WDE values: `(max - w) / (max - min)`, so the
/// minimum-WDE (most similar) user maps to 1 and the maximum to 0. When all
/// inputs are equal there is no discriminating signal and every user maps
/// to 1.
pub fn normalize_wde(wde_values: &BTreeMap<UserId, f64>) -> BTreeMap<UserId, f64> {
    let Some((&min, &max)) = wde_values
        .values()
        .fold(None, |acc: Option<(&f64, &f64)>, w| match acc {
            None => Some((w, w)),
            Some((lo, hi)) => Some((if w < lo { w } else { lo }, if w > hi { w } else { hi })),
        })
    else {
        return BTreeMap::new();
    };
    let range = max - min;
    wde_values
        .iter()
        .map(|(&user, &w)| {
            let nwde = if range == 0.0 { 1.0 } else { (max - w) / range };
            (user, nwde)
        })
        .collect()
}

/// Per-target-user WDE/NWDE values against the rest of a population.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityTable {
    pub target: UserId,
    pub wde: BTreeMap<UserId, f64>,
    pub nwde: BTreeMap<UserId, f64>,
}
