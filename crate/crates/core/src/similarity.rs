//! Observation-level similarity matrices and their content-addressed cache.
//!
//! All four measures compare ROWS of the data matrix. Pearson and Spearman
//! rows with zero variance have undefined correlation; those entries are
//! replaced with 0 off the diagonal and 1 on it, and the caller is told how
//! many entries were touched so it can log the fact.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::log::DecisionLog;
use crate::types::{DataMatrix, SimilarityMatrix, SimilarityMethod};

/// SHA-256 digest of a matrix' shape and contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixFingerprint([u8; 32]);

impl MatrixFingerprint {
    pub fn bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for MatrixFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Hashes `rows` and `cols` as little-endian u64 followed by every value as a
/// little-endian IEEE-754 double in row-major order.
pub fn fingerprint_values(rows: usize, cols: usize, values: impl IntoIterator<Item = f64>) -> MatrixFingerprint {
    let mut h = Sha256::new();
    h.update((rows as u64).to_le_bytes());
    h.update((cols as u64).to_le_bytes());
    for v in values {
        h.update(v.to_le_bytes());
    }
    let digest = h.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    MatrixFingerprint(out)
}

pub fn fingerprint(m: &DataMatrix) -> MatrixFingerprint {
    fingerprint_values(m.n_rows(), m.n_cols(), m.values().iter().copied())
}

/// Fingerprint of a label vector, hashed as an `n x 1` matrix.
pub fn fingerprint_labels(labels: &[usize]) -> MatrixFingerprint {
    fingerprint_values(labels.len(), 1, labels.iter().map(|&l| l as f64))
}

/// Rows with mean removed and scaled to unit norm; `None` for zero-variance rows.
fn unit_centered_rows(rows: impl Iterator<Item = Vec<f64>>) -> Vec<Option<Vec<f64>>> {
    rows.map(|mut r| {
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter_mut().for_each(|v| *v -= mean);
        normalize(r)
    })
    .collect()
}

fn normalize(mut r: Vec<f64>) -> Option<Vec<f64>> {
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    r.iter_mut().for_each(|v| *v /= norm);
    Some(r)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric matrix from an upper-triangle pair function; the diagonal is fixed to 1.
/// Every entry is evaluated as `pair(min, max)` so the result is exactly symmetric.
fn symmetric_from_pairs(n: usize, pair: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    if n == 0 {
        return out;
    }
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = match i.cmp(&j) {
                std::cmp::Ordering::Equal => 1.0,
                std::cmp::Ordering::Less => pair(i, j),
                std::cmp::Ordering::Greater => pair(j, i),
            };
        }
    });
    out
}

/// Correlation-style matrix over normalized rows. Returns the matrix values
/// and the number of undefined entries that were sanitized.
fn correlation_of(units: &[Option<Vec<f64>>]) -> (Vec<f64>, usize) {
    let n = units.len();
    let values = symmetric_from_pairs(n, |i, j| match (&units[i], &units[j]) {
        (Some(a), Some(b)) => dot(a, b).clamp(-1.0, 1.0),
        _ => 0.0,
    });
    let degenerate = units.iter().filter(|u| u.is_none()).count();
    // every pair touching a degenerate row is undefined
    let sanitized = if degenerate == 0 {
        0
    } else {
        n * n - (n - degenerate) * (n - degenerate) - degenerate
    };
    (values, sanitized)
}

/// Midranks (1-based) of a slice; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson_raw(x: &DataMatrix) -> (Vec<f64>, usize) {
    let n = x.n_rows();
    if x.n_cols() < 2 {
        return (vec![1.0; n * n], 0);
    }
    correlation_of(&unit_centered_rows(x.rows().map(|r| r.to_vec())))
}

fn spearman_raw(x: &DataMatrix) -> (Vec<f64>, usize) {
    let n = x.n_rows();
    if x.n_cols() < 2 {
        return (vec![1.0; n * n], 0);
    }
    correlation_of(&unit_centered_rows(x.rows().map(average_ranks)))
}

fn rbf_raw(x: &DataMatrix, gamma: f64) -> Vec<f64> {
    symmetric_from_pairs(x.n_rows(), |i, j| {
        let sq: f64 = x
            .row(i)
            .iter()
            .zip(x.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        // keep entries strictly positive when the exponential underflows
        (-gamma * sq).exp().max(f64::MIN_POSITIVE)
    })
}

fn cosine_raw(x: &DataMatrix) -> Vec<f64> {
    let units: Vec<Option<Vec<f64>>> = x.rows().map(|r| normalize(r.to_vec())).collect();
    correlation_of(&units).0
}

/// Pearson correlation between rows. Fewer than two features gives the all-ones matrix.
pub fn pearson_similarity(x: &DataMatrix) -> SimilarityMatrix {
    SimilarityMatrix::from_parts(x.n_rows(), pearson_raw(x).0, Some(SimilarityMethod::Correlation))
}

/// Pearson correlation of within-row midrank vectors.
pub fn spearman_similarity(x: &DataMatrix) -> SimilarityMatrix {
    SimilarityMatrix::from_parts(x.n_rows(), spearman_raw(x).0, Some(SimilarityMethod::Spearman))
}

/// `exp(-gamma * ||x_i - x_j||^2)`.
pub fn rbf_similarity(x: &DataMatrix, gamma: f64) -> SimilarityMatrix {
    SimilarityMatrix::from_parts(x.n_rows(), rbf_raw(x, gamma), Some(SimilarityMethod::Kernel))
}

/// Cosine of the angle between rows; a zero row is similar only to itself.
pub fn cosine_similarity(x: &DataMatrix) -> SimilarityMatrix {
    SimilarityMatrix::from_parts(x.n_rows(), cosine_raw(x), Some(SimilarityMethod::Cosine))
}

/// Computes `method` on `x`, returning the matrix and the count of sanitized entries.
pub fn compute_similarity(x: &DataMatrix, method: SimilarityMethod, gamma: f64) -> (SimilarityMatrix, usize) {
    let n = x.n_rows();
    let (values, sanitized) = match method {
        SimilarityMethod::Correlation => pearson_raw(x),
        SimilarityMethod::Spearman => spearman_raw(x),
        SimilarityMethod::Kernel => (rbf_raw(x, gamma), 0),
        SimilarityMethod::Cosine => (cosine_raw(x), 0),
    };
    (SimilarityMatrix::from_parts(n, values, Some(method)), sanitized)
}

type CacheKey = (MatrixFingerprint, SimilarityMethod);

/// Similarity matrices keyed by data fingerprint and method.
///
/// Readers run concurrently; two workers may race to insert the same key,
/// which is harmless because the value is deterministic.
#[derive(Debug, Default)]
pub struct SimilarityCache {
    map: RwLock<HashMap<CacheKey, Arc<SimilarityMatrix>>>,
    hits: AtomicU64,
    misses: AtomicU64,
    gamma_bits: AtomicU64,
}

impl SimilarityCache {
    pub fn new() -> Self {
        Self::with_gamma(1.0)
    }

    /// Cache whose kernel entries use the given RBF width.
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma_bits: AtomicU64::new(gamma.to_bits()),
            ..Default::default()
        }
    }

    pub fn gamma(&self) -> f64 {
        let g = f64::from_bits(self.gamma_bits.load(Ordering::Relaxed));
        if g > 0.0 {
            g
        } else {
            1.0
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    /// Number of matrices actually computed.
    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_similarity(&self, x: &DataMatrix, method: SimilarityMethod, log: &DecisionLog) -> Arc<SimilarityMatrix> {
        let key = (fingerprint(x), method);
        if let Some(m) = self.map.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            log.push(format!("Retrieved {method} similarity matrix from cache."));
            return Arc::clone(m);
        }
        let (matrix, sanitized) = compute_similarity(x, method, self.gamma());
        self.misses.fetch_add(1, Ordering::Relaxed);
        if sanitized > 0 {
            log.push(format!(
                "Sanitized {sanitized} undefined {method} similarity entries (zero-variance rows)."
            ));
        }
        let matrix = Arc::new(matrix);
        self.map
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .entry(key)
            .or_insert_with(|| Arc::clone(&matrix));
        log.push(format!("Computed and cached {method} similarity matrix."));
        matrix
    }
}
