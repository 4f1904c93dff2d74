//! Shared domain types: data matrices, similarity matrices and cluster labels.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinexError};

/// Dense row-major matrix of finite reals: `n_rows` observations by `n_cols` features.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl DataMatrix {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(SpinexError::EmptyMatrix {
                rows: n_rows,
                cols: n_cols,
            });
        }
        if values.len() != n_rows * n_cols {
            return Err(SpinexError::ShapeMismatch {
                rows: n_rows,
                cols: n_cols,
                expected: n_rows * n_cols,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpinexError::NonFinite {
                row: pos / n_cols,
                col: pos % n_cols,
                value: values[pos],
            });
        }
        Ok(Self {
            values,
            n_rows,
            n_cols,
        })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(SpinexError::ShapeMismatch {
                    rows: n_rows,
                    cols: n_cols,
                    expected: n_cols,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(n_rows, n_cols, values)
    }

    /// Treats a 1-d sequence as an `n x 1` column.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    /// Accepts an array of arbitrary rank given as `shape` plus row-major values.
    /// Rank 1 is reshaped to a single column; rank above 2 is rejected.
    pub fn from_shape(shape: &[usize], values: Vec<f64>) -> Result<Self> {
        match shape {
            [n] => Self::new(*n, 1, values),
            [n, d] => Self::new(*n, *d, values),
            _ => Err(SpinexError::Dimensionality),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    /// Copies the given rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.n_cols, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.n_rows, self.n_cols, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// The four observation-level similarity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMethod {
    /// Pearson correlation between rows.
    Correlation,
    /// Spearman rank correlation between rows.
    Spearman,
    /// Gaussian RBF kernel.
    Kernel,
    Cosine,
}

impl SimilarityMethod {
    pub const ALL: [SimilarityMethod; 4] = [
        SimilarityMethod::Correlation,
        SimilarityMethod::Spearman,
        SimilarityMethod::Kernel,
        SimilarityMethod::Cosine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityMethod::Correlation => "correlation",
            SimilarityMethod::Spearman => "spearman",
            SimilarityMethod::Kernel => "kernel",
            SimilarityMethod::Cosine => "cosine",
        }
    }
}

impl fmt::Display for SimilarityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimilarityMethod {
    type Err = SpinexError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "correlation" | "pearson" => Ok(SimilarityMethod::Correlation),
            "spearman" => Ok(SimilarityMethod::Spearman),
            "kernel" | "rbf" => Ok(SimilarityMethod::Kernel),
            "cosine" => Ok(SimilarityMethod::Cosine),
            _ => Err(SpinexError::InvalidMethod(s.to_string())),
        }
    }
}

/// Square `n x n` matrix of finite similarity scores.
///
/// `method` is `None` for matrices that were not produced by one of the
/// four similarity measures (condensed multi-level matrices, test fixtures).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: Vec<f64>,
    n: usize,
    method: Option<SimilarityMethod>,
}

impl SimilarityMatrix {
    pub fn new(n: usize, values: Vec<f64>, method: Option<SimilarityMethod>) -> Result<Self> {
        if values.len() != n * n {
            return Err(SpinexError::ShapeMismatch {
                rows: n,
                cols: n,
                expected: n * n,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpinexError::NonFinite {
                row: pos / n.max(1),
                col: pos % n.max(1),
                value: values[pos],
            });
        }
        Ok(Self { values, n, method })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(SpinexError::ShapeMismatch {
                    rows: n,
                    cols: n,
                    expected: n,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(n, values, None)
    }

    /// Builds a matrix with `f(i, j)` at every position.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self::new(n, values, None)
    }

    /// Constructor for already validated values.
    pub(crate) fn from_parts(n: usize, values: Vec<f64>, method: Option<SimilarityMethod>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        Self { values, n, method }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> Option<SimilarityMethod> {
        self.method
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Number of distinct entry values, compared bitwise.
    pub fn distinct_values(&self) -> usize {
        let mut bits: Vec<u64> = self.values.iter().map(|v| v.to_bits()).collect();
        bits.sort_unstable();
        bits.dedup();
        bits.len()
    }
}

/// Canonical cluster assignment: first occurrences read 0, 1, 2, ...
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterLabels {
    assignments: Vec<usize>,
    n_clusters: usize,
}

impl ClusterLabels {
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn into_assignments(self) -> Vec<usize> {
        self.assignments
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// All observations in one cluster.
    pub fn single(n: usize) -> Self {
        Self {
            assignments: vec![0; n],
            n_clusters: usize::from(n > 0),
        }
    }

    /// Every observation in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignments: (0..n).collect(),
            n_clusters: n,
        }
    }

    /// Member indices of each cluster, in label order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_clusters];
        for (i, &l) in self.assignments.iter().enumerate() {
            groups[l].push(i);
        }
        groups
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.assignments {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Relabels so that the first occurrence of each distinct value, scanning
/// left to right, reads 0, 1, 2, ...
pub fn canonicalize_labels<T: Eq + Hash + Clone>(raw: &[T]) -> ClusterLabels {
    let mut seen: HashMap<T, usize> = HashMap::with_capacity(raw.len().min(1024));
    let mut assignments = Vec::with_capacity(raw.len());
    for v in raw {
        let next = seen.len();
        let l = *seen.entry(v.clone()).or_insert(next);
        assignments.push(l);
    }
    ClusterLabels {
        n_clusters: seen.len(),
        assignments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize_labels(&[5, 5, 2, 9, 2]).assignments(), &[0, 0, 1, 2, 1]);
        assert_eq!(canonicalize_labels(&[0, 1, 2]).assignments(), &[0, 1, 2]);
        let l = canonicalize_labels(&[7, 7, 7]);
        assert_eq!(l.assignments(), &[0, 0, 0]);
        assert_eq!(l.n_clusters(), 1);
    }

    #[test]
    fn data_matrix_rejects_non_finite() {
        let err = DataMatrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, SpinexError::NonFinite { row: 0, col: 1, .. }));
        assert!(DataMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
        assert!(DataMatrix::new(0, 3, vec![]).is_err());
        assert!(DataMatrix::new(2, 2, vec![1.0]).is_err());
    }

    #[test]
    fn shape_handling() {
        let m = DataMatrix::from_shape(&[3], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (3, 1));
        assert_eq!(
            DataMatrix::from_shape(&[2, 2, 2], vec![0.0; 8]).unwrap_err(),
            SpinexError::Dimensionality
        );
        let m = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert_eq!(m.column(0), vec![1.0, 3.0]);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("kernel".parse::<SimilarityMethod>().unwrap(), SimilarityMethod::Kernel);
        let err = "euclid".parse::<SimilarityMethod>().unwrap_err();
        assert_eq!(err.to_string(), "Invalid similarity method: euclid");
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent_and_preserves_partition(raw in prop::collection::vec(0u32..6, 1..40)) {
            let once = canonicalize_labels(&raw);
            let twice = canonicalize_labels(once.assignments());
            prop_assert_eq!(&once, &twice);
            let a = once.assignments();
            for i in 0..raw.len() {
                for j in 0..raw.len() {
                    prop_assert_eq!(raw[i] == raw[j], a[i] == a[j]);
                }
            }
            prop_assert_eq!(once.n_clusters(), a.iter().max().unwrap() + 1);
        }
    }
}
