//! Standardization, PCA and random-sampling reduction applied before
//! similarity computation.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::config::Components;
use crate::error::{Result, SpinexError};
use crate::log::DecisionLog;
use crate::similarity::{fingerprint, MatrixFingerprint};
use crate::types::DataMatrix;

/// Eigenvalues below this are treated as exactly zero.
const EIGEN_CLAMP: f64 = 1e-10;

/// Centers each column and scales it to unit population standard deviation.
/// Zero-variance columns become all zeros.
pub fn standardize(x: &DataMatrix) -> DataMatrix {
    let (n, d) = (x.n_rows(), x.n_cols());
    let mut out = x.values().to_vec();
    for j in 0..d {
        let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for i in 0..n {
            out[i * d + j] = if sd > 0.0 { (x.get(i, j) - mean) / sd } else { 0.0 };
        }
    }
    DataMatrix::new(n, d, out).expect("standardized values are finite")
}

/// Fitted principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// `d x r`, row-major; column `k` is the k-th component.
    components: Vec<f64>,
    n_features: usize,
    n_components: usize,
    explained_variance: Vec<f64>,
    /// Ratio of each kept eigenvalue to the total variance of all d eigenvalues.
    explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }

    /// Entry `(feature, component)` of the loading matrix.
    pub fn component(&self, feature: usize, k: usize) -> f64 {
        self.components[feature * self.n_components + k]
    }

    /// `(x - mean) * W`.
    pub fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.n_cols() != self.n_features {
            return Err(SpinexError::DimensionMismatch {
                expected: self.n_features,
                got: x.n_cols(),
            });
        }
        let r = self.n_components;
        let mut out = vec![0.0; x.n_rows() * r];
        for (i, row) in x.rows().enumerate() {
            for (f, (&v, &m)) in row.iter().zip(&self.mean).enumerate() {
                let c = v - m;
                if c == 0.0 {
                    continue;
                }
                let w = &self.components[f * r..(f + 1) * r];
                for k in 0..r {
                    out[i * r + k] += c * w[k];
                }
            }
        }
        DataMatrix::new(x.n_rows(), r, out)
    }

    /// Maps projected rows back into feature space: `z * W^T + mean`.
    pub fn inverse_transform(&self, z: &DataMatrix) -> Result<DataMatrix> {
        if z.n_cols() != self.n_components {
            return Err(SpinexError::DimensionMismatch {
                expected: self.n_components,
                got: z.n_cols(),
            });
        }
        let (d, r) = (self.n_features, self.n_components);
        let mut out = Vec::with_capacity(z.n_rows() * d);
        for row in z.rows() {
            for f in 0..d {
                let w = &self.components[f * r..(f + 1) * r];
                out.push(self.mean[f] + row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>());
            }
        }
        DataMatrix::new(z.n_rows(), d, out)
    }
}

/// Eigen-decomposition of the sample covariance, components sorted by
/// decreasing eigenvalue, each with its largest-magnitude entry positive.
fn eigen_components(x: &DataMatrix) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let (n, d) = (x.n_rows(), x.n_cols());
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64).collect();
    let denom = (n.max(2) - 1) as f64;
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for row in x.rows() {
        for a in 0..d {
            let ca = row[a] - mean[a];
            if ca == 0.0 {
                continue;
            }
            for b in a..d {
                cov[(a, b)] += ca * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / denom;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order
        .iter()
        .map(|&k| {
            let v = eig.eigenvalues[k];
            if v < EIGEN_CLAMP {
                0.0
            } else {
                v
            }
        })
        .collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let pivot = v
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |best, (i, &c)| if c.abs() > best.1.abs() { (i, c) } else { best })
                .0;
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            v
        })
        .collect();
    (mean, eigenvalues, vectors)
}

fn build_model(mean: Vec<f64>, eigenvalues: &[f64], vectors: &[Vec<f64>], r: usize) -> PcaModel {
    let d = mean.len();
    let total: f64 = eigenvalues.iter().sum();
    let mut components = vec![0.0; d * r];
    for (k, v) in vectors.iter().take(r).enumerate() {
        for f in 0..d {
            components[f * r + k] = v[f];
        }
    }
    let explained_variance = eigenvalues[..r].to_vec();
    let explained_variance_ratio = explained_variance
        .iter()
        .map(|&v| if total > 0.0 { v / total } else { 0.0 })
        .collect();
    PcaModel {
        mean,
        components,
        n_features: d,
        n_components: r,
        explained_variance,
        explained_variance_ratio,
    }
}

/// Fits PCA to `x`. A count target must not exceed `min(n - 1, d)`; a
/// fraction target keeps the fewest components whose cumulative
/// explained-variance ratio reaches it.
pub fn fit_pca(x: &DataMatrix, target: Components) -> Result<PcaModel> {
    let (n, d) = (x.n_rows(), x.n_cols());
    if n < 2 {
        return Err(SpinexError::InvalidTarget(format!("PCA needs at least 2 rows, got {n}")));
    }
    target.validate()?;
    let limit = (n - 1).min(d);
    let (mean, eigenvalues, vectors) = eigen_components(x);
    let r = match target {
        Components::Count(r) if r > limit => {
            return Err(SpinexError::InvalidTarget(format!(
                "{r} components requested but at most min(n-1, d) = {limit} are available"
            )))
        }
        Components::Count(r) => r,
        Components::Fraction(f) => {
            let total: f64 = eigenvalues.iter().sum();
            if total <= 0.0 {
                1
            } else {
                let mut cumulative = 0.0;
                let mut r = d;
                for (k, v) in eigenvalues.iter().enumerate() {
                    cumulative += v / total;
                    // small slack so that an exact 100% fraction is not lost to rounding
                    if cumulative >= f - 1e-12 {
                        r = k + 1;
                        break;
                    }
                }
                r.min(limit.max(1))
            }
        }
    };
    Ok(build_model(mean, &eigenvalues, &vectors, r))
}

/// Fits exactly `r <= d` components without the `n - 1` rank cap; trailing
/// components may carry zero variance.
fn fit_pca_fixed(x: &DataMatrix, r: usize) -> PcaModel {
    let (mean, eigenvalues, vectors) = eigen_components(x);
    build_model(mean, &eigenvalues, &vectors, r.min(x.n_cols()))
}

/// Reduces `x` to `max_features` principal components when it has more
/// columns than that. The data is not standardized first.
pub fn enforce_max_features(x: &DataMatrix, max_features: usize, log: &DecisionLog) -> DataMatrix {
    if x.n_cols() <= max_features {
        return x.clone();
    }
    log.push(format!(
        "Reducing features from {} to {} using PCA",
        x.n_cols(),
        max_features
    ));
    let model = fit_pca_fixed(x, max_features);
    model.transform(x).expect("model fitted on x")
}

/// Draws `floor(n * fraction)` distinct rows without replacement. Kept
/// indices are returned in ascending order.
pub fn random_sample<R: Rng + ?Sized>(
    x: &DataMatrix,
    fraction: f64,
    rng: &mut R,
    log: &DecisionLog,
) -> Result<(DataMatrix, Vec<usize>)> {
    let n = x.n_rows();
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SpinexError::InvalidConfig(format!(
            "sample_size must lie in (0, 1] (got {fraction})"
        )));
    }
    let k = (n as f64 * fraction).floor() as usize;
    if k == 0 {
        return Err(SpinexError::DegenerateSample { n, fraction });
    }
    let mut kept = rand::seq::index::sample(rng, n, k).into_vec();
    kept.sort_unstable();
    let sampled = x.select_rows(&kept)?;
    log.push(format!("Data reduced to {k} samples using random sampling."));
    Ok((sampled, kept))
}

/// Projected data keyed by the fingerprint of the standardized input.
#[derive(Debug, Default)]
pub struct PcaCache {
    map: RwLock<HashMap<(MatrixFingerprint, String), Arc<DataMatrix>>>,
}

impl PcaCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Standardizes, then projects onto the PCA target, reusing earlier results.
    pub fn apply_pca(&self, x: &DataMatrix, target: Components, log: &DecisionLog) -> Result<Arc<DataMatrix>> {
        let scaled = standardize(x);
        let key = (fingerprint(&scaled), format!("{target:?}"));
        if let Some(hit) = self.map.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
            log.push("Retrieved PCA results from cache.");
            return Ok(Arc::clone(hit));
        }
        let model = fit_pca(&scaled, target)?;
        let projected = Arc::new(model.transform(&scaled)?);
        self.map
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .entry(key)
            .or_insert_with(|| Arc::clone(&projected));
        log.push(format!(
            "Computed and cached PCA results. Reduced dimensions to {}.",
            model.n_components()
        ));
        Ok(projected)
    }
}
