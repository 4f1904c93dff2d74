//! Reference clusterers: k-means, DBSCAN and complete-linkage agglomerative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinexError};
use crate::linkage::complete_linkage;
use crate::types::{canonicalize_labels, ClusterLabels, DataMatrix};

pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_N_INIT: usize = 10;
pub const DBSCAN_MIN_SAMPLES: usize = 5;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Dense row-major Euclidean distance matrix.
pub fn euclidean_distances(x: &DataMatrix) -> Vec<f64> {
    let n = x.n_rows();
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = sq_dist(x.row(i), x.row(j)).sqrt();
        }
    });
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: ClusterLabels,
    pub centroids: Vec<Vec<f64>>,
    pub wcss: f64,
    /// Within-cluster sum of squares after every Lloyd iteration.
    pub history: Vec<f64>,
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, mu) in centroids.iter().enumerate() {
        let d = sq_dist(row, mu);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_plus_plus(x: &DataMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x.n_rows();
    let mut centroids = vec![x.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = x.rows().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = x.row(pick).to_vec();
        for (i, r) in x.rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(r, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn centroids_of(x: &DataMatrix, assign: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let d = x.n_cols();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (i, &c) in assign.iter().enumerate() {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(x.row(i)) {
            *s += v;
        }
    }
    for (s, &m) in sums.iter_mut().zip(&counts) {
        if m > 0 {
            s.iter_mut().for_each(|v| *v /= m as f64);
        }
    }
    (sums, counts)
}

fn wcss(x: &DataMatrix, assign: &[usize], centroids: &[Vec<f64>]) -> f64 {
    assign.iter().enumerate().map(|(i, &c)| sq_dist(x.row(i), &centroids[c])).sum()
}

fn lloyd(x: &DataMatrix, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> KMeansFit {
    let mut centroids = kmeans_plus_plus(x, k, rng);
    let mut assign: Vec<usize> = x.rows().map(|r| nearest(r, &centroids).0).collect();
    let mut history = Vec::new();
    for _ in 0..max_iter {
        let (mut mu, mut counts) = centroids_of(x, &assign, k);
        // reseed empty clusters with the point farthest from its centroid,
        // taken from a cluster that can spare it
        while let Some(empty) = counts.iter().position(|&m| m == 0) {
            let far = (0..x.n_rows())
                .filter(|&i| counts[assign[i]] > 1)
                .max_by(|&a, &b| {
                    sq_dist(x.row(a), &mu[assign[a]])
                        .total_cmp(&sq_dist(x.row(b), &mu[assign[b]]))
                        .then(b.cmp(&a))
                })
                .expect("k <= n leaves a cluster with two members");
            assign[far] = empty;
            (mu, counts) = centroids_of(x, &assign, k);
        }
        centroids = mu;
        history.push(wcss(x, &assign, &centroids));
        let next: Vec<usize> = x.rows().map(|r| nearest(r, &centroids).0).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    let (centroids, _) = centroids_of(x, &assign, k);
    let total = wcss(x, &assign, &centroids);
    KMeansFit {
        labels: canonicalize_labels(&assign),
        centroids,
        wcss: total,
        history,
    }
}

/// k-means++ seeding followed by Lloyd iterations; the restart with the
/// smallest within-cluster sum of squares wins (earliest restart on ties).
pub fn kmeans_fit(x: &DataMatrix, k: usize, max_iter: usize, n_init: usize, seed: u64) -> Result<KMeansFit> {
    let n = x.n_rows();
    if k == 0 || k > n || n_init == 0 {
        return Err(SpinexError::InvalidInput(format!(
            "k-means needs 1 <= k <= n and n_init >= 1 (k={k}, n={n}, n_init={n_init})"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_init).map(|_| master.random()).collect();
    let fits: Vec<KMeansFit> = seeds
        .par_iter()
        .map(|&s| lloyd(x, k, max_iter, &mut ChaCha8Rng::seed_from_u64(s)))
        .collect();
    Ok(fits
        .into_iter()
        .reduce(|best, f| if f.wcss < best.wcss { f } else { best })
        .expect("n_init >= 1"))
}

pub fn kmeans(x: &DataMatrix, k: usize, seed: u64) -> Result<ClusterLabels> {
    Ok(kmeans_fit(x, k, KMEANS_MAX_ITER, KMEANS_N_INIT, seed)?.labels)
}

/// Density-based clustering. Neighborhoods include the point itself and use
/// `distance <= eps`. Each noise point becomes its own singleton cluster.
pub fn dbscan(x: &DataMatrix, eps: f64, min_samples: usize) -> Result<ClusterLabels> {
    if !(eps > 0.0) || min_samples == 0 {
        return Err(SpinexError::InvalidInput(format!(
            "dbscan needs eps > 0 and min_samples >= 1 (eps={eps}, min_samples={min_samples})"
        )));
    }
    let n = x.n_rows();
    let eps2 = eps * eps;
    let neighbors: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| sq_dist(x.row(i), x.row(j)) <= eps2).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_samples).collect();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    for start in 0..n {
        if label[start].is_some() || !core[start] {
            continue;
        }
        let id = next;
        next += 1;
        label[start] = Some(id);
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if label[q].is_none() {
                    label[q] = Some(id);
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
        }
    }
    let raw: Vec<usize> = label
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    Ok(canonicalize_labels(&raw))
}

/// Complete-linkage agglomeration on Euclidean distances down to `k` clusters.
pub fn agglomerative(x: &DataMatrix, k: usize) -> Result<ClusterLabels> {
    let n = x.n_rows();
    if k == 0 || k > n {
        return Err(SpinexError::InvalidInput(format!("agglomerative needs 1 <= k <= n (k={k}, n={n})")));
    }
    Ok(complete_linkage(&euclidean_distances(x), n, k))
}

/// A baseline algorithm with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaselineConfig {
    Kmeans {
        k: usize,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_n_init")]
        n_init: usize,
    },
    Dbscan {
        eps: f64,
        #[serde(default = "default_min_samples")]
        min_samples: usize,
    },
    Agglomerative {
        k: usize,
    },
}

fn default_max_iter() -> usize {
    KMEANS_MAX_ITER
}

fn default_n_init() -> usize {
    KMEANS_N_INIT
}

fn default_min_samples() -> usize {
    DBSCAN_MIN_SAMPLES
}

impl BaselineConfig {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineConfig::Kmeans { .. } => "kmeans",
            BaselineConfig::Dbscan { .. } => "dbscan",
            BaselineConfig::Agglomerative { .. } => "agglomerative",
        }
    }

    /// Cluster counts larger than `n` are clamped to `n`.
    pub fn run(&self, x: &DataMatrix, seed: u64) -> Result<ClusterLabels> {
        let n = x.n_rows();
        match *self {
            BaselineConfig::Kmeans { k, max_iter, n_init } => {
                Ok(kmeans_fit(x, k.min(n), max_iter, n_init, seed)?.labels)
            }
            BaselineConfig::Dbscan { eps, min_samples } => dbscan(x, eps, min_samples),
            BaselineConfig::Agglomerative { k } => agglomerative(x, k.min(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> DataMatrix {
        DataMatrix::from_column(v).unwrap()
    }

    #[test]
    fn kmeans_examples() {
        let x = line(&[0.0, 1.0, 10.0, 11.0]);
        let fit = kmeans_fit(&x, 2, 300, 10, 0).unwrap();
        assert_eq!(fit.labels.assignments(), &[0, 0, 1, 1]);
        assert!((fit.wcss - 1.0).abs() < 1e-12);
        assert_eq!(kmeans(&x, 1, 0).unwrap().assignments(), &[0, 0, 0, 0]);
        let all = kmeans_fit(&x, 4, 300, 10, 0).unwrap();
        assert_eq!(all.labels.n_clusters(), 4);
        assert_eq!(all.wcss, 0.0);
        assert!(kmeans(&x, 5, 0).is_err());
    }

    #[test]
    fn kmeans_history_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v: Vec<f64> = (0..200).map(|_| rng.random_range(-5.0..5.0)).collect();
        let x = DataMatrix::new(100, 2, v).unwrap();
        for seed in 0..5 {
            let fit = kmeans_fit(&x, 6, 300, 1, seed).unwrap();
            for w in fit.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{:?}", fit.history);
            }
        }
    }

    #[test]
    fn dbscan_examples() {
        let x = line(&[0.0, 0.1, 0.2, 5.0, 5.1, 5.2, 20.0]);
        let l = dbscan(&x, 0.15, 2).unwrap();
        assert_eq!(l.assignments(), &[0, 0, 0, 1, 1, 1, 2]);
        assert_eq!(dbscan(&x, 1e6, 2).unwrap().n_clusters(), 1);
        let shuffled = line(&[20.0, 5.2, 0.1, 5.0, 0.0, 5.1, 0.2]);
        assert_eq!(dbscan(&shuffled, 0.15, 2).unwrap().assignments(), &[0, 1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn agglomerative_examples() {
        let x = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(agglomerative(&x, 2).unwrap().assignments(), &[0, 0, 1, 1]);
        assert_eq!(agglomerative(&x, 4).unwrap().n_clusters(), 4);
        assert_eq!(agglomerative(&x, 1).unwrap().n_clusters(), 1);
    }

    #[test]
    fn config_serde() {
        let c: BaselineConfig = serde_json::from_str(r#"{"algorithm":"kmeans","k":3}"#).unwrap();
        assert_eq!(c, BaselineConfig::Kmeans { k: 3, max_iter: 300, n_init: 10 });
        assert_eq!(c.name(), "kmeans");
    }
}
