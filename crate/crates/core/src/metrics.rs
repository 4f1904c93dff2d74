//! Cluster validation metrics, tiered composite scoring and the per-method
//! metric cache.
//!
//! Internal metrics (silhouette, Calinski-Harabasz, Davies-Bouldin) use
//! Euclidean distance. External metrics (homogeneity, completeness,
//! V-measure) use natural-log entropies of the contingency table.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinexError};
use crate::log::DecisionLog;
use crate::similarity::{fingerprint, fingerprint_labels, MatrixFingerprint};
use crate::types::{canonicalize_labels, ClusterLabels, DataMatrix, SimilarityMethod};

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_internal(x: &DataMatrix, labels: &ClusterLabels) -> Result<usize> {
    if labels.len() != x.n_rows() {
        return Err(SpinexError::InvalidInput(format!(
            "{} labels for {} observations",
            labels.len(),
            x.n_rows()
        )));
    }
    let k = labels.n_clusters();
    if k <= 1 || k >= x.n_rows() {
        return Err(SpinexError::UndefinedMetric(format!(
            "internal metrics need 1 < k < n (k = {k}, n = {})",
            x.n_rows()
        )));
    }
    Ok(k)
}

fn centroids(x: &DataMatrix, labels: &ClusterLabels) -> Vec<Vec<f64>> {
    let k = labels.n_clusters();
    let d = x.n_cols();
    let mut c = vec![vec![0.0; d]; k];
    let sizes = labels.cluster_sizes();
    for (row, &l) in x.rows().zip(labels.assignments()) {
        for (acc, v) in c[l].iter_mut().zip(row) {
            *acc += v;
        }
    }
    for (centroid, &size) in c.iter_mut().zip(&sizes) {
        centroid.iter_mut().for_each(|v| *v /= size as f64);
    }
    c
}

/// Mean silhouette coefficient. Points in singleton clusters score 0.
pub fn silhouette(x: &DataMatrix, labels: &ClusterLabels) -> Result<f64> {
    let k = check_internal(x, labels)?;
    let n = x.n_rows();
    let a = labels.assignments();
    let sizes = labels.cluster_sizes();
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        let xi = x.row(i);
        for j in 0..n {
            if j != i {
                sums[a[j]] += euclidean(xi, x.row(j));
            }
        }
        let own = a[i];
        if sizes[own] == 1 {
            continue;
        }
        let intra = sums[own] / (sizes[own] - 1) as f64;
        let nearest = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = intra.max(nearest);
        if denom > 0.0 {
            total += (nearest - intra) / denom;
        }
    }
    Ok(total / n as f64)
}

/// `(tr(B) / tr(W)) * (N - k) / (k - 1)`.
pub fn calinski_harabasz(x: &DataMatrix, labels: &ClusterLabels) -> Result<f64> {
    let k = check_internal(x, labels)?;
    let n = x.n_rows();
    let d = x.n_cols();
    let overall: Vec<f64> = (0..d).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
    let c = centroids(x, labels);
    let sizes = labels.cluster_sizes();
    let between: f64 = c
        .iter()
        .zip(&sizes)
        .map(|(m, &s)| s as f64 * m.iter().zip(&overall).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum();
    let within: f64 = x
        .rows()
        .zip(labels.assignments())
        .map(|(r, &l)| r.iter().zip(&c[l]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum();
    if within == 0.0 {
        return Err(SpinexError::UndefinedMetric(
            "Calinski-Harabasz undefined: zero within-cluster dispersion".into(),
        ));
    }
    Ok(between / within * (n - k) as f64 / (k - 1) as f64)
}

/// Mean over clusters of the worst `(s_i + s_j) / d(c_i, c_j)` ratio.
pub fn davies_bouldin(x: &DataMatrix, labels: &ClusterLabels) -> Result<f64> {
    let k = check_internal(x, labels)?;
    let c = centroids(x, labels);
    let sizes = labels.cluster_sizes();
    let mut spread = vec![0.0; k];
    for (r, &l) in x.rows().zip(labels.assignments()) {
        spread[l] += euclidean(r, &c[l]);
    }
    for (s, &size) in spread.iter_mut().zip(&sizes) {
        *s /= size as f64;
    }
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..k {
            if i == j {
                continue;
            }
            let dist = euclidean(&c[i], &c[j]);
            if dist == 0.0 {
                return Err(SpinexError::UndefinedMetric(
                    "Davies-Bouldin undefined: coincident centroids".into(),
                ));
            }
            worst = worst.max((spread[i] + spread[j]) / dist);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

/// Contingency-based entropies: `(H(C), H(K), H(C|K), H(K|C))`.
fn entropies(truth: &[usize], pred: &[usize]) -> (f64, f64, f64, f64) {
    let n = truth.len() as f64;
    let t = canonicalize_labels(truth);
    let p = canonicalize_labels(pred);
    let (kc, kk) = (t.n_clusters(), p.n_clusters());
    let mut table = vec![0usize; kc * kk];
    for (&c, &k) in t.assignments().iter().zip(p.assignments()) {
        table[c * kk + k] += 1;
    }
    let class_sizes = t.cluster_sizes();
    let cluster_sizes = p.cluster_sizes();
    let h = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let q = s as f64 / n;
                -q * q.ln()
            })
            .sum()
    };
    let mut h_c_given_k = 0.0;
    let mut h_k_given_c = 0.0;
    for c in 0..kc {
        for k in 0..kk {
            let nck = table[c * kk + k];
            if nck == 0 {
                continue;
            }
            let joint = nck as f64 / n;
            h_c_given_k -= joint * (nck as f64 / cluster_sizes[k] as f64).ln();
            h_k_given_c -= joint * (nck as f64 / class_sizes[c] as f64).ln();
        }
    }
    (h(&class_sizes), h(&cluster_sizes), h_c_given_k, h_k_given_c)
}

fn check_lengths(truth: &[usize], pred: &[usize]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(SpinexError::InvalidInput(format!(
            "ground truth has {} labels but prediction has {}",
            truth.len(),
            pred.len()
        )));
    }
    Ok(())
}

/// `1 - H(C|K) / H(C)`; 1 when the classes have zero entropy.
pub fn homogeneity(truth: &[usize], pred: &[usize]) -> Result<f64> {
    check_lengths(truth, pred)?;
    let (hc, _, hck, _) = entropies(truth, pred);
    Ok(if hc == 0.0 { 1.0 } else { 1.0 - hck / hc })
}

/// `1 - H(K|C) / H(K)`; 1 when the clusters have zero entropy.
pub fn completeness(truth: &[usize], pred: &[usize]) -> Result<f64> {
    check_lengths(truth, pred)?;
    let (_, hk, _, hkc) = entropies(truth, pred);
    Ok(if hk == 0.0 { 1.0 } else { 1.0 - hkc / hk })
}

/// Harmonic mean of homogeneity and completeness.
pub fn v_measure(truth: &[usize], pred: &[usize]) -> Result<f64> {
    let h = homogeneity(truth, pred)?;
    let c = completeness(truth, pred)?;
    Ok(harmonic(h, c))
}

fn harmonic(h: f64, c: f64) -> f64 {
    if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    }
}

/// Six validation scores for one labeling; `None` marks an undefined score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricsRecord {
    pub n_clusters: usize,
    pub silhouette: Option<f64>,
    pub calinski_harabasz: Option<f64>,
    pub davies_bouldin: Option<f64>,
    pub homogeneity: Option<f64>,
    pub completeness: Option<f64>,
    pub v_measure: Option<f64>,
}

impl MetricsRecord {
    pub fn undefined(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            ..Default::default()
        }
    }

    /// Metrics in column order: silhouette, CH, DB, homogeneity, completeness, V-measure.
    pub fn as_array(&self) -> [Option<f64>; 6] {
        [
            self.silhouette,
            self.calinski_harabasz,
            self.davies_bouldin,
            self.homogeneity,
            self.completeness,
            self.v_measure,
        ]
    }
}

pub const METRIC_NAMES: [&str; 6] = [
    "silhouette",
    "calinski_harabasz",
    "davies_bouldin",
    "homogeneity",
    "completeness",
    "v_measure",
];

type MetricsKey = (MatrixFingerprint, MatrixFingerprint, String);

/// Cached metric records keyed by data, labels and method.
#[derive(Debug, Default)]
pub struct MetricsCache {
    map: RwLock<HashMap<MetricsKey, MetricsRecord>>,
}

impl MetricsCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Computes the metrics enabled by `tier` for `labels`.
///
/// Nothing is computed unless `1 < k < n`. Tiers 1 and 3 compute internal
/// metrics; tiers 2 and 3 compute external ones when `ground_truth` is
/// given. Failures are logged and leave the field undefined.
pub fn evaluate(
    x: &DataMatrix,
    labels: &ClusterLabels,
    method: &str,
    tier: u8,
    ground_truth: Option<&[usize]>,
    cache: &MetricsCache,
    log: &DecisionLog,
) -> MetricsRecord {
    let key = (fingerprint(x), fingerprint_labels(labels.assignments()), method.to_string());
    if let Some(hit) = cache.map.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
        log.push(format!("Metrics retrieved from cache for method: {method}"));
        return hit.clone();
    }
    let k = labels.n_clusters();
    let mut rec = MetricsRecord::undefined(k);
    if 1 < k && k < x.n_rows() {
        let record = |r: Result<f64>, slot: &mut Option<f64>| match r {
            Ok(v) if v.is_finite() => *slot = Some(v),
            Ok(v) => log.push(format!("Error calculating metrics for {method}: non-finite value {v}")),
            Err(e) => log.push(format!("Error calculating metrics for {method}: {e}")),
        };
        if tier == 1 || tier == 3 {
            record(silhouette(x, labels), &mut rec.silhouette);
            record(calinski_harabasz(x, labels), &mut rec.calinski_harabasz);
            record(davies_bouldin(x, labels), &mut rec.davies_bouldin);
        }
        if tier == 2 || tier == 3 {
            if let Some(truth) = ground_truth {
                let pred = labels.assignments();
                record(homogeneity(truth, pred), &mut rec.homogeneity);
                record(completeness(truth, pred), &mut rec.completeness);
                record(v_measure(truth, pred), &mut rec.v_measure);
            }
        }
    }
    cache
        .map
        .write()
        .unwrap_or_else(|p| p.into_inner())
        .insert(key, rec.clone());
    log.push(format!("Metrics computed and cached for method: {method}"));
    rec
}

/// Squashes every metric onto `[0, 1]` with higher meaning better.
pub fn normalized_components(m: &MetricsRecord) -> [Option<f64>; 6] {
    [
        m.silhouette.map(|s| (s + 1.0) / 2.0),
        m.calinski_harabasz.map(|c| c / (c + 1.0)),
        m.davies_bouldin.map(|d| 1.0 / (1.0 + d)),
        m.homogeneity,
        m.completeness,
        m.v_measure,
    ]
}

/// Equal-weight mean of the defined normalized metrics selected by `tier`:
/// internal for tier 1, external for tier 2, all six for tier 3.
/// Returns negative infinity when nothing is defined.
pub fn composite_score(m: &MetricsRecord, tier: u8) -> f64 {
    let parts = normalized_components(m);
    let selected: &[Option<f64>] = match tier {
        1 => &parts[..3],
        2 => &parts[3..],
        _ => &parts[..],
    };
    let defined: Vec<f64> = selected.iter().flatten().copied().collect();
    if defined.is_empty() {
        f64::NEG_INFINITY
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    }
}

/// Index of the best score; ties resolve to the earliest entry.
pub fn argmax_first(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// Scores for each method in the configured order, then the winner.
pub fn select_best(scored: &[(SimilarityMethod, f64)]) -> Option<SimilarityMethod> {
    let scores: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
    argmax_first(&scores).map(|i| scored[i].0)
}
