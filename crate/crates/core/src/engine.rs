//! The similarity-merging engine: threshold selection, iterative pairwise
//! merging, dynamic threshold search, multi-level condensation and the
//! complete-linkage fallback used when a cluster count is requested.

use crate::config::{SpinexConfig, ThresholdSpec};
use crate::error::{Result, SpinexError};
use crate::linkage::complete_linkage;
use crate::log::DecisionLog;
use crate::types::{canonicalize_labels, ClusterLabels, SimilarityMatrix};

/// Merge threshold used when none is supplied.
pub const DEFAULT_MERGE_THRESHOLD: f64 = 0.5;
pub const DEFAULT_DECAY_RATE: f64 = 0.9;
pub const DEFAULT_MAX_ITERATIONS: usize = 10;

/// Multi-level threshold is scaled by this when the condensed variance drops.
const VARIANCE_DROP_FACTOR: f64 = 0.9;
/// Multi-level threshold grows by up to this fraction when the cluster count changes quickly.
const CHANGE_RATE_GAIN: f64 = 0.2;

/// The `k`-th smallest value (0-based) and, when `k + 1 < len`, the next one.
/// Linear-time selection; reorders `v`.
fn order_pair(v: &mut [f64], k: usize) -> (f64, f64) {
    let (_, &mut at, right) = v.select_nth_unstable_by(k, f64::total_cmp);
    let next = right.iter().copied().min_by(f64::total_cmp).unwrap_or(at);
    (at, next)
}

fn median(values: &[f64]) -> f64 {
    let n = values.len();
    let mut v = values.to_vec();
    if n % 2 == 1 {
        order_pair(&mut v, n / 2).0
    } else {
        let (a, b) = order_pair(&mut v, n / 2 - 1);
        (a + b) / 2.0
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population variance.
fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Percentile with linear interpolation between closest ranks.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let (a, b) = order_pair(&mut v, lo);
    if frac == 0.0 {
        a
    } else {
        a + (b - a) * frac
    }
}

/// Picks the merge threshold for `s`.
///
/// `Auto` takes the median `m` of all entries and adds the population
/// standard deviation of the entries strictly above `m`; when no entry is
/// above the median the maximum entry is used instead.
pub fn set_threshold(s: &SimilarityMatrix, spec: ThresholdSpec, log: &DecisionLog) -> f64 {
    match spec {
        ThresholdSpec::Auto => {
            let m = median(s.values());
            let above: Vec<f64> = s.values().iter().copied().filter(|&v| v > m).collect();
            let t = if above.is_empty() {
                s.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
            } else {
                m + variance(&above).sqrt()
            };
            log.push(format!("Adaptive threshold set using density-based approach: {t}"));
            t
        }
        ThresholdSpec::Percentile(p) => {
            let t = percentile(s.values(), p);
            log.push(format!("Threshold set using percentile: {t}"));
            t
        }
        ThresholdSpec::Fixed(v) => {
            log.push(format!("Threshold set using fixed value: {v}"));
            v
        }
    }
}

/// True when the mean similarity over all cross pairs exceeds `t` (strictly).
pub fn should_merge(c1: &[usize], c2: &[usize], s: &SimilarityMatrix, t: f64) -> bool {
    let mut total = 0.0;
    for &i in c1 {
        for &j in c2 {
            total += s.get(i, j);
        }
    }
    total / (c1.len() * c2.len()) as f64 > t
}

/// Working state for [`merge_clusters`].
///
/// Clusters are identified by their smallest member, which is also their
/// position in canonical label order. `cross[a][b]` holds the sum of
/// `S[i][j]` over `i` in `a`, `j` in `b`, so eligibility is O(1).
/// `first[a]` caches the first eligible partner `b > a`.
struct MergeState {
    n: usize,
    t: f64,
    cross: Vec<f64>,
    size: Vec<usize>,
    active: Vec<usize>,
    alive: Vec<bool>,
    owner: Vec<usize>,
    members: Vec<Vec<usize>>,
    first: Vec<Option<usize>>,
}

impl MergeState {
    fn new(s: &SimilarityMatrix, t: f64) -> Self {
        let n = s.n();
        let mut st = Self {
            n,
            t,
            cross: s.values().to_vec(),
            size: vec![1; n],
            active: (0..n).collect(),
            alive: vec![true; n],
            owner: (0..n).collect(),
            members: (0..n).map(|i| vec![i]).collect(),
            first: vec![None; n],
        };
        for a in 0..n {
            st.first[a] = st.scan_row(a);
        }
        st
    }

    #[inline]
    fn eligible(&self, a: usize, b: usize) -> bool {
        self.cross[a * self.n + b] / (self.size[a] * self.size[b]) as f64 > self.t
    }

    fn scan_row(&self, a: usize) -> Option<usize> {
        let start = self.active.partition_point(|&c| c <= a);
        self.active[start..].iter().copied().find(|&b| self.eligible(a, b))
    }

    fn merge(&mut self, a: usize, b: usize) {
        let n = self.n;
        for &q in &self.active {
            if q == b {
                continue;
            }
            self.cross[a * n + q] += self.cross[b * n + q];
            self.cross[q * n + a] += self.cross[q * n + b];
        }
        self.size[a] += self.size[b];
        self.alive[b] = false;
        let pos = self.active.binary_search(&b).expect("b is active");
        self.active.remove(pos);
        let moved = std::mem::take(&mut self.members[b]);
        for &p in &moved {
            self.owner[p] = a;
        }
        self.members[a].extend(moved);
        self.first[b] = None;

        self.first[a] = self.scan_row(a);
        let active = self.active.clone();
        for &p in &active {
            if p == a {
                continue;
            }
            match self.first[p] {
                Some(c) if c == a || c == b => self.first[p] = self.scan_row(p),
                cached if p < a => {
                    if self.eligible(p, a) && cached.is_none_or(|c| a < c) {
                        self.first[p] = Some(a);
                    }
                }
                _ => {}
            }
        }
    }

    fn run(mut self) -> ClusterLabels {
        while let Some((a, b)) = self
            .active
            .iter()
            .find_map(|&a| self.first[a].map(|b| (a, b)))
        {
            self.merge(a, b);
        }
        debug_assert!(self.alive.iter().filter(|&&x| x).count() == self.active.len());
        canonicalize_labels(&self.owner)
    }
}

/// Greedy merging from singletons.
///
/// Repeatedly merges the first cluster pair, in ascending canonical label
/// order, whose mean cross similarity exceeds `t`, restarting the scan after
/// every merge, until a full scan finds nothing to merge.
pub fn merge_clusters(s: &SimilarityMatrix, t: f64) -> ClusterLabels {
    if s.n() == 0 {
        return canonicalize_labels::<usize>(&[]);
    }
    MergeState::new(s, t).run()
}

/// Decays the threshold until two consecutive thresholds give the same
/// cluster count, returning the threshold at which the count stabilized (or
/// the last one tried).
pub fn dynamic_threshold(s: &SimilarityMatrix, initial: f64, decay_rate: f64, max_iterations: usize) -> f64 {
    let mut t = initial;
    let mut previous: Option<usize> = None;
    for i in 0..max_iterations {
        let k = merge_clusters(s, t).n_clusters();
        if previous == Some(k) {
            return t;
        }
        previous = Some(k);
        if i + 1 < max_iterations {
            t *= decay_rate;
        }
    }
    t
}

/// Mean of the original similarities between every pair of groups. Diagonal
/// entries average the full within-group block, self-pairs included.
pub fn condense(s: &SimilarityMatrix, labels: &ClusterLabels) -> SimilarityMatrix {
    let k = labels.n_clusters();
    let mut sums = vec![0.0; k * k];
    let a = labels.assignments();
    for i in 0..s.n() {
        let row = s.row(i);
        let li = a[i];
        for (j, &v) in row.iter().enumerate() {
            sums[li * k + a[j]] += v;
        }
    }
    let sizes = labels.cluster_sizes();
    for x in 0..k {
        for y in 0..k {
            sums[x * k + y] /= (sizes[x] * sizes[y]) as f64;
        }
    }
    SimilarityMatrix::from_parts(k, sums, None)
}

/// One level of a multi-level run.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub threshold: f64,
    pub n_clusters: usize,
    /// Condensed similarity matrix handed to the next level, if one was built.
    pub condensed: Option<SimilarityMatrix>,
}

/// Multi-level clustering result with its per-level history.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLevelOutcome {
    pub labels: ClusterLabels,
    pub levels: Vec<LevelTrace>,
}

/// Repeatedly merges, then condenses the similarity matrix over the new
/// clusters and merges again at an adjusted threshold.
///
/// After each level the threshold is scaled by 0.9 when the condensed
/// variance fell below the previous level's, then multiplied by
/// `1 + 0.2 * min(r, 1)` (capped at 1) where `r` is the relative change in
/// cluster count. Stops early when a level leaves the count unchanged or only
/// one cluster remains.
pub fn multi_level_trace(s: &SimilarityMatrix, initial_threshold: f64, levels: usize) -> Result<MultiLevelOutcome> {
    if levels == 0 {
        return Err(SpinexError::InvalidConfig("multi-level clustering needs at least one level".into()));
    }
    if !initial_threshold.is_finite() {
        return Err(SpinexError::InvalidConfig(format!(
            "multi-level initial threshold must be finite (got {initial_threshold})"
        )));
    }
    let n = s.n();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut current = s.clone();
    let mut t = initial_threshold;
    let mut prev_variance = variance(s.values());
    let mut prev_k = n;
    let mut trace = Vec::new();

    for _ in 0..levels {
        if current.n() <= 1 {
            break;
        }
        let sub = merge_clusters(&current, t);
        let sub = sub.assignments();
        for l in labels.iter_mut() {
            *l = sub[*l];
        }
        let composed = canonicalize_labels(&labels);
        let k = composed.n_clusters();
        labels = composed.assignments().to_vec();
        if k == prev_k {
            trace.push(LevelTrace {
                threshold: t,
                n_clusters: k,
                condensed: None,
            });
            break;
        }
        let condensed = condense(s, &composed);
        trace.push(LevelTrace {
            threshold: t,
            n_clusters: k,
            condensed: Some(condensed.clone()),
        });
        let var = variance(condensed.values());
        if var < prev_variance {
            t *= VARIANCE_DROP_FACTOR;
        }
        let rate = prev_k.abs_diff(k) as f64 / prev_k.max(1) as f64;
        t = (t * (1.0 + CHANGE_RATE_GAIN * rate.min(1.0))).min(1.0);
        prev_variance = var;
        prev_k = k;
        current = condensed;
    }
    Ok(MultiLevelOutcome {
        labels: canonicalize_labels(&labels),
        levels: trace,
    })
}

pub fn multi_level_clustering(s: &SimilarityMatrix, initial_threshold: f64, levels: usize) -> Result<ClusterLabels> {
    multi_level_trace(s, initial_threshold, levels).map(|o| o.labels)
}

/// Complete-linkage cut of `1 - clip(S, -1, 1)` into exactly `k` clusters.
/// A distance matrix that is identically zero yields one cluster.
pub fn linkage_cut(s: &SimilarityMatrix, k: usize, log: &DecisionLog) -> ClusterLabels {
    let n = s.n();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = 1.0 - s.get(i, j).clamp(-1.0, 1.0);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = ((d[i * n + j] + d[j * n + i]) / 2.0).max(0.0);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    if d.iter().all(|&v| v == 0.0) {
        log.push("Error in hierarchical clustering: degenerate all-zero distance matrix. Assigning all points to one cluster.");
        return ClusterLabels::single(n);
    }
    complete_linkage(&d, n, k)
}

/// Turns a similarity matrix into labels, choosing among the single-cluster
/// shortcut, multi-level merging, the linkage cut and plain merging.
pub fn cluster_from_similarity(
    s: &SimilarityMatrix,
    n: usize,
    threshold: Option<f64>,
    cfg: &SpinexConfig,
    log: &DecisionLog,
) -> ClusterLabels {
    if s.n() <= 1 {
        return ClusterLabels::single(n);
    }
    let merge_t = threshold.unwrap_or(DEFAULT_MERGE_THRESHOLD);
    if cfg.use_multi_level {
        log.push("Using multi-level clustering");
        let p = cfg.multi_level_params;
        return match multi_level_clustering(s, p.initial_threshold, p.levels) {
            Ok(labels) => {
                log.push(format!(
                    "Multi-level clustering completed with {} clusters",
                    labels.n_clusters()
                ));
                labels
            }
            Err(e) => {
                log.push(format!(
                    "Error in multi-level clustering: {e}. Falling back to default clustering."
                ));
                merge_clusters(s, merge_t)
            }
        };
    }
    match cfg.n_clusters {
        Some(k) if k < n && s.distinct_values() > 1 => linkage_cut(s, k, log),
        _ => merge_clusters(s, merge_t),
    }
}
