//! Benchmark harness: sweeps algorithms x datasets x seeds, normalizes and
//! ranks the metrics, extracts the Pareto front and estimates empirical
//! time complexity.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::BaselineConfig;
use crate::config::{ApproximationMethod, SpinexConfig};
use crate::datasets::{make_blobs, make_named, Centers, ClusterStd, LabeledDataset, DEFAULT_CENTER_BOX};
use crate::error::{Result, SpinexError};
use crate::log::DecisionLog;
use crate::metrics::{evaluate, MetricsCache, MetricsRecord, METRIC_NAMES};
use crate::spinex::Spinex;
use crate::types::{ClusterLabels, DataMatrix};

/// Shortest reportable duration, in seconds.
pub const MIN_REPORTABLE_TIME: f64 = 1e-6;
pub const DEFAULT_TRIALS: usize = 30;
/// Index of Davies-Bouldin in [`METRIC_NAMES`]; lower is better.
const DB_INDEX: usize = 2;

/// Anything the harness can benchmark.
pub trait ClusterAlgorithm: Send + Sync {
    fn name(&self) -> String;

    /// Clusters `x`; the returned messages end up in the report's decision logs.
    fn fit_predict_logged(&self, x: &DataMatrix, seed: u64) -> Result<(ClusterLabels, Vec<String>)>;

    fn fit_predict(&self, x: &DataMatrix, seed: u64) -> Result<ClusterLabels> {
        self.fit_predict_logged(x, seed).map(|(l, _)| l)
    }
}

/// A named SPINEX configuration. The run seed overrides `rng_seed`.
#[derive(Debug, Clone)]
pub struct SpinexVariant {
    pub tag: String,
    pub config: SpinexConfig,
}

impl ClusterAlgorithm for SpinexVariant {
    fn name(&self) -> String {
        format!("spinex_{}", self.tag)
    }

    fn fit_predict_logged(&self, x: &DataMatrix, seed: u64) -> Result<(ClusterLabels, Vec<String>)> {
        let mut sp = Spinex::new(SpinexConfig {
            rng_seed: seed,
            ..self.config.clone()
        })?;
        let labels = sp.fit_predict(x)?;
        Ok((labels, sp.log().messages()))
    }
}

impl ClusterAlgorithm for BaselineConfig {
    fn name(&self) -> String {
        BaselineConfig::name(self).to_string()
    }

    fn fit_predict_logged(&self, x: &DataMatrix, seed: u64) -> Result<(ClusterLabels, Vec<String>)> {
        Ok((self.run(x, seed)?, Vec::new()))
    }
}

/// Tags of the registered SPINEX variants.
pub const SPINEX_VARIANTS: [&str; 6] = ["default", "t", "multi_level", "rs", "pca", "n_clusters"];

/// Builds a registered SPINEX variant.
pub fn spinex_variant(tag: &str) -> Result<SpinexVariant> {
    let base = SpinexConfig::default();
    let config = match tag {
        "default" => base,
        "t" => SpinexConfig { use_pca: true, ..base },
        "multi_level" => SpinexConfig {
            use_multi_level: true,
            ..base
        },
        "rs" => SpinexConfig {
            use_approximation: true,
            approximation_method: ApproximationMethod::RandomSampling,
            sample_size: 0.5,
            ..base
        },
        "pca" => SpinexConfig {
            use_approximation: true,
            approximation_method: ApproximationMethod::Pca,
            ..base
        },
        "n_clusters" => SpinexConfig {
            n_clusters: Some(4),
            ..base
        },
        other => return Err(SpinexError::InvalidInput(format!("unknown SPINEX variant '{other}'"))),
    };
    Ok(SpinexVariant {
        tag: tag.to_string(),
        config,
    })
}

/// Baselines with their usual library defaults.
pub fn default_baselines() -> Vec<BaselineConfig> {
    vec![
        BaselineConfig::Kmeans {
            k: 8,
            max_iter: crate::baselines::KMEANS_MAX_ITER,
            n_init: crate::baselines::KMEANS_N_INIT,
        },
        BaselineConfig::Dbscan {
            eps: 0.5,
            min_samples: crate::baselines::DBSCAN_MIN_SAMPLES,
        },
        BaselineConfig::Agglomerative { k: 2 },
    ]
}

/// Datasets of the desk-scale benchmark.
pub const DESK_DATASETS: [&str; 6] = [
    "Blobs",
    "Simple Blobs",
    "Disjoint Clusters",
    "Aggregated Clusters",
    "Moons",
    "Circles",
];

/// SPINEX variants of the desk-scale benchmark.
pub const DESK_SPINEX_VARIANTS: [&str; 3] = ["default", "t", "n_clusters"];

pub const DESK_SEEDS: [u64; 3] = [0, 1, 2];

/// Three SPINEX variants followed by the three baselines.
pub fn desk_algorithms() -> Vec<Box<dyn ClusterAlgorithm>> {
    let mut algs: Vec<Box<dyn ClusterAlgorithm>> = DESK_SPINEX_VARIANTS
        .iter()
        .map(|t| Box::new(spinex_variant(t).expect("registered variant")) as Box<dyn ClusterAlgorithm>)
        .collect();
    algs.extend(default_baselines().into_iter().map(|b| Box::new(b) as Box<dyn ClusterAlgorithm>));
    algs
}

pub fn desk_datasets() -> Vec<DatasetSource> {
    DESK_DATASETS.iter().map(|n| DatasetSource::Named(n.to_string())).collect()
}

/// Resolves an algorithm name: `spinex_<tag>`, `kmeans`, `dbscan` or `agglomerative`.
pub fn algorithm_by_name(name: &str) -> Result<Box<dyn ClusterAlgorithm>> {
    let key = name.trim().to_ascii_lowercase();
    if let Some(tag) = key.strip_prefix("spinex_") {
        return Ok(Box::new(spinex_variant(tag)?));
    }
    if key == "spinex" {
        return Ok(Box::new(spinex_variant("default")?));
    }
    default_baselines()
        .into_iter()
        .find(|b| BaselineConfig::name(b) == key)
        .map(|b| Box::new(b) as Box<dyn ClusterAlgorithm>)
        .ok_or_else(|| SpinexError::InvalidInput(format!("unknown algorithm '{name}'")))
}

/// Where a benchmark dataset comes from.
#[derive(Debug, Clone)]
pub enum DatasetSource {
    /// Regenerated per seed.
    Named(String),
    /// Used as-is for every seed.
    Fixed(LabeledDataset),
}

impl DatasetSource {
    pub fn name(&self) -> &str {
        match self {
            DatasetSource::Named(n) => n,
            DatasetSource::Fixed(d) => &d.name,
        }
    }

    pub fn load(&self, seed: u64) -> Result<LabeledDataset> {
        match self {
            DatasetSource::Named(n) => make_named(n, seed),
            DatasetSource::Fixed(d) => Ok(d.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub dataset: String,
    pub seed: u64,
    pub metrics: MetricsRecord,
    pub wall_time: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub log: Vec<String>,
}

fn run_cell(alg: &dyn ClusterAlgorithm, source: &DatasetSource, seed: u64) -> RunRecord {
    let mut record = RunRecord {
        algorithm: alg.name(),
        dataset: source.name().to_string(),
        seed,
        metrics: MetricsRecord::undefined(0),
        wall_time: MIN_REPORTABLE_TIME,
        error: None,
        log: Vec::new(),
    };
    let ds = match source.load(seed) {
        Ok(ds) => ds,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let start = Instant::now();
    let outcome = alg.fit_predict_logged(&ds.x, seed);
    record.wall_time = start.elapsed().as_secs_f64().max(MIN_REPORTABLE_TIME);
    match outcome {
        Ok((labels, log)) => {
            let tier = if ds.truth.is_some() { 3 } else { 1 };
            record.metrics = evaluate(
                &ds.x,
                &labels,
                &record.algorithm,
                tier,
                ds.truth.as_deref(),
                &MetricsCache::new(),
                &DecisionLog::new(),
            );
            record.log = log;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs the full cross product. Records come back in (algorithm, dataset,
/// seed) order; a failing cell is recorded with undefined metrics.
pub fn run_benchmark(
    algorithms: &[Box<dyn ClusterAlgorithm>],
    datasets: &[DatasetSource],
    seeds: &[u64],
) -> Vec<RunRecord> {
    let cells: Vec<(usize, usize, u64)> = (0..algorithms.len())
        .flat_map(|a| (0..datasets.len()).flat_map(move |d| seeds.iter().map(move |&s| (a, d, s))))
        .collect();
    cells
        .par_iter()
        .map(|&(a, d, s)| run_cell(algorithms[a].as_ref(), &datasets[d], s))
        .collect()
}

/// Mean normalized metrics per (algorithm, dataset).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMeans {
    pub algorithm: String,
    pub dataset: String,
    pub means: [Option<f64>; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub algorithm: String,
    pub means: [Option<f64>; 6],
    pub mean_across_metrics: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub pairs: Vec<PairMeans>,
    pub rows: Vec<RankRow>,
    /// Metric columns with no defined value anywhere; left out of every mean.
    pub excluded_metrics: Vec<String>,
}

fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Min-max normalizes every metric column over all records (Davies-Bouldin
/// inverted, zero range mapped to 1.0), averages per (algorithm, dataset) and
/// then per algorithm, and ranks algorithms by the mean across metrics.
/// Equal means share a rank.
pub fn normalize_and_rank(records: &[RunRecord]) -> Ranking {
    let mut bounds = [None::<(f64, f64)>; 6];
    for r in records {
        for (m, v) in r.metrics.as_array().iter().enumerate() {
            if let Some(v) = *v {
                bounds[m] = Some(match bounds[m] {
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                    None => (v, v),
                });
            }
        }
    }
    let excluded_metrics: Vec<String> = (0..6)
        .filter(|&m| bounds[m].is_none())
        .map(|m| METRIC_NAMES[m].to_string())
        .collect();
    let normalize = |m: usize, v: f64| -> f64 {
        let (lo, hi) = bounds[m].expect("defined value implies bounds");
        if hi - lo == 0.0 {
            1.0
        } else if m == DB_INDEX {
            (hi - v) / (hi - lo)
        } else {
            (v - lo) / (hi - lo)
        }
    };

    let mut grouped: BTreeMap<(String, String), Vec<[Option<f64>; 6]>> = BTreeMap::new();
    for r in records {
        let raw = r.metrics.as_array();
        let norm: [Option<f64>; 6] = std::array::from_fn(|m| raw[m].map(|v| normalize(m, v)));
        grouped
            .entry((r.algorithm.clone(), r.dataset.clone()))
            .or_default()
            .push(norm);
    }
    let pairs: Vec<PairMeans> = grouped
        .into_iter()
        .map(|((algorithm, dataset), rows)| PairMeans {
            algorithm,
            dataset,
            means: std::array::from_fn(|m| mean_defined(rows.iter().map(|r| r[m]))),
        })
        .collect();

    let mut by_alg: BTreeMap<&str, Vec<&PairMeans>> = BTreeMap::new();
    for p in &pairs {
        by_alg.entry(&p.algorithm).or_default().push(p);
    }
    let mut rows: Vec<RankRow> = by_alg
        .into_iter()
        .map(|(alg, ps)| {
            let means: [Option<f64>; 6] = std::array::from_fn(|m| mean_defined(ps.iter().map(|p| p.means[m])));
            let included = (0..6).filter(|&m| bounds[m].is_some());
            // an algorithm with no defined metric scores the worst normalized value
            let mean_across_metrics = mean_defined(included.map(|m| means[m])).unwrap_or(0.0);
            RankRow {
                algorithm: alg.to_string(),
                means,
                mean_across_metrics,
                rank: 0,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mean_across_metrics
            .total_cmp(&a.mean_across_metrics)
            .then_with(|| a.algorithm.cmp(&b.algorithm))
    });
    for i in 0..rows.len() {
        rows[i].rank = if i > 0 && rows[i].mean_across_metrics == rows[i - 1].mean_across_metrics {
            rows[i - 1].rank
        } else {
            i + 1
        };
    }
    Ranking {
        pairs,
        rows,
        excluded_metrics,
    }
}

/// `a` dominates `b` when it is at least as good everywhere and strictly
/// better somewhere (higher is better).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Names of the non-dominated entries, in input order.
pub fn pareto_front(entries: &[(String, Vec<f64>)]) -> Vec<String> {
    entries
        .iter()
        .filter(|(_, a)| !entries.iter().any(|(_, b)| dominates(b, a)))
        .map(|(n, _)| n.clone())
        .collect()
}

/// Pareto front over a ranking's per-algorithm normalized means. Undefined
/// means count as 0, the worst normalized value; excluded columns are ignored.
pub fn ranking_pareto(ranking: &Ranking) -> Vec<String> {
    let included: Vec<usize> = (0..6)
        .filter(|&m| !ranking.excluded_metrics.iter().any(|e| e == METRIC_NAMES[m]))
        .collect();
    let entries: Vec<(String, Vec<f64>)> = ranking
        .rows
        .iter()
        .map(|r| (r.algorithm.clone(), included.iter().map(|&m| r.means[m].unwrap_or(0.0)).collect()))
        .collect();
    pareto_front(&entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingSample {
    pub n: usize,
    pub d: usize,
    pub times: Vec<f64>,
}

impl TimingSample {
    pub fn median(&self) -> f64 {
        median(&self.times)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m == 0 {
        f64::NAN
    } else if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Times `trials` fits of `alg` on a seeded `n x d` blob dataset. Each
/// duration is clamped to [`MIN_REPORTABLE_TIME`].
pub fn measure_execution_time(alg: &dyn ClusterAlgorithm, n: usize, d: usize, trials: usize, seed: u64) -> Result<TimingSample> {
    let ds = make_blobs(n, d, Centers::Count(3.min(n)), ClusterStd::Scalar(1.0), DEFAULT_CENTER_BOX, seed)?;
    let mut times = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        alg.fit_predict(&ds.x, seed)?;
        times.push(start.elapsed().as_secs_f64().max(MIN_REPORTABLE_TIME));
    }
    Ok(TimingSample { n, d, times })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityEstimate {
    pub slope: f64,
    pub class: String,
}

/// Complexity label for a log-log slope.
pub fn classify_slope(s: f64) -> String {
    if s <= 0.1 {
        "O(1)".into()
    } else if s <= 0.5 {
        "O(log n)".into()
    } else if s <= 1.2 {
        "O(n)".into()
    } else if s <= 1.5 {
        "O(n log n)".into()
    } else if s <= 2.2 {
        "O(n^2)".into()
    } else {
        format!("O(n^{s:.2})")
    }
}

/// Least-squares slope of `ln(time)` against `ln(n)`, with its class.
pub fn estimate_complexity(sizes: &[f64], times: &[f64]) -> Result<ComplexityEstimate> {
    if sizes.len() != times.len() || sizes.len() < 3 {
        return Err(SpinexError::InvalidInput(
            "complexity estimation needs at least 3 matching (size, time) points".into(),
        ));
    }
    if sizes.iter().chain(times).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(SpinexError::InvalidInput("sizes and times must be positive".into()));
    }
    let xs: Vec<f64> = sizes.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = times.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SpinexError::InvalidInput("sizes must not all be equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ComplexityEstimate {
        slope,
        class: classify_slope(slope),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityGrid {
    pub sizes: Vec<usize>,
    pub dims: Vec<usize>,
    pub trials: usize,
}

impl ComplexityGrid {
    pub fn desk() -> Self {
        Self {
            sizes: vec![100, 400, 1600],
            dims: vec![8, 32],
            trials: DEFAULT_TRIALS,
        }
    }

    pub fn full() -> Self {
        Self {
            sizes: vec![100, 1000, 10000],
            dims: vec![50, 100, 500, 1000],
            trials: DEFAULT_TRIALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingCell {
    pub algorithm: String,
    pub sample: TimingSample,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub algorithm: String,
    pub d: usize,
    pub slope: f64,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ComplexityReport {
    pub cells: Vec<TimingCell>,
    pub rows: Vec<ComplexityRow>,
    /// Per algorithm: mean slope across feature counts and its class.
    pub aggregate: Vec<ComplexityRow>,
    pub failures: Vec<String>,
}

/// Times every algorithm on every grid cell, one cell at a time, and fits a
/// slope per (algorithm, d). Failing cells are recorded and skipped.
pub fn run_complexity_analysis(algorithms: &[Box<dyn ClusterAlgorithm>], grid: &ComplexityGrid, seed: u64) -> ComplexityReport {
    let mut report = ComplexityReport::default();
    for alg in algorithms {
        let name = alg.name();
        let mut slopes = Vec::new();
        for &d in &grid.dims {
            let mut sizes = Vec::new();
            let mut medians = Vec::new();
            for &n in &grid.sizes {
                match measure_execution_time(alg.as_ref(), n, d, grid.trials, seed) {
                    Ok(sample) => {
                        let med = sample.median();
                        sizes.push(n as f64);
                        medians.push(med);
                        report.cells.push(TimingCell {
                            algorithm: name.clone(),
                            sample,
                            median: med,
                        });
                    }
                    Err(e) => report.failures.push(format!("{name} n={n} d={d}: {e}")),
                }
            }
            match estimate_complexity(&sizes, &medians) {
                Ok(est) => {
                    slopes.push(est.slope);
                    report.rows.push(ComplexityRow {
                        algorithm: name.clone(),
                        d,
                        slope: est.slope,
                        class: est.class,
                    });
                }
                Err(e) => report.failures.push(format!("{name} d={d}: {e}")),
            }
        }
        if !slopes.is_empty() {
            let s = slopes.iter().sum::<f64>() / slopes.len() as f64;
            report.aggregate.push(ComplexityRow {
                algorithm: name,
                d: 0,
                slope: s,
                class: classify_slope(s),
            });
        }
    }
    report
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn metric_header(prefix: &[&'static str], suffix: &[&'static str]) -> Vec<&'static str> {
    prefix.iter().chain(METRIC_NAMES.iter()).chain(suffix).copied().collect()
}

/// One row per run; wall times go to [`write_timings_csv`] so this file is
/// reproducible byte for byte.
pub fn write_runs_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let header = metric_header(&["algorithm", "dataset", "seed", "n_clusters"], &["error"]);
    write_rows(
        path,
        &header,
        records.iter().map(|r| {
            let mut row = vec![
                r.algorithm.clone(),
                r.dataset.clone(),
                r.seed.to_string(),
                r.metrics.n_clusters.to_string(),
            ];
            row.extend(r.metrics.as_array().iter().map(|v| fmt_opt(*v)));
            row.push(r.error.clone().unwrap_or_default());
            row
        }),
    )
}

pub fn write_timings_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    write_rows(
        path,
        &["algorithm", "dataset", "seed", "wall_time"],
        records
            .iter()
            .map(|r| vec![r.algorithm.clone(), r.dataset.clone(), r.seed.to_string(), r.wall_time.to_string()]),
    )
}

pub fn write_ranking_csv(ranking: &Ranking, path: &Path) -> Result<()> {
    let header = metric_header(&["rank", "algorithm"], &["mean_across_metrics"]);
    write_rows(
        path,
        &header,
        ranking.rows.iter().map(|r| {
            let mut row = vec![r.rank.to_string(), r.algorithm.clone()];
            row.extend(r.means.iter().map(|v| fmt_opt(*v)));
            row.push(r.mean_across_metrics.to_string());
            row
        }),
    )
}

pub fn write_pareto_csv(ranking: &Ranking, front: &[String], path: &Path) -> Result<()> {
    let header = metric_header(&["algorithm"], &["pareto_optimal"]);
    write_rows(
        path,
        &header,
        ranking.rows.iter().map(|r| {
            let mut row = vec![r.algorithm.clone()];
            row.extend(r.means.iter().map(|v| fmt_opt(*v)));
            row.push(front.contains(&r.algorithm).to_string());
            row
        }),
    )
}

pub fn write_complexity_csv(report: &ComplexityReport, path: &Path) -> Result<()> {
    write_rows(
        path,
        &["algorithm", "d", "slope", "class"],
        report
            .rows
            .iter()
            .map(|r| vec![r.algorithm.clone(), r.d.to_string(), r.slope.to_string(), r.class.clone()]),
    )
}

/// Raw trial durations, one row per trial.
pub fn write_timing_samples_csv(report: &ComplexityReport, path: &Path) -> Result<()> {
    write_rows(
        path,
        &["algorithm", "n", "d", "trial", "seconds"],
        report.cells.iter().flat_map(|c| {
            c.sample.times.iter().enumerate().map(move |(t, s)| {
                vec![
                    c.algorithm.clone(),
                    c.sample.n.to_string(),
                    c.sample.d.to_string(),
                    t.to_string(),
                    s.to_string(),
                ]
            })
        }),
    )
}

/// Two-column `n,median_seconds` files, one per (algorithm, d) series.
pub fn write_plot_data(report: &ComplexityReport, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut series: BTreeMap<(String, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for c in &report.cells {
        series
            .entry((c.algorithm.clone(), c.sample.d))
            .or_default()
            .push((c.sample.n, c.median));
    }
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for ((alg, d), points) in series {
        let p = dir.join(format!("{alg}_d{d}.csv"));
        write_rows(&p, &["n", "median_seconds"], points.iter().map(|(n, t)| vec![n.to_string(), t.to_string()]))?;
        paths.push(p);
    }
    Ok(paths)
}

#[derive(Debug, Serialize)]
pub struct DecisionLogEntry<'a> {
    pub algorithm: &'a str,
    pub dataset: &'a str,
    pub seed: u64,
    pub messages: &'a [String],
}

#[derive(Debug, Serialize)]
pub struct BenchReport<'a> {
    pub runs: &'a [RunRecord],
    pub ranking: &'a Ranking,
    pub pareto: &'a [String],
    pub complexity: Option<&'a ComplexityReport>,
    pub decision_logs: Vec<DecisionLogEntry<'a>>,
}

impl<'a> BenchReport<'a> {
    pub fn new(
        runs: &'a [RunRecord],
        ranking: &'a Ranking,
        pareto: &'a [String],
        complexity: Option<&'a ComplexityReport>,
    ) -> Self {
        let decision_logs = runs
            .iter()
            .filter(|r| !r.log.is_empty())
            .map(|r| DecisionLogEntry {
                algorithm: &r.algorithm,
                dataset: &r.dataset,
                seed: r.seed,
                messages: &r.log,
            })
            .collect();
        Self {
            runs,
            ranking,
            pareto,
            complexity,
            decision_logs,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| SpinexError::Io(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }
}
