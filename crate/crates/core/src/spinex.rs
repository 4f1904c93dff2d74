//! The clusterer: similarity per method, method selection, optional
//! multi-level reclustering and explainability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ApproximationMethod, Components, SpinexConfig};
use crate::engine::{cluster_from_similarity, set_threshold};
use crate::error::{Result, SpinexError};
use crate::explain::{build_report, ExplainabilityReport};
use crate::log::DecisionLog;
use crate::metrics::{composite_score, evaluate, select_best, MetricsCache, MetricsRecord};
use crate::preprocess::{enforce_max_features, fit_pca, random_sample, PcaCache};
use crate::similarity::SimilarityCache;
use crate::types::{canonicalize_labels, ClusterLabels, DataMatrix, SimilarityMethod};

const DEFAULT_PCA_TARGET: Components = Components::Fraction(0.95);

/// Result of clustering with one similarity method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: SimilarityMethod,
    pub labels: ClusterLabels,
}

/// Per-method score computed during selection.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodScore {
    pub method: SimilarityMethod,
    pub metrics: MetricsRecord,
    pub score: f64,
}

#[derive(Debug)]
pub struct Spinex {
    config: SpinexConfig,
    similarity_cache: SimilarityCache,
    pca_cache: PcaCache,
    metrics_cache: MetricsCache,
    log: DecisionLog,
    best_method: Option<SimilarityMethod>,
    scores: Vec<MethodScore>,
    explainability: ExplainabilityReport,
}

impl Spinex {
    pub fn new(config: SpinexConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            similarity_cache: SimilarityCache::with_gamma(config.gamma),
            config,
            pca_cache: PcaCache::new(),
            metrics_cache: MetricsCache::new(),
            log: DecisionLog::new(),
            best_method: None,
            scores: Vec::new(),
            explainability: ExplainabilityReport::default(),
        })
    }

    pub fn config(&self) -> &SpinexConfig {
        &self.config
    }

    pub fn log(&self) -> &DecisionLog {
        &self.log
    }

    pub fn similarity_cache(&self) -> &SimilarityCache {
        &self.similarity_cache
    }

    pub fn pca_cache(&self) -> &PcaCache {
        &self.pca_cache
    }

    pub fn metrics_cache(&self) -> &MetricsCache {
        &self.metrics_cache
    }

    pub fn best_method(&self) -> Option<SimilarityMethod> {
        self.best_method
    }

    /// Scores from the last selection; empty when only one method was configured.
    pub fn method_scores(&self) -> &[MethodScore] {
        &self.scores
    }

    pub fn explainability_results(&self) -> &ExplainabilityReport {
        &self.explainability
    }

    fn pca_target(&self) -> Components {
        self.config.n_components.unwrap_or(DEFAULT_PCA_TARGET)
    }

    /// Clusters `x` with a single configured similarity method.
    pub fn cluster_with_method(&self, x: &DataMatrix, method: SimilarityMethod) -> Result<ClusterLabels> {
        if !self.config.similarity_methods.contains(&method) {
            let names: Vec<&str> = self.config.similarity_methods.iter().map(|m| m.as_str()).collect();
            return Err(SpinexError::MethodNotConfigured(names.join(", ")));
        }
        let projected;
        let data = if self.config.use_pca {
            projected = self.pca_cache.apply_pca(x, self.pca_target(), &self.log)?;
            projected.as_ref()
        } else {
            x
        };
        self.log.push(format!(
            "Shape of X before similarity matrix calculation: ({}, {})",
            data.n_rows(),
            data.n_cols()
        ));
        let s = self.similarity_cache.get_similarity(data, method, &self.log);
        self.log.push(format!("Similarity matrix shape: ({}, {})", s.n(), s.n()));
        let t = set_threshold(&s, self.config.threshold, &self.log);
        Ok(cluster_from_similarity(&s, data.n_rows(), Some(t), &self.config, &self.log))
    }

    /// Clusters `x` with every configured method, in configured order.
    pub fn cluster_all_methods(&self, x: &DataMatrix) -> Result<Vec<MethodResult>> {
        let methods = &self.config.similarity_methods;
        let run = |&method: &SimilarityMethod| {
            self.cluster_with_method(x, method).map(|labels| MethodResult { method, labels })
        };
        if self.config.use_parallel && x.n_rows() >= self.config.parallel_threshold {
            match self.config.max_workers {
                Some(w) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(w)
                        .build()
                        .map_err(|e| SpinexError::InvalidConfig(e.to_string()))?;
                    pool.install(|| methods.par_iter().map(run).collect())
                }
                None => methods.par_iter().map(run).collect(),
            }
        } else {
            methods.iter().map(run).collect()
        }
    }

    /// Runs every method and returns the labels of the best-scoring one.
    /// With a single configured method no metrics are evaluated.
    pub fn find_best(&mut self, x: &DataMatrix, ground_truth: Option<&[usize]>) -> Result<(ClusterLabels, SimilarityMethod)> {
        let results = self.cluster_all_methods(x)?;
        self.scores.clear();
        if results.len() == 1 {
            let only = results.into_iter().next().expect("one result");
            return Ok((only.labels, only.method));
        }
        let tier = self.config.evaluation_tier;
        for r in &results {
            let metrics = evaluate(
                x,
                &r.labels,
                r.method.as_str(),
                tier,
                ground_truth,
                &self.metrics_cache,
                &self.log,
            );
            let score = composite_score(&metrics, tier);
            self.scores.push(MethodScore {
                method: r.method,
                metrics,
                score,
            });
        }
        let scored: Vec<(SimilarityMethod, f64)> = self.scores.iter().map(|s| (s.method, s.score)).collect();
        let best = select_best(&scored).expect("at least one method");
        let labels = results
            .into_iter()
            .find(|r| r.method == best)
            .expect("winner present")
            .labels;
        Ok((labels, best))
    }

    fn check_ground_truth(&self, n: usize) -> Result<()> {
        match &self.config.ground_truth {
            Some(t) if t.len() != n => Err(SpinexError::InvalidInput(format!(
                "ground_truth has {} labels for {n} rows",
                t.len()
            ))),
            None if self.config.evaluation_tier >= 2 => Err(SpinexError::InvalidConfig(format!(
                "evaluation_tier {} requires ground_truth",
                self.config.evaluation_tier
            ))),
            _ => Ok(()),
        }
    }

    /// Full pipeline: feature guard, optional approximation, method selection,
    /// optional multi-level reclustering and explainability. Returns one
    /// label per input row.
    pub fn fit_predict(&mut self, x: &DataMatrix) -> Result<ClusterLabels> {
        self.check_ground_truth(x.n_rows())?;
        let x = enforce_max_features(x, self.config.max_features, &self.log);
        let truth = self.config.ground_truth.clone();

        let mut kept: Option<Vec<usize>> = None;
        let work = if self.config.use_approximation {
            match self.config.approximation_method {
                ApproximationMethod::RandomSampling => {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.config.rng_seed);
                    let (sample, idx) = random_sample(&x, self.config.sample_size, &mut rng, &self.log)?;
                    kept = Some(idx);
                    sample
                }
                ApproximationMethod::Pca => {
                    let model = fit_pca(&x, self.pca_target())?;
                    self.log.push(format!(
                        "Data reduced to {} dimensions using PCA.",
                        model.n_components()
                    ));
                    model.transform(&x)?
                }
                other => {
                    return Err(SpinexError::NotImplemented(other.as_str().into()))
                }
            }
        } else {
            x.clone()
        };
        let work_truth: Option<Vec<usize>> = match (&truth, &kept) {
            (Some(t), Some(idx)) => Some(idx.iter().map(|&i| t[i]).collect()),
            (Some(t), None) => Some(t.clone()),
            _ => None,
        };

        let (mut labels, best) = self.find_best(&work, work_truth.as_deref())?;
        if self.config.use_multi_level {
            self.log.push("Applying multi-level clustering to best similarity matrix");
            let s = self.similarity_cache.get_similarity(&work, best, &self.log);
            labels = cluster_from_similarity(&s, work.n_rows(), None, &self.config, &self.log);
        }
        if let Some(idx) = &kept {
            labels = propagate_labels(&x, idx, &labels);
        }
        self.best_method = Some(best);
        self.log.push(format!("Best clustering method: {best}"));

        self.explainability = build_report(&x, &self.config, &self.similarity_cache, &self.log);
        Ok(labels)
    }

    /// Accepts rank-1 or rank-2 input given as a shape plus row-major values.
    pub fn fit_predict_shape(&mut self, shape: &[usize], values: Vec<f64>) -> Result<ClusterLabels> {
        let x = DataMatrix::from_shape(shape, values)?;
        self.fit_predict(&x)
    }
}

/// Assigns every row of `x` the label of its nearest sampled row (Euclidean;
/// ties go to the earlier sampled row).
pub fn propagate_labels(x: &DataMatrix, kept: &[usize], sample_labels: &ClusterLabels) -> ClusterLabels {
    let sample = sample_labels.assignments();
    let full: Vec<usize> = (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let mut best = (f64::INFINITY, 0usize);
            for (pos, &k) in kept.iter().enumerate() {
                let d: f64 = xi.iter().zip(x.row(k)).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, pos);
                }
            }
            sample[best.1]
        })
        .collect();
    canonicalize_labels(&full)
}
