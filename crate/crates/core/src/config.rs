//! Configuration for the SPINEX clusterer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinexError};
use crate::types::SimilarityMethod;

/// How the merge threshold is derived from a similarity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(try_from = "ThresholdRepr", into = "ThresholdRepr")]
pub enum ThresholdSpec {
    /// Median plus the population standard deviation of above-median entries.
    #[default]
    Auto,
    /// The given percentile (0, 100) of all entries.
    Percentile(f64),
    Fixed(f64),
}

impl ThresholdSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdSpec::Auto => Ok(()),
            ThresholdSpec::Percentile(p) if p > 0.0 && p < 100.0 => Ok(()),
            ThresholdSpec::Percentile(p) => Err(SpinexError::InvalidThreshold(format!(
                "percentile {p} outside (0, 100)"
            ))),
            ThresholdSpec::Fixed(v) if v.is_finite() => Ok(()),
            ThresholdSpec::Fixed(v) => Err(SpinexError::InvalidThreshold(format!("{v}"))),
        }
    }
}

impl fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdSpec::Auto => f.write_str("auto"),
            ThresholdSpec::Percentile(p) => write!(f, "{p}%"),
            ThresholdSpec::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Accepts `auto`, `90%` or a plain number.
impl FromStr for ThresholdSpec {
    type Err = SpinexError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = if s.eq_ignore_ascii_case("auto") {
            ThresholdSpec::Auto
        } else if let Some(p) = s.strip_suffix('%') {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| SpinexError::InvalidThreshold(s.to_string()))?;
            ThresholdSpec::Percentile(p)
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| SpinexError::InvalidThreshold(s.to_string()))?;
            ThresholdSpec::Fixed(v)
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ThresholdRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ThresholdRepr> for ThresholdSpec {
    type Error = SpinexError;

    fn try_from(r: ThresholdRepr) -> Result<Self> {
        match r {
            ThresholdRepr::Number(v) => {
                let t = ThresholdSpec::Fixed(v);
                t.validate()?;
                Ok(t)
            }
            ThresholdRepr::Text(s) => s.parse(),
        }
    }
}

impl From<ThresholdSpec> for ThresholdRepr {
    fn from(t: ThresholdSpec) -> Self {
        match t {
            ThresholdSpec::Fixed(v) => ThresholdRepr::Number(v),
            other => ThresholdRepr::Text(other.to_string()),
        }
    }
}

/// PCA target: an explicit component count or a cumulative explained-variance fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Components {
    Count(usize),
    Fraction(f64),
}

impl Components {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Components::Count(0) => Err(SpinexError::InvalidTarget("zero components".into())),
            Components::Fraction(f) if !(f > 0.0 && f < 1.0) => Err(SpinexError::InvalidTarget(
                format!("variance fraction {f} outside (0, 1)"),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for Components {
    fn default() -> Self {
        Components::Fraction(0.95)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApproximationMethod {
    #[default]
    RandomSampling,
    Pca,
    /// Reserved; not implemented.
    Tsne,
    /// Reserved; not implemented.
    Umap,
}

impl ApproximationMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ApproximationMethod::RandomSampling => "random_sampling",
            ApproximationMethod::Pca => "pca",
            ApproximationMethod::Tsne => "tsne",
            ApproximationMethod::Umap => "umap",
        }
    }
}

impl FromStr for ApproximationMethod {
    type Err = SpinexError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random_sampling" | "random-sampling" | "rs" => Ok(ApproximationMethod::RandomSampling),
            "pca" => Ok(ApproximationMethod::Pca),
            "tsne" | "t-sne" => Ok(ApproximationMethod::Tsne),
            "umap" => Ok(ApproximationMethod::Umap),
            other => Err(SpinexError::InvalidConfig(format!(
                "unknown approximation method '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiLevelParams {
    pub levels: usize,
    pub initial_threshold: f64,
}

impl Default for MultiLevelParams {
    fn default() -> Self {
        Self {
            levels: 3,
            initial_threshold: 0.5,
        }
    }
}

/// Every knob of the clusterer. Defaults follow the reference constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinexConfig {
    pub threshold: ThresholdSpec,
    pub n_clusters: Option<usize>,
    pub use_pca: bool,
    pub n_components: Option<Components>,
    pub similarity_methods: Vec<SimilarityMethod>,
    pub evaluation_tier: u8,
    pub ground_truth: Option<Vec<usize>>,
    pub use_approximation: bool,
    pub approximation_method: ApproximationMethod,
    pub sample_size: f64,
    pub use_parallel: bool,
    pub parallel_threshold: usize,
    pub max_workers: Option<usize>,
    pub use_multi_level: bool,
    pub multi_level_params: MultiLevelParams,
    pub max_features: usize,
    pub enable_similarity_analysis: bool,
    pub enable_neighbor_analysis: bool,
    /// RBF kernel width.
    pub gamma: f64,
    pub rng_seed: u64,
}

impl Default for SpinexConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdSpec::Auto,
            n_clusters: None,
            use_pca: false,
            n_components: None,
            similarity_methods: SimilarityMethod::ALL.to_vec(),
            evaluation_tier: 1,
            ground_truth: None,
            use_approximation: false,
            approximation_method: ApproximationMethod::RandomSampling,
            sample_size: 0.5,
            use_parallel: false,
            parallel_threshold: 5000,
            max_workers: None,
            use_multi_level: false,
            multi_level_params: MultiLevelParams::default(),
            max_features: 100,
            enable_similarity_analysis: false,
            enable_neighbor_analysis: false,
            gamma: 1.0,
            rng_seed: 0,
        }
    }
}

impl SpinexConfig {
    pub fn validate(&self) -> Result<()> {
        self.threshold.validate()?;
        if self.similarity_methods.is_empty() {
            return Err(SpinexError::InvalidConfig(
                "similarity_methods must not be empty".into(),
            ));
        }
        if !(1..=3).contains(&self.evaluation_tier) {
            return Err(SpinexError::InvalidConfig(format!(
                "evaluation_tier must be 1, 2 or 3 (got {})",
                self.evaluation_tier
            )));
        }
        if self.n_clusters == Some(0) {
            return Err(SpinexError::InvalidConfig("n_clusters must be positive".into()));
        }
        if let Some(c) = &self.n_components {
            c.validate()?;
        }
        if !(self.sample_size > 0.0 && self.sample_size <= 1.0) {
            return Err(SpinexError::InvalidConfig(format!(
                "sample_size must lie in (0, 1] (got {})",
                self.sample_size
            )));
        }
        if self.parallel_threshold == 0 || self.max_workers == Some(0) || self.max_features == 0 {
            return Err(SpinexError::InvalidConfig(
                "parallel_threshold, max_workers and max_features must be positive".into(),
            ));
        }
        if self.multi_level_params.levels == 0 {
            return Err(SpinexError::InvalidConfig("multi-level levels must be >= 1".into()));
        }
        let t = self.multi_level_params.initial_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(SpinexError::InvalidConfig(format!(
                "multi-level initial_threshold must lie in (0, 1] (got {t})"
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SpinexError::InvalidConfig(format!("gamma must be positive (got {})", self.gamma)));
        }
        Ok(())
    }
}
