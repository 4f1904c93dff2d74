//! Similarity-based clustering with explainable neighbors, cluster validation
//! metrics, reference baselines and a benchmarking harness.

pub mod baselines;
pub mod bench;
pub mod config;
pub mod datasets;
pub mod engine;
pub mod error;
pub mod explain;
pub mod linkage;
pub mod log;
pub mod metrics;
pub mod preprocess;
pub mod similarity;
pub mod spinex;
pub mod types;

pub use config::{ApproximationMethod, Components, MultiLevelParams, SpinexConfig, ThresholdSpec};
pub use error::{Result, SpinexError};
pub use explain::ExplainabilityReport;
pub use log::DecisionLog;
pub use metrics::MetricsRecord;
pub use similarity::SimilarityCache;
pub use spinex::Spinex;
pub use types::{ClusterLabels, DataMatrix, SimilarityMatrix, SimilarityMethod};
