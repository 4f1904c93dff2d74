//! Per-observation explanations: which observations are most similar, and by
//! how much each feature differs from them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SpinexConfig;
use crate::error::{Result, SpinexError};
use crate::log::DecisionLog;
use crate::similarity::{compute_similarity, pearson_similarity, SimilarityCache};
use crate::types::{DataMatrix, SimilarityMatrix, SimilarityMethod};

/// Neighbors reported per observation in a full report.
pub const DEFAULT_NEIGHBORS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityAnalysis {
    /// Pearson similarity of this observation to every observation.
    pub similarities: Vec<f64>,
    /// `contributions[f][j] = |x[j][f] - x[i][f]|`.
    pub contributions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborContribution {
    pub neighbor: usize,
    pub similarity: f64,
    /// Absolute per-feature difference to the neighbor.
    pub contributions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborAnalysis {
    pub method: SimilarityMethod,
    pub nearest_neighbors: Vec<usize>,
    pub neighbor_contributions: Vec<NeighborContribution>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObservationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub similarity_analysis: Option<SimilarityAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighbor_analysis: Option<NeighborAnalysis>,
}

/// Explanations keyed by observation index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExplainabilityReport {
    pub observations: BTreeMap<usize, ObservationReport>,
}

impl ExplainabilityReport {
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_index(x: &DataMatrix, i: usize) -> Result<()> {
    if i >= x.n_rows() {
        return Err(SpinexError::IndexOutOfRange { index: i, n: x.n_rows() });
    }
    Ok(())
}

fn abs_diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).collect()
}

fn contribution_columns(x: &DataMatrix, i: usize) -> Vec<Vec<f64>> {
    let xi = x.row(i);
    (0..x.n_cols())
        .map(|f| (0..x.n_rows()).map(|j| (x.get(j, f) - xi[f]).abs()).collect())
        .collect()
}

/// Row `i` of the Pearson similarity matrix plus per-feature absolute differences.
pub fn similarity_contribution(x: &DataMatrix, i: usize) -> Result<SimilarityAnalysis> {
    check_index(x, i)?;
    let s = pearson_similarity(x);
    Ok(SimilarityAnalysis {
        similarities: s.row(i).to_vec(),
        contributions: contribution_columns(x, i),
    })
}

/// The `k` most similar observations to `i` under `s`, most similar first,
/// excluding `i`; ties go to the smaller index.
pub fn neighbors_from_matrix(s: &SimilarityMatrix, x: &DataMatrix, i: usize, k: usize) -> Result<NeighborAnalysis> {
    check_index(x, i)?;
    let n = x.n_rows();
    if k >= n {
        return Err(SpinexError::InvalidK { k, n });
    }
    let row = s.row(i);
    let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    others.truncate(k);
    let xi = x.row(i);
    let neighbor_contributions = others
        .iter()
        .map(|&j| NeighborContribution {
            neighbor: j,
            similarity: row[j],
            contributions: abs_diff(x.row(j), xi),
        })
        .collect();
    Ok(NeighborAnalysis {
        method: s.method().unwrap_or(SimilarityMethod::Correlation),
        nearest_neighbors: others,
        neighbor_contributions,
    })
}

/// Nearest neighbors of observation `i` under `method`.
pub fn nearest_neighbors(x: &DataMatrix, i: usize, k: usize, method: SimilarityMethod, gamma: f64) -> Result<NeighborAnalysis> {
    check_index(x, i)?;
    let (s, _) = compute_similarity(x, method, gamma);
    neighbors_from_matrix(&s, x, i, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

/// Builds the report for every observation, choosing parallel execution from
/// the configuration's parallel settings.
pub fn build_report(x: &DataMatrix, cfg: &SpinexConfig, cache: &SimilarityCache, log: &DecisionLog) -> ExplainabilityReport {
    let mode = if cfg.use_parallel && x.n_rows() >= cfg.parallel_threshold {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    build_report_with(x, cfg, cache, log, mode)
}

/// Similarity analysis uses Pearson; neighbor analysis uses the first
/// configured similarity method with up to five neighbors.
pub fn build_report_with(
    x: &DataMatrix,
    cfg: &SpinexConfig,
    cache: &SimilarityCache,
    log: &DecisionLog,
    mode: Execution,
) -> ExplainabilityReport {
    if !cfg.enable_similarity_analysis && !cfg.enable_neighbor_analysis {
        return ExplainabilityReport::default();
    }
    let n = x.n_rows();
    let pearson = cfg.enable_similarity_analysis.then(|| pearson_similarity(x));
    let neighbor_matrix = if cfg.enable_neighbor_analysis {
        let method = cfg.similarity_methods.first().copied().unwrap_or(SimilarityMethod::Correlation);
        Some(cache.get_similarity(x, method, log))
    } else {
        None
    };
    let k = DEFAULT_NEIGHBORS.min(n.saturating_sub(1));

    let one = |i: usize| -> (usize, ObservationReport) {
        let similarity_analysis = pearson.as_ref().map(|s| SimilarityAnalysis {
            similarities: s.row(i).to_vec(),
            contributions: contribution_columns(x, i),
        });
        let neighbor_analysis = neighbor_matrix
            .as_ref()
            .map(|s| neighbors_from_matrix(s, x, i, k).expect("k < n and i < n"));
        (
            i,
            ObservationReport {
                similarity_analysis,
                neighbor_analysis,
            },
        )
    };
    let observations: BTreeMap<usize, ObservationReport> = match mode {
        Execution::Sequential => (0..n).map(one).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(one).collect::<Vec<_>>().into_iter().collect(),
    };
    log.push(format!("Explainability analysis completed for {n} observations"));
    ExplainabilityReport { observations }
}
