//! The spectral 3-coloring pipeline: clustering, iterative recoloring,
//! cautious uncoloring, safe recoloring and brute force, plus the random
//! graph variant with a 2SAT finish and the k-class clustering.

mod cluster;
mod diagnostics;
mod sparse;
mod stages;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::spectral::SpectralError;
use crate::twosat::TwoSatError;

pub use cluster::{spectral_clustering, spectral_clustering_traced, spectral_k_clustering, ClusterOutcome};
pub use diagnostics::{approx_distance, compute_sb, disagreement, DiagnosticReport};
pub use sparse::{sparse_3_color, SparseColorError};
pub use stages::{
    brute_force_components, cautious_uncolor, cautious_uncolor_ordered, color_ar, color_ra, iterative_recolor,
    iterative_recolor_with, one_step_refine, safe_recolor, ArOutcome, RaOutcome, StageFailure, StageTrace,
    SweepOrder,
};

/// What happens to vertices outside every cluster after stage 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unclustered {
    /// Color 1.
    FirstColor,
    /// Color of the closest accepted center in the embedding.
    NearestCenter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub eps: f64,
    /// Clustering radius is `1/(a·n)` in squared embedding distance.
    pub cluster_constant: f64,
    /// Each cluster needs at least `(1/3 − slack)·n` vertices.
    pub cluster_size_slack: f64,
    /// Clusters must cover at least `n − coverage_slack·n/d` vertices.
    pub coverage_slack: f64,
    pub unclustered: Unclustered,
    pub recolor_rounds_factor: f64,
    pub recolor_cap: usize,
    /// `None` means `⌈log₂ n⌉`.
    pub component_cap: Option<usize>,
    pub triplet_attempt_cap: usize,
    pub k: u32,
    /// `c¹_k`; `None` means `70k`.
    pub k_cluster_c1: Option<f64>,
    pub k_cluster_c2: f64,
    /// Exponent in the `1/(c²·d^{2c})` size slack of the k-class clustering.
    pub k_cluster_exponent: f64,
    /// Multiplier on `2m/n` when `d` must be estimated from the planted graph.
    pub degree_compensation: f64,
    /// Seed for the random center choices.
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            eps: 0.01,
            cluster_constant: 70.0,
            cluster_size_slack: 0.3,
            coverage_slack: f64::INFINITY,
            unclustered: Unclustered::NearestCenter,
            recolor_rounds_factor: 1.0,
            recolor_cap: 300,
            component_cap: None,
            triplet_attempt_cap: 2000,
            k: 3,
            k_cluster_c1: None,
            k_cluster_c2: 1.0,
            k_cluster_exponent: 0.5,
            degree_compensation: 1.5,
            seed: 0,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |what: &str| Err(PipelineError::InvalidParams(what.to_string()));
        if !(self.eps > 0.0 && self.eps < 1.0 / 6.0) {
            return bad("eps must lie in (0, 1/6)");
        }
        if !(self.cluster_constant > 0.0) {
            return bad("cluster_constant must be positive");
        }
        if self.recolor_cap == 0 || self.triplet_attempt_cap == 0 || self.component_cap == Some(0) {
            return bad("caps must be positive");
        }
        if self.k < 2 {
            return bad("k must be at least 2");
        }
        if self.cluster_size_slack.is_nan() || self.coverage_slack.is_nan() || !(self.recolor_rounds_factor >= 0.0) {
            return bad("slacks must be numbers");
        }
        Ok(())
    }

    /// Constants that work at `n` in the thousands. With the defaults,
    /// cautious uncoloring at `eps = 0.01` strips almost every vertex and
    /// radius `1/(70n)` balls are too small to tell classes apart.
    pub fn desk_scale() -> Self {
        PipelineParams {
            eps: 0.1,
            cluster_constant: 3.0,
            cluster_size_slack: 1.0 / 3.0 - 0.15,
            coverage_slack: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn component_cap_for(&self, n: usize) -> usize {
        self.component_cap.unwrap_or_else(|| (n.max(2) as f64).log2().ceil() as usize)
    }
}

/// `d` for thresholds: the host's average degree when the host is known,
/// otherwise the planted graph's average degree times the compensation
/// for edges removed inside classes.
pub fn estimate_d(g: &Graph, host: Option<&Graph>, params: &PipelineParams) -> f64 {
    match host {
        Some(h) => h.average_degree(),
        None => g.average_degree() * params.degree_compensation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    Oversize { size: usize, cap: usize },
    Unsatisfiable { component: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("no accepted clustering within {attempts} attempts")]
    ClusteringFailed { attempts: usize },
    #[error("brute force aborted: {0:?}")]
    Abort(AbortReason),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{k} colors exceeds the permutation guard of {limit}")]
    TooManyColors { k: u32, limit: u32 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    TwoSat(#[from] TwoSatError),
}
