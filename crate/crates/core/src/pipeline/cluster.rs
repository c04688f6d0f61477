use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{PipelineError, PipelineParams, Unclustered};
use crate::graph::{Coloring, Graph};
use crate::seed::Seed;
use crate::spectral::{extreme_eigenpairs, full_spectrum_dense, ITERATIVE_TOL};

/// Below this size the dense oracle supplies the embedding.
const DENSE_EMBEDDING_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterOutcome {
    pub coloring: Coloring,
    /// Samples drawn, the accepted one included.
    pub attempts: usize,
    pub centers: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
}

/// Rows are vertices, columns the `dim` most negative eigenvectors.
struct Embedding {
    dim: usize,
    coords: Vec<f64>,
}

impl Embedding {
    fn bottom(g: &Graph, dim: usize) -> Result<Self, PipelineError> {
        let n = g.n();
        let spectrum = if n <= DENSE_EMBEDDING_LIMIT {
            full_spectrum_dense(g)?
        } else {
            extreme_eigenpairs(g, dim, 0, ITERATIVE_TOL)?
        };
        let bottom = spectrum.bottom(dim);
        let mut coords = vec![0.0; n * dim];
        for (j, pair) in bottom.iter().enumerate() {
            for (u, x) in pair.vector.iter().enumerate() {
                coords[u * dim + j] = *x;
            }
        }
        Ok(Embedding { dim, coords })
    }

    fn dist2(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (&self.coords[u * self.dim..][..self.dim], &self.coords[v * self.dim..][..self.dim]);
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
    }
}

/// Sets `S_i` around `centers`; `None` if some vertex falls in two.
fn balls(emb: &Embedding, n: usize, centers: &[usize], radius2: f64) -> Option<Vec<u32>> {
    let mut label = vec![0u32; n];
    for (u, l) in label.iter_mut().enumerate() {
        for (i, &c) in centers.iter().enumerate() {
            if emb.dist2(u, c) < radius2 {
                if *l != 0 {
                    return None;
                }
                *l = i as u32 + 1;
            }
        }
    }
    Some(label)
}

fn finish(emb: &Embedding, mut label: Vec<u32>, centers: Vec<usize>, attempts: usize, rule: Unclustered) -> ClusterOutcome {
    let k = centers.len() as u32;
    let mut cluster_sizes = vec![0; centers.len()];
    for &l in &label {
        if l != 0 {
            cluster_sizes[l as usize - 1] += 1;
        }
    }
    for u in 0..label.len() {
        if label[u] == 0 {
            label[u] = match rule {
                Unclustered::FirstColor => 1,
                Unclustered::NearestCenter => {
                    let mut best = 0;
                    for i in 1..centers.len() {
                        if emb.dist2(u, centers[i]) < emb.dist2(u, centers[best]) {
                            best = i;
                        }
                    }
                    best as u32 + 1
                }
            };
        }
    }
    let coloring = Coloring::new(k, label).expect("labels within 1..=k");
    ClusterOutcome { coloring, attempts, centers, cluster_sizes }
}

/// Three random centers in the plane of the two most negative
/// eigenvectors; a triplet is rejected when some vertex is close to two
/// centers or the sets are too small.
pub fn spectral_clustering(g: &Graph, d: f64, params: &PipelineParams) -> Result<Coloring, PipelineError> {
    spectral_clustering_traced(g, d, params).map(|o| o.coloring)
}

pub fn spectral_clustering_traced(g: &Graph, d: f64, params: &PipelineParams) -> Result<ClusterOutcome, PipelineError> {
    params.validate()?;
    let n = g.n();
    // Without edges the embedding is an arbitrary basis of the kernel.
    if n < 3 || g.m() == 0 {
        return Err(PipelineError::ClusteringFailed { attempts: 0 });
    }
    let emb = Embedding::bottom(g, 2)?;
    let radius2 = 1.0 / (params.cluster_constant * n as f64);
    let min_size = (1.0 / 3.0 - params.cluster_size_slack) * n as f64;
    let coverage = n as f64 - params.coverage_slack * n as f64 / d;
    let coverage = if coverage.is_nan() { n as f64 } else { coverage };
    let mut rng = Seed::new(params.seed).child("triplets").rng();
    for attempt in 1..=params.triplet_attempt_cap {
        let centers = sample(&mut rng, n, 3).into_vec();
        let Some(label) = balls(&emb, n, &centers, radius2) else { continue };
        let mut sizes = [0usize; 3];
        for &l in &label {
            if l != 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        let total: usize = sizes.iter().sum();
        if sizes.iter().all(|&s| s as f64 >= min_size) && total as f64 >= coverage {
            return Ok(finish(&emb, label, centers, attempt, params.unclustered));
        }
    }
    Err(PipelineError::ClusteringFailed { attempts: params.triplet_attempt_cap })
}

/// `k` random centers in the span of the `k − 1` most negative
/// eigenvectors; samples with two centers closer than twice the radius are
/// redrawn.
pub fn spectral_k_clustering(g: &Graph, k: u32, d: f64, params: &PipelineParams) -> Result<ClusterOutcome, PipelineError> {
    params.validate()?;
    assert!(k >= 3, "k-class clustering needs k >= 3");
    let n = g.n();
    let k_us = k as usize;
    if n < k_us {
        return Err(PipelineError::ClusteringFailed { attempts: 0 });
    }
    let emb = Embedding::bottom(g, k_us - 1)?;
    let c1 = params.k_cluster_c1.unwrap_or(70.0 * k as f64);
    let radius2 = 1.0 / (c1 * n as f64);
    let slack = 1.0 / (params.k_cluster_c2 * d.powf(2.0 * params.k_cluster_exponent));
    let min_size = (1.0 / k as f64 - slack) * n as f64;
    let mut rng = Seed::new(params.seed).child("k-centers").rng();
    for attempt in 1..=params.triplet_attempt_cap {
        let centers = sample(&mut rng, n, k_us).into_vec();
        let separated = (0..k_us).all(|i| (i + 1..k_us).all(|j| emb.dist2(centers[i], centers[j]) >= 4.0 * radius2));
        if !separated {
            continue;
        }
        let label = balls(&emb, n, &centers, radius2).expect("separated balls are disjoint");
        let mut sizes = vec![0usize; k_us];
        for &l in &label {
            if l != 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        if sizes.iter().all(|&s| s as f64 >= min_size) {
            return Ok(finish(&emb, label, centers, attempt, params.unclustered));
        }
    }
    Err(PipelineError::ClusteringFailed { attempts: params.triplet_attempt_cap })
}
