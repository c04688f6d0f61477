use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::generators::PlantedInstance;
use crate::graph::{Coloring, GraphError, VertexSet, FREE};

/// Largest `k` for which label permutations are enumerated.
pub const PERMUTATION_LIMIT: u32 = 8;

/// Ground-truth diagnostics for a run on a planted instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub sb: VertexSet,
    pub sb_size: usize,
    /// Free vertices after cautious uncoloring.
    pub b: Option<usize>,
    /// Distance from the final coloring to the planted one.
    pub distance: Option<usize>,
}

impl DiagnosticReport {
    pub fn new(inst: &PlantedInstance, eps: f64, b: Option<usize>, result: Option<&Coloring>) -> Self {
        let sb = compute_sb(inst, eps);
        let distance = result.and_then(|c| approx_distance(c, &inst.planted, inst.planted.k()).ok());
        DiagnosticReport { sb_size: sb.len(), sb, b, distance }
    }
}

/// Vertices whose neighbor count in some other planted class leaves
/// `[(1/3 − eps)d, (1/3 + eps)d]`, with `d` the host average degree.
pub fn compute_sb(inst: &PlantedInstance, eps: f64) -> VertexSet {
    let d = inst.host.average_degree();
    let (lo, hi) = ((1.0 / 3.0 - eps) * d, (1.0 / 3.0 + eps) * d);
    let k = inst.planted.k() as usize;
    let g = &inst.result;
    let mut bad = Vec::new();
    let mut counts = vec![0usize; k + 1];
    for v in 0..g.n() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &u in g.neighbors(v) {
            counts[inst.planted.get(u as usize) as usize] += 1;
        }
        let own = inst.planted.get(v) as usize;
        if (1..=k).any(|l| l != own && ((counts[l] as f64) < lo || counts[l] as f64 > hi)) {
            bad.push(v);
        }
    }
    VertexSet::from_unsorted(bad)
}

fn permutations(k: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c as u32 + 1);
                go(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k as usize], &mut out);
    out
}

/// Confusion counts `m[a][b]` = vertices with `c1 = a`, `c2 = b`.
fn confusion(c1: &Coloring, c2: &Coloring, k: u32) -> Result<Vec<Vec<usize>>, PipelineError> {
    if k > PERMUTATION_LIMIT {
        return Err(PipelineError::TooManyColors { k, limit: PERMUTATION_LIMIT });
    }
    if c1.len() != c2.len() {
        return Err(GraphError::LengthMismatch { coloring: c1.len(), graph: c2.len() }.into());
    }
    let size = k.max(c1.k()).max(c2.k()) as usize + 1;
    let mut m = vec![vec![0usize; size]; size];
    for (a, b) in c1.as_slice().iter().zip(c2.as_slice()) {
        m[*a as usize][*b as usize] += 1;
    }
    Ok(m)
}

fn best_agreement(m: &[Vec<usize>], k: u32) -> usize {
    permutations(k)
        .iter()
        .map(|p| p.iter().enumerate().map(|(a, &b)| m[a + 1][b as usize]).sum::<usize>())
        .max()
        .unwrap_or(0)
}

/// Minimum Hamming distance over relabelings of `c1` by `k!` permutations.
pub fn approx_distance(c1: &Coloring, c2: &Coloring, k: u32) -> Result<usize, PipelineError> {
    let m = confusion(c1, c2, k)?;
    let both_free = m[FREE as usize][FREE as usize];
    Ok(c1.len() - both_free - best_agreement(&m, k))
}

/// Colored vertices of `partial` that disagree with `planted` under the
/// best relabeling; free vertices are ignored.
pub fn disagreement(partial: &Coloring, planted: &Coloring) -> Result<usize, PipelineError> {
    let k = planted.k().max(partial.k());
    let m = confusion(partial, planted, k)?;
    let colored = partial.len() - partial.free_count();
    Ok(colored - best_agreement(&m, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Model;
    use crate::graph::Graph;

    fn col(k: u32, v: &[u32]) -> Coloring {
        Coloring::new(k, v.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(approx_distance(&col(3, &[1, 2, 3, 1]), &col(3, &[2, 3, 1, 2]), 3).unwrap(), 0);
        assert_eq!(approx_distance(&col(3, &[1, 1, 2, 3]), &col(3, &[1, 2, 2, 3]), 3).unwrap(), 1);
        assert_eq!(approx_distance(&col(2, &[1, 1, 2, 2]), &col(2, &[2, 2, 1, 1]), 2).unwrap(), 0);
        assert!(matches!(
            approx_distance(&col(9, &[1]), &col(9, &[1]), 9),
            Err(PipelineError::TooManyColors { .. })
        ));
    }

    #[test]
    fn disagreement_ignores_free() {
        assert_eq!(disagreement(&col(3, &[0, 2, 2, 0]), &col(3, &[1, 1, 2, 3])).unwrap(), 1);
        assert_eq!(disagreement(&col(3, &[0, 0, 0]), &col(3, &[1, 2, 3])).unwrap(), 0);
    }

    #[test]
    fn sb_examples() {
        let planted = Coloring::new(3, (0..36).map(|v| v % 3 + 1).collect()).unwrap();
        let inst = PlantedInstance::new(Graph::complete(36), planted, Model::AA, 35.0, 0).unwrap();
        assert!(compute_sb(&inst, 0.01).is_empty());
        assert!(compute_sb(&inst, 1.0 / 3.0).is_empty());

        let planted = Coloring::new(3, vec![1, 2, 3, 1, 2, 3]).unwrap();
        let inst = PlantedInstance::new(Graph::complete(6), planted, Model::AA, 5.0, 0).unwrap();
        assert_eq!(compute_sb(&inst, 0.01).len(), 6);
    }
}
