use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{is_balanced, small_coloring, ForgeError};
use crate::generators::{apply_planting, gen_degree_sequence};
use crate::graph::{is_legal_coloring, Coloring, Graph};
use crate::seed::Seed;
use crate::spectral::{adjacency_matrix, DENSE_CAP};

/// Largest `Q` whose balanced coloring is searched for by brute force.
pub const AA_BRUTE_FORCE_LIMIT: usize = 12;
const PERTURBATION_TOL: f64 = 1e-6;

/// Checks recomputed on the finished instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AaCertificate {
    pub regular_degree: Option<usize>,
    /// Planting `H` reproduces `G` edge for edge.
    pub replay: bool,
    /// Dense spectra, present when `n` is within the dense cap.
    pub lambda_hat_h: Option<f64>,
    pub lambda_hat_z: Option<f64>,
    /// `λ̂(Z) + 4 + √(d−4)`.
    pub weyl_bound: Option<f64>,
    /// Largest `|λ_i(H) − λ_i(Z ⊕ isolated)|`.
    pub max_shift: Option<f64>,
    /// Spectral norm of `H − (Z ⊕ isolated)`.
    pub added_norm: Option<f64>,
}

impl AaCertificate {
    pub fn holds(&self, d: usize) -> bool {
        let spectral = match (self.lambda_hat_h, self.weyl_bound, self.max_shift, self.added_norm) {
            (Some(h), Some(bound), Some(shift), Some(norm)) => {
                h <= bound + PERTURBATION_TOL && shift <= norm + PERTURBATION_TOL
            }
            _ => true,
        };
        self.regular_degree == Some(d) && self.replay && spectral
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AaInstance {
    pub q: Graph,
    pub chi_q: Coloring,
    /// Expander on the vertices after `Q`; connectors come first.
    pub z: Graph,
    pub plant_z: Coloring,
    pub z3: Graph,
    /// `Q` on `0..n(Q)`, `Z3` shifted by `n(Q)`.
    pub g: Graph,
    /// `χ_Q ∪ plant_Z`, a planting of `h`.
    pub planted: Coloring,
    pub h: Graph,
    /// Connector ids in `G`.
    pub connectors: Vec<usize>,
    pub d: usize,
    pub certificate: AaCertificate,
}

fn sorted_eigenvalues(g: &Graph) -> Vec<f64> {
    let mut ev: Vec<f64> = adjacency_matrix(g).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn lambda_hat(ev: &[f64]) -> f64 {
    ev[1].max(ev[ev.len() - 1].abs())
}

/// `Q` joined to a random expander through `d − 4` connectors per
/// `Q` vertex, all of the `Q` vertex's planted color.
pub fn forge_aa(q: &Graph, n: usize, d: usize, seed: &Seed, chi_q: Option<&Coloring>) -> Result<AaInstance, ForgeError> {
    let n1 = q.n();
    if n1 == 0 || q.regular_degree() != Some(4) {
        return Err(ForgeError::NotRegular(4));
    }
    let chi_q = match chi_q {
        Some(c) => c.clone(),
        None => small_coloring(q, AA_BRUTE_FORCE_LIMIT, "Q")?,
    };
    if chi_q.k() != 3 || !chi_q.is_total() || !is_legal_coloring(q, &chi_q)?.0 {
        return Err(ForgeError::NotColorable("Q"));
    }
    if !n1.is_multiple_of(3) || !is_balanced(&chi_q) {
        return Err(ForgeError::Unbalanced);
    }
    if d < 5 {
        return Err(ForgeError::ConnectorBudget { need: 0, have: 0 });
    }
    let n2 = n.saturating_sub(n1);
    let per = d - 4;
    let num_conn = n1 * per;
    if num_conn > n2 || n2 < d + 1 {
        return Err(ForgeError::ConnectorBudget { need: num_conn.max(d + 1), have: n2 });
    }

    let degrees: Vec<usize> = (0..n2).map(|v| if v < num_conn { d - 1 } else { d }).collect();
    let z = gen_degree_sequence(&degrees, &seed.child("z"))?;

    // A third of the connectors per class, the rest as even as possible.
    let mut rng = seed.child("plant-z").rng();
    let mut conn_labels: Vec<u32> = (0..num_conn).map(|i| (i % 3) as u32 + 1).collect();
    conn_labels.shuffle(&mut rng);
    let mut rest_labels: Vec<u32> = (0..n2 - num_conn).map(|i| (i % 3) as u32 + 1).collect();
    rest_labels.shuffle(&mut rng);
    let plant_z = Coloring::new(3, conn_labels.iter().chain(&rest_labels).copied().collect())?;
    let z3 = apply_planting(&z, &plant_z)?;
    let g = q.disjoint_union(&z3);

    let mut pools: [Vec<usize>; 3] = Default::default();
    for (i, &c) in conn_labels.iter().enumerate() {
        pools[c as usize - 1].push(n1 + i);
    }
    let mut extra = Vec::with_capacity(num_conn);
    for v in 0..n1 {
        let pool = &mut pools[chi_q.get(v) as usize - 1];
        for _ in 0..per {
            extra.push((v, pool.pop().expect("balanced Q uses each pool exactly")));
        }
    }
    let h = Graph::from_edges(n1 + n2, q.disjoint_union(&z).edges().chain(extra.iter().copied()))?;
    let planted = Coloring::new(3, chi_q.as_slice().iter().chain(plant_z.as_slice()).copied().collect())?;

    let replay = apply_planting(&h, &planted)? == g;
    let mut certificate = AaCertificate {
        regular_degree: h.regular_degree(),
        replay,
        lambda_hat_h: None,
        lambda_hat_z: None,
        weyl_bound: None,
        max_shift: None,
        added_norm: None,
    };
    if h.n() <= DENSE_CAP {
        let padded = Graph::empty(n1).disjoint_union(&z);
        let added = h.filter_edges(|u, v| !padded.has_edge(u, v));
        let (eh, ez, ep, ea) =
            (sorted_eigenvalues(&h), sorted_eigenvalues(&z), sorted_eigenvalues(&padded), sorted_eigenvalues(&added));
        let lz = lambda_hat(&ez);
        certificate.lambda_hat_h = Some(lambda_hat(&eh));
        certificate.lambda_hat_z = Some(lz);
        certificate.weyl_bound = Some(lz + 4.0 + (per as f64).sqrt());
        certificate.max_shift = Some(eh.iter().zip(&ep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        certificate.added_norm = Some(ea[0].abs().max(ea[ea.len() - 1].abs()));
    }
    if !certificate.holds(d) {
        return Err(ForgeError::Certificate(format!("{certificate:?}")));
    }
    let connectors = (n1..n1 + num_conn).collect();
    Ok(AaInstance { q: q.clone(), chi_q, z, plant_z, z3, g, planted, h, connectors, d, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{triple_copy, triple_copy_coloring};

    #[test]
    fn small_aa_instance() {
        let k44 = Graph::complete_multipartite(&[4, 4]);
        let q = triple_copy(&k44);
        let chi = triple_copy_coloring(&Coloring::new(3, vec![1, 1, 1, 1, 2, 2, 2, 2]).unwrap());
        let inst = forge_aa(&q, 240, 8, &Seed::new(1), Some(&chi)).unwrap();
        assert_eq!(inst.h.regular_degree(), Some(8));
        assert!(inst.certificate.replay);
        assert_eq!(inst.connectors.len(), 24 * 4);
        for &c in &inst.connectors {
            assert_eq!(inst.z.degree(c - 24), 7);
        }
        let bound = inst.certificate.weyl_bound.unwrap();
        assert!(inst.certificate.lambda_hat_h.unwrap() <= bound + 1e-6);
        // Q is a component of G.
        assert!((0..24).all(|v| inst.g.neighbors(v).iter().all(|&u| (u as usize) < 24)));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(forge_aa(&Graph::cycle(6), 100, 8, &Seed::new(0), None).unwrap_err(), ForgeError::NotRegular(4));
        let q = Graph::complete_multipartite(&[4, 4]);
        // K_{4,4} has 8 vertices, not divisible into equal thirds.
        assert_eq!(forge_aa(&q, 200, 8, &Seed::new(0), None).unwrap_err(), ForgeError::Unbalanced);
        let q = triple_copy(&Graph::complete_multipartite(&[4, 4]));
        assert!(matches!(forge_aa(&q, 60, 8, &Seed::new(0), None), Err(ForgeError::Guard { .. })));
        let chi = triple_copy_coloring(&Coloring::new(3, vec![1, 1, 1, 1, 2, 2, 2, 2]).unwrap());
        assert!(matches!(
            forge_aa(&q, 60, 8, &Seed::new(0), Some(&chi)),
            Err(ForgeError::ConnectorBudget { .. })
        ));
    }
}
