//! Hardness constructions. Every object is returned together with a
//! certificate that was computed, not assumed.

mod aa;
mod embed;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::GenError;
use crate::graph::{
    count_k_colorings, find_k_coloring, for_each_k_coloring, max_density_subgraph, Coloring, ColoringCount,
    DensestSubgraph, Graph, GraphError, DEFAULT_COUNT_CAP,
};
use crate::spectral::SpectralError;

pub use aa::{forge_aa, AaCertificate, AaInstance};
pub use embed::{
    build_block_host, embed_q_via_independent_blocks, find_induced_copy, forge_k4_planting, forge_ra_adversary,
    select_faithful, uniqueness_check, BlockHost, Embedding, PlantingForge, Uniqueness, INDUCED_GUARD_H,
    INDUCED_GUARD_Q,
};

/// Why an adversary or embedding procedure gave up, labeled by its step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailStep {
    /// No induced copy of `Q`.
    Step1,
    /// Two differently colored `Q` vertices share an outside neighbor.
    Step2,
    /// Forced colors exceed the balanced class size.
    Step3,
    /// A `Q` vertex has no outside neighbor.
    S1,
    /// The outside neighborhood exceeds `n/4`.
    S2,
    NoIndependentSet,
    NoFaithful,
}

impl std::fmt::Display for FailStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailStep::Step1 => "1",
            FailStep::Step2 => "2",
            FailStep::Step3 => "3",
            FailStep::S1 => "S1",
            FailStep::S2 => "S2",
            FailStep::NoIndependentSet => "no-independent-set",
            FailStep::NoFaithful => "no-faithful",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForgeError {
    #[error("failed at step {0}")]
    Fail(FailStep),
    #[error("input graph is not {0}-regular")]
    NotRegular(usize),
    #[error("{0} is not 3-colorable")]
    NotColorable(&'static str),
    #[error("coloring of Q is not balanced")]
    Unbalanced,
    #[error("need {need} connectors but only {have} vertices remain")]
    ConnectorBudget { need: usize, have: usize },
    #[error("{what} has {n} vertices, limit {limit}")]
    Guard { what: &'static str, n: usize, limit: usize },
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Exponents of the hardness regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForgeParams {
    /// Host degree `d = n^δ`.
    pub delta: f64,
    pub epsilon: f64,
    /// Target average degree of the balanced reduction.
    pub alpha: f64,
}

impl Default for ForgeParams {
    fn default() -> Self {
        ForgeParams { delta: 0.5, epsilon: 0.01, alpha: 3.75 }
    }
}

impl ForgeParams {
    /// `δ0 = (7 + 16ε)/15`.
    pub fn delta0(&self) -> f64 {
        (7.0 + 16.0 * self.epsilon) / 15.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub graph: Graph,
    pub ports: Vec<usize>,
    /// Every legal 3-coloring gives all ports one color; checked by
    /// enumerating all of them.
    pub ports_equal: bool,
    pub colorings: u64,
    pub densest: DensestSubgraph,
}

impl Gadget {
    fn certify(graph: Graph, ports: Vec<usize>) -> Gadget {
        let mut ports_equal = true;
        let mut colorings = 0u64;
        for_each_k_coloring(&graph, 3, &Coloring::uncolored(graph.n(), 3), |c| {
            colorings += 1;
            ports_equal &= ports.iter().all(|&p| c.get(p) == c.get(ports[0]));
            true
        });
        let densest = max_density_subgraph(&graph);
        Gadget { graph, ports, ports_equal: ports_equal && colorings > 0, colorings, densest }
    }
}

/// `K4` minus the edge between its two ports 0 and 3.
pub fn diamond_gadget() -> Gadget {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).expect("diamond");
    Gadget::certify(g, vec![0, 3])
}

/// Chain of `num_ports − 1` diamonds; consecutive ports are the two ends
/// of one diamond. Ports are `t_i = 3i`, the middles `3i+1, 3i+2`.
pub fn equality_fanout(num_ports: usize) -> Gadget {
    assert!(num_ports >= 2, "a fanout needs two ports");
    let n = 3 * num_ports - 2;
    let mut edges = Vec::with_capacity(5 * (num_ports - 1));
    for i in 0..num_ports - 1 {
        let (t, a, b, s) = (3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3);
        edges.extend([(t, a), (t, b), (a, b), (a, s), (b, s)]);
    }
    let g = Graph::from_edges(n, edges).expect("fanout");
    Gadget::certify(g, (0..num_ports).map(|i| 3 * i).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutput {
    pub graph: Graph,
    /// `ports[v][j]` is the port of `v` used for its `j`-th neighbor.
    pub ports: Vec<Vec<usize>>,
    pub average_degree: f64,
    pub densest: DensestSubgraph,
    pub balanced: bool,
    pub gadget: Gadget,
}

impl ReductionOutput {
    /// A coloring of the input read off port `t_0` of each vertex.
    pub fn decode(&self, c: &Coloring) -> Coloring {
        Coloring::new(c.k(), self.ports.iter().map(|p| c.get(p[0])).collect()).expect("decoded colors in range")
    }
}

/// Each vertex becomes a 4-port fanout; the edge `uv` joins the port of
/// `u` indexed by `v`'s position among `u`'s neighbors to the matching port
/// of `v`.
pub fn reduce_4regular_to_balanced(h4: &Graph) -> Result<ReductionOutput, ForgeError> {
    if h4.n() == 0 || h4.regular_degree() != Some(4) {
        return Err(ForgeError::NotRegular(4));
    }
    let gadget = equality_fanout(4);
    if !gadget.ports_equal {
        return Err(ForgeError::Certificate("fanout ports not forced equal".into()));
    }
    let size = gadget.graph.n();
    let n = h4.n();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * gadget.graph.m() + h4.m());
    for v in 0..n {
        edges.extend(gadget.graph.edges().map(|(a, b)| (v * size + a, v * size + b)));
    }
    let ports: Vec<Vec<usize>> = (0..n).map(|v| gadget.ports.iter().map(|p| v * size + p).collect()).collect();
    for (u, v) in h4.edges() {
        let iu = h4.neighbors(u).binary_search(&(v as u32)).expect("edge");
        let iv = h4.neighbors(v).binary_search(&(u as u32)).expect("edge");
        edges.push((ports[u][iu], ports[v][iv]));
    }
    let graph = Graph::from_edges(n * size, edges)?;
    let average_degree = graph.average_degree();
    let densest = max_density_subgraph(&graph);
    let balanced = densest.equals_average_degree_of(&graph);
    Ok(ReductionOutput { graph, ports, average_degree, densest, balanced, gadget })
}

/// Three disjoint copies, copy `c` on vertices `c·n .. (c+1)·n`.
pub fn triple_copy(g: &Graph) -> Graph {
    g.disjoint_union(g).disjoint_union(g)
}

/// Balanced coloring of [`triple_copy`] from any 3-coloring of `g`: copy
/// `c` shifts every color by `c`.
pub fn triple_copy_coloring(chi: &Coloring) -> Coloring {
    assert_eq!(chi.k(), 3);
    let n = chi.len();
    let assign = (0..3 * n)
        .map(|i| {
            let (copy, v) = (i / n, i % n);
            (chi.get(v) - 1 + copy as u32) % 3 + 1
        })
        .collect();
    Coloring::new(3, assign).expect("rotated colors in range")
}

pub(crate) fn is_balanced(c: &Coloring) -> bool {
    let sizes = c.class_sizes();
    sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0) <= 1
}

/// A legal 3-coloring of a small graph, balanced when one exists.
pub(crate) fn small_coloring(q: &Graph, limit: usize, what: &'static str) -> Result<Coloring, ForgeError> {
    if q.n() > limit {
        return Err(ForgeError::Guard { what, n: q.n(), limit });
    }
    let mut first = None;
    let mut balanced = None;
    for_each_k_coloring(q, 3, &Coloring::uncolored(q.n(), 3), |c| {
        if first.is_none() {
            first = Some(c.clone());
        }
        if is_balanced(c) {
            balanced = Some(c.clone());
            return false;
        }
        true
    });
    balanced.or(first).ok_or(ForgeError::NotColorable(what))
}

/// Brute-force 3-colorability, for certificates on small graphs.
pub fn three_colorable(g: &Graph) -> bool {
    find_k_coloring(g, 3, &Coloring::uncolored(g.n(), 3)).is_some()
}

/// Number of legal 3-colorings, capped.
pub fn count_3_colorings(g: &Graph) -> Result<ColoringCount, GraphError> {
    count_k_colorings(g, 3, DEFAULT_COUNT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_legal_coloring;

    #[test]
    fn diamond() {
        let d = diamond_gadget();
        assert!(d.ports_equal);
        assert_eq!(d.colorings, 6);
        assert_eq!(count_3_colorings(&d.graph).unwrap(), ColoringCount::Exact(6));
        let nonadjacent: Vec<(usize, usize)> =
            (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).filter(|&(u, v)| !d.graph.has_edge(u, v)).collect();
        assert_eq!(nonadjacent, vec![(0, 3)]);
    }

    #[test]
    fn fanout() {
        let two = equality_fanout(2);
        assert_eq!(two.graph, diamond_gadget().graph);
        let four = equality_fanout(4);
        assert_eq!((four.graph.n(), four.graph.m()), (10, 15));
        assert!(four.ports_equal);
        assert!((four.graph.average_degree() - 3.0).abs() < 1e-12);
        for p in 2..=6 {
            assert!(equality_fanout(p).ports_equal, "p = {p}");
        }
    }

    #[test]
    fn reduction_examples() {
        let k5 = Graph::complete(5);
        let r = reduce_4regular_to_balanced(&k5).unwrap();
        assert_eq!((r.graph.n(), r.graph.m()), (50, 85));
        assert!((r.average_degree - 3.4).abs() < 1e-12);
        assert!(r.balanced);
        assert!(!three_colorable(&r.graph));

        let k44 = Graph::complete_multipartite(&[4, 4]);
        let r = reduce_4regular_to_balanced(&k44).unwrap();
        let c = find_k_coloring(&r.graph, 3, &Coloring::uncolored(r.graph.n(), 3)).unwrap();
        assert!(is_legal_coloring(&k44, &r.decode(&c)).unwrap().0);
        assert!(r.balanced);

        assert_eq!(reduce_4regular_to_balanced(&Graph::cycle(5)), Err(ForgeError::NotRegular(4)));
    }

    #[test]
    fn triple_copy_examples() {
        let k3 = Graph::complete(3);
        let t = triple_copy(&k3);
        assert_eq!((t.n(), t.m()), (9, 9));
        let chi = triple_copy_coloring(&Coloring::new(3, vec![1, 1, 2]).unwrap());
        assert_eq!(chi.class_sizes(), vec![3, 3, 3]);
        let proper = triple_copy_coloring(&Coloring::new(3, vec![1, 2, 3]).unwrap());
        assert!(is_legal_coloring(&t, &proper).unwrap().0);
        assert!(!three_colorable(&triple_copy(&Graph::complete(4))));
    }
}
