//! Simple undirected graphs, colorings and exact combinatorial primitives.
//!
//! Vertices are `0..n` in the library API. Text files and the CLI use the
//! 1-based labels `1..=n` (see [`crate::io`]).

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::FlowNetwork;

/// Color value. `0` marks a free (uncolored) vertex, proper colors are `1..=k`.
pub type Color = u32;

pub const FREE: Color = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex set is not strictly increasing")]
    UnsortedSet,
    #[error("vertex set must be a nonempty proper subset")]
    DegenerateCut,
    #[error("coloring covers {coloring} vertices but graph has {graph}")]
    LengthMismatch { coloring: usize, graph: usize },
    #[error("color {color} exceeds k = {k} at vertex {vertex}")]
    ColorOutOfRange { vertex: usize, color: Color, k: u32 },
    #[error("exhaustive search limited to {limit} vertices, graph has {n}")]
    GuardExceeded { n: usize, limit: usize },
}

/// Immutable simple undirected graph in compressed adjacency form.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0] as usize), u.max(w[0] as usize));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    /// Caller guarantees symmetry, sortedness and simplicity.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in adj {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Graph { offsets, neighbors }
    }

    /// Builds from edges that are known to be simple; duplicates are merged.
    pub(crate) fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            debug_assert!(u != v && u < n && v < n);
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_sorted_adjacency(adj)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_adjacency(vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
            .collect();
        Self::from_sorted_adjacency(adj)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::from_edges_dedup(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges_dedup(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Complete multipartite graph with the given part sizes; parts are
    /// consecutive vertex ranges.
    pub fn complete_multipartite(parts: &[usize]) -> Self {
        let part_of: Vec<usize> = parts
            .iter()
            .enumerate()
            .flat_map(|(p, &s)| std::iter::repeat_n(p, s))
            .collect();
        let n = part_of.len();
        let adj = (0..n)
            .map(|u| {
                (0..n as u32)
                    .filter(|&v| part_of[v as usize] != part_of[u])
                    .collect()
            })
            .collect();
        Self::from_sorted_adjacency(adj)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n() as u32;
        let mut adj: Vec<Vec<u32>> = (0..self.n()).map(|v| self.neighbors(v).to_vec()).collect();
        adj.extend((0..other.n()).map(|v| other.neighbors(v).iter().map(|&w| w + shift).collect()));
        Graph::from_sorted_adjacency(adj)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n() == 0 { 0 } else { self.degree(0) };
        (0..self.n()).all(|v| self.degree(v) == d).then_some(d)
    }

    /// `y = A x` for the adjacency matrix, reduced in fixed vertex order.
    pub fn adjacency_apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n());
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&w| x[w as usize]).sum();
        }
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        Graph::from_edges_dedup(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Graph with edge `(u, v)` kept iff `keep(u, v)`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Graph {
        let adj = (0..self.n())
            .map(|u| {
                self.neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&v| keep(u.min(v as usize), u.max(v as usize)))
                    .collect()
            })
            .collect();
        Graph::from_sorted_adjacency(adj)
    }

    /// Edge-set union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n(), other.n());
        Graph::from_edges_dedup(self.n(), self.edges().chain(other.edges()))
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() == other.n() && self.edges().all(|(u, v)| other.has_edge(u, v))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

/// Sorted set of distinct vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Validates strict increase and range against `n`.
    pub fn new(ids: Vec<usize>, n: usize) -> Result<Self, GraphError> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GraphError::UnsortedSet);
        }
        if let Some(&v) = ids.last() {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
        }
        Ok(VertexSet(ids))
    }

    /// Sorts and deduplicates; range is checked by the consuming operation.
    pub fn from_unsorted(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn all(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    fn check(&self, g: &Graph) -> Result<(), GraphError> {
        match self.0.last() {
            Some(&v) => g.check_vertex(v),
            None => Ok(()),
        }
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Total or partial assignment of vertices to colors `1..=k` (`0` = free).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    k: u32,
    assign: Vec<Color>,
}

impl Coloring {
    pub fn new(k: u32, assign: Vec<Color>) -> Result<Self, GraphError> {
        if let Some((vertex, &color)) = assign.iter().enumerate().find(|(_, &c)| c > k) {
            return Err(GraphError::ColorOutOfRange { vertex, color, k });
        }
        Ok(Coloring { k, assign })
    }

    /// All vertices free.
    pub fn uncolored(n: usize, k: u32) -> Self {
        Coloring { k, assign: vec![FREE; n] }
    }

    pub fn constant(n: usize, k: u32, color: Color) -> Self {
        assert!(color <= k);
        Coloring { k, assign: vec![color; n] }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> Color {
        self.assign[v]
    }

    #[inline]
    pub fn is_free(&self, v: usize) -> bool {
        self.assign[v] == FREE
    }

    pub fn set(&mut self, v: usize, color: Color) {
        assert!(color <= self.k, "color {color} exceeds k = {}", self.k);
        self.assign[v] = color;
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.assign
    }

    pub fn is_total(&self) -> bool {
        self.assign.iter().all(|&c| c != FREE)
    }

    pub fn free_count(&self) -> usize {
        self.assign.iter().filter(|&&c| c == FREE).count()
    }

    pub fn free_vertices(&self) -> VertexSet {
        VertexSet((0..self.len()).filter(|&v| self.is_free(v)).collect())
    }

    /// Sizes of classes `1..=k` (index 0 is class 1).
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k as usize];
        for &c in &self.assign {
            if c != FREE {
                sizes[c as usize - 1] += 1;
            }
        }
        sizes
    }

    /// Vertices of class `color`.
    pub fn class(&self, color: Color) -> VertexSet {
        VertexSet((0..self.len()).filter(|&v| self.assign[v] == color).collect())
    }

    /// Restriction to the given vertices, in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Coloring {
        Coloring { k: self.k, assign: vertices.iter().map(|&v| self.assign[v]).collect() }
    }

    pub fn with_k(mut self, k: u32) -> Result<Self, GraphError> {
        self = Coloring::new(k, self.assign)?;
        Ok(self)
    }

    pub fn into_vec(self) -> Vec<Color> {
        self.assign
    }
}

/// `E(S,T)`: ordered pairs `(u, v)` with `u ∈ S`, `v ∈ T`, `uv ∈ E`, so an
/// edge inside `S ∩ T` contributes 2.
pub fn edges_between(g: &Graph, s: &VertexSet, t: &VertexSet) -> Result<usize, GraphError> {
    s.check(g)?;
    t.check(g)?;
    let in_t = t.mask(g.n());
    Ok(s.iter()
        .map(|u| g.neighbors(u).iter().filter(|&&w| in_t[w as usize]).count())
        .sum())
}

/// `E(S, V∖S) / ((d/n)·|S|·|V∖S|)`.
pub fn sparsity(g: &Graph, s: &VertexSet, d: f64) -> Result<f64, GraphError> {
    s.check(g)?;
    let n = g.n();
    if s.is_empty() || s.len() >= n {
        return Err(GraphError::DegenerateCut);
    }
    let rest: VertexSet = {
        let mask = s.mask(n);
        VertexSet((0..n).filter(|&v| !mask[v]).collect())
    };
    let crossing = edges_between(g, s, &rest)? as f64;
    Ok(crossing / ((d / n as f64) * s.len() as f64 * rest.len() as f64))
}

/// Components in order of their smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &w in g.neighbors(u) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        components.push(VertexSet::from_unsorted(members));
    }
    components
}

/// Induced subgraph on `s`; vertex `i` of the result is `map[i]` in `g`.
pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
    s.check(g)?;
    let mut local = vec![u32::MAX; g.n()];
    for (i, v) in s.iter().enumerate() {
        local[v] = i as u32;
    }
    let adj = s
        .iter()
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| local[w as usize])
                .filter(|&w| w != u32::MAX)
                .collect()
        })
        .collect();
    Ok((Graph::from_sorted_adjacency(adj), s.as_slice().to_vec()))
}

/// Legality check; edges with a free endpoint never count as violations.
/// Returns the sorted list of monochromatic edges `(u, v)`, `u < v`.
pub fn is_legal_coloring(g: &Graph, c: &Coloring) -> Result<(bool, Vec<(usize, usize)>), GraphError> {
    if c.len() != g.n() {
        return Err(GraphError::LengthMismatch { coloring: c.len(), graph: g.n() });
    }
    let bad: Vec<_> = g
        .edges()
        .filter(|&(u, v)| c.get(u) != FREE && c.get(u) == c.get(v))
        .collect();
    Ok((bad.is_empty(), bad))
}

/// Convenience: total and legal.
pub fn is_proper_total(g: &Graph, c: &Coloring) -> bool {
    c.len() == g.n() && c.is_total() && g.edges().all(|(u, v)| c.get(u) != c.get(v))
}

pub const DEFAULT_COUNT_GUARD: usize = 32;
pub const DEFAULT_COUNT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColoringCount {
    Exact(u64),
    CapExceeded,
}

/// Number of legal total k-colorings (label permutations counted separately).
pub fn count_k_colorings(g: &Graph, k: u32, cap: u64) -> Result<ColoringCount, GraphError> {
    if g.n() > DEFAULT_COUNT_GUARD {
        return Err(GraphError::GuardExceeded { n: g.n(), limit: DEFAULT_COUNT_GUARD });
    }
    let mut count = 0u64;
    let mut exceeded = false;
    for_each_k_coloring(g, k, &Coloring::uncolored(g.n(), k), |_| {
        count += 1;
        if count > cap {
            exceeded = true;
            false
        } else {
            true
        }
    });
    Ok(if exceeded { ColoringCount::CapExceeded } else { ColoringCount::Exact(count) })
}

/// Some legal total k-coloring extending `precolored`, if one exists.
/// No size guard: the search is exponential only in the worst case.
pub fn find_k_coloring(g: &Graph, k: u32, precolored: &Coloring) -> Option<Coloring> {
    let mut found = None;
    for_each_k_coloring(g, k, precolored, |c| {
        found = Some(c.clone());
        false
    });
    found
}

/// Enumerates legal total k-colorings extending `precolored` until `visit`
/// returns `false`. Branches on the free vertex with the fewest remaining
/// colors (ties: most free neighbors, then smallest id), colors ascending.
pub fn for_each_k_coloring<F>(g: &Graph, k: u32, precolored: &Coloring, mut visit: F)
where
    F: FnMut(&Coloring) -> bool,
{
    assert!(k <= 32, "k must fit a bitmask");
    assert_eq!(precolored.len(), g.n());
    let n = g.n();
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut coloring = Coloring { k, assign: precolored.as_slice().to_vec() };
    // forbidden[v][c] counts colored neighbors of v with color c+1.
    let mut forbidden = vec![vec![0u32; k as usize]; n];
    for v in 0..n {
        let c = coloring.get(v);
        if c != FREE {
            for &w in g.neighbors(v) {
                if coloring.get(w as usize) == c {
                    return;
                }
                forbidden[w as usize][c as usize - 1] += 1;
            }
        }
    }
    let mut search = Search { g, k, full, coloring: &mut coloring, forbidden: &mut forbidden, stop: false };
    search.recurse(&mut visit);
}

struct Search<'a> {
    g: &'a Graph,
    k: u32,
    full: u32,
    coloring: &'a mut Coloring,
    forbidden: &'a mut Vec<Vec<u32>>,
    stop: bool,
}

impl Search<'_> {
    fn available(&self, v: usize) -> u32 {
        let mut mask = self.full;
        for (c, &cnt) in self.forbidden[v].iter().enumerate() {
            if cnt > 0 {
                mask &= !(1 << c);
            }
        }
        mask
    }

    fn recurse<F: FnMut(&Coloring) -> bool>(&mut self, visit: &mut F) {
        // Pick the most constrained free vertex.
        let mut best: Option<(usize, u32, usize)> = None;
        for v in 0..self.g.n() {
            if !self.coloring.is_free(v) {
                continue;
            }
            let avail = self.available(v);
            let options = avail.count_ones();
            if options == 0 {
                return;
            }
            let free_nbrs = self.g.neighbors(v).iter().filter(|&&w| self.coloring.is_free(w as usize)).count();
            let better = match best {
                None => true,
                Some((_, o, f)) => options < o || (options == o && free_nbrs > f),
            };
            if better {
                best = Some((v, options, free_nbrs));
            }
        }
        let Some((v, _, _)) = best else {
            if !visit(self.coloring) {
                self.stop = true;
            }
            return;
        };
        let avail = self.available(v);
        for c in 0..self.k {
            if avail & (1 << c) == 0 {
                continue;
            }
            self.coloring.assign[v] = c + 1;
            for &w in self.g.neighbors(v) {
                self.forbidden[w as usize][c as usize] += 1;
            }
            self.recurse(visit);
            for &w in self.g.neighbors(v) {
                self.forbidden[w as usize][c as usize] -= 1;
            }
            self.coloring.assign[v] = FREE;
            if self.stop {
                return;
            }
        }
    }
}

/// Densest subgraph by average degree `2|E(S)|/|S|`, kept as an exact ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensestSubgraph {
    pub vertices: VertexSet,
    /// `|E(G_S)|`.
    pub edges: usize,
}

impl DensestSubgraph {
    pub fn density(&self) -> f64 {
        2.0 * self.edges as f64 / self.vertices.len() as f64
    }

    /// Exact comparison of this density against the average degree of `g`.
    pub fn equals_average_degree_of(&self, g: &Graph) -> bool {
        2 * self.edges * g.n() == 2 * g.m() * self.vertices.len()
    }
}

pub const EXHAUSTIVE_DENSITY_LIMIT: usize = 22;

/// Maximum-average-degree subgraph: exhaustive for small graphs, otherwise
/// parametric min-cut.
pub fn max_density_subgraph(g: &Graph) -> DensestSubgraph {
    assert!(g.n() >= 1, "densest subgraph of the empty vertex set");
    if g.n() <= EXHAUSTIVE_DENSITY_LIMIT {
        max_density_exhaustive(g)
    } else {
        max_density_flow(g)
    }
}

/// Exhaustive over all nonempty subsets; ties resolve to the first mask in
/// increasing order.
pub fn max_density_exhaustive(g: &Graph) -> DensestSubgraph {
    let n = g.n();
    assert!((1..=30).contains(&n), "exhaustive density search needs 1 <= n <= 30");
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let (mut best_mask, mut best_e, mut best_s) = (1u32, 0usize, 1usize);
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        let mut twice = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice += (adj[v] & mask).count_ones() as usize;
        }
        let e = twice / 2;
        if e * best_s > best_e * size {
            (best_mask, best_e, best_s) = (mask, e, size);
        }
    }
    DensestSubgraph {
        vertices: VertexSet((0..n).filter(|&v| best_mask & (1 << v) != 0).collect()),
        edges: best_e,
    }
}

/// Dinkelbach iteration over the ratio `|E(S)|/|S|`: each step solves
/// `max q·|E(S)| − p·|S|` as a maximum-weight closure by min cut, and the
/// ratio strictly increases until no set beats it.
pub fn max_density_flow(g: &Graph) -> DensestSubgraph {
    let n = g.n();
    assert!(n >= 1);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut best = DensestSubgraph { vertices: VertexSet::all(n), edges: g.m() };
    if edges.is_empty() {
        return DensestSubgraph { vertices: VertexSet(vec![0]), edges: 0 };
    }
    loop {
        let (p, q) = (best.edges as i64, best.vertices.len() as i64);
        // Nodes: 0 = source, 1 = sink, 2..2+m edge nodes, then vertices.
        let m = edges.len();
        let vertex_node = |v: usize| 2 + m + v;
        let mut net = FlowNetwork::new(2 + m + n);
        let infinite = q * m as i64 + 1;
        for (i, &(u, v)) in edges.iter().enumerate() {
            net.add_edge(0, 2 + i, q);
            net.add_edge(2 + i, vertex_node(u), infinite);
            net.add_edge(2 + i, vertex_node(v), infinite);
        }
        for v in 0..n {
            net.add_edge(vertex_node(v), 1, p);
        }
        let cut = net.max_flow(0, 1);
        let gain = q * m as i64 - cut;
        if gain <= 0 {
            return best;
        }
        let side = net.source_side(0);
        let chosen: Vec<usize> = (0..n).filter(|&v| side[vertex_node(v)]).collect();
        let set = VertexSet(chosen);
        let mask = set.mask(n);
        let e = edges.iter().filter(|&&(u, v)| mask[u] && mask[v]).count();
        debug_assert!(e as i64 * q > p * set.len() as i64);
        best = DensestSubgraph { vertices: set, edges: e };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(ids: &[usize]) -> VertexSet {
        VertexSet::from_unsorted(ids.to_vec())
    }

    #[test]
    fn edges_between_counts_ordered_pairs() {
        let k3 = Graph::complete(3);
        assert_eq!(edges_between(&k3, &vs(&[0]), &vs(&[1, 2])).unwrap(), 2);
        assert_eq!(edges_between(&k3, &vs(&[0, 1, 2]), &vs(&[0, 1, 2])).unwrap(), 6);
        let p3 = Graph::path(3);
        assert_eq!(edges_between(&p3, &vs(&[0, 2]), &vs(&[1])).unwrap(), 2);
        assert!(matches!(
            edges_between(&p3, &vs(&[5]), &vs(&[1])),
            Err(GraphError::VertexOutOfRange { vertex: 5, n: 3 })
        ));
    }

    #[test]
    fn sparsity_formula() {
        let k4 = Graph::complete(4);
        let s = sparsity(&k4, &vs(&[0]), 3.0).unwrap();
        assert!((s - 4.0 / 3.0).abs() < 1e-12);
        let c4 = Graph::cycle(4);
        assert!((sparsity(&c4, &vs(&[0, 1]), 2.0).unwrap() - 1.0).abs() < 1e-12);
        let two_tri = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert_eq!(sparsity(&two_tri, &vs(&[0, 1, 2]), 2.0).unwrap(), 0.0);
        assert_eq!(sparsity(&c4, &vs(&[]), 2.0), Err(GraphError::DegenerateCut));
        assert_eq!(sparsity(&c4, &vs(&[0, 1, 2, 3]), 2.0), Err(GraphError::DegenerateCut));
    }

    #[test]
    fn components_examples() {
        let comps = connected_components(&Graph::empty(3));
        assert_eq!(comps, vec![vs(&[0]), vs(&[1]), vs(&[2])]);
        let g = Graph::complete(3).disjoint_union(&Graph::complete(2));
        assert_eq!(connected_components(&g), vec![vs(&[0, 1, 2]), vs(&[3, 4])]);
        assert_eq!(connected_components(&Graph::empty(1)), vec![vs(&[0])]);
    }

    #[test]
    fn induced_examples() {
        let (h, map) = induced_subgraph(&Graph::complete(4), &vs(&[0, 1, 2])).unwrap();
        assert_eq!(h, Graph::complete(3));
        assert_eq!(map, vec![0, 1, 2]);
        let (h, _) = induced_subgraph(&Graph::cycle(5), &vs(&[])).unwrap();
        assert_eq!(h.n(), 0);
        let (h, map) = induced_subgraph(&Graph::cycle(5), &vs(&[3, 4])).unwrap();
        assert_eq!((h.n(), h.m()), (2, 1));
        assert_eq!(map, vec![3, 4]);
    }

    #[test]
    fn legality_examples() {
        let k3 = Graph::complete(3);
        let c = Coloring::new(3, vec![1, 2, 3]).unwrap();
        assert_eq!(is_legal_coloring(&k3, &c).unwrap(), (true, vec![]));
        let c = Coloring::new(3, vec![1, 1, 2]).unwrap();
        assert_eq!(is_legal_coloring(&k3, &c).unwrap(), (false, vec![(0, 1)]));
        let edge = Graph::path(2);
        let c = Coloring::new(3, vec![1, 0]).unwrap();
        assert!(is_legal_coloring(&edge, &c).unwrap().0);
        let short = Coloring::new(3, vec![1]).unwrap();
        assert!(matches!(is_legal_coloring(&edge, &short), Err(GraphError::LengthMismatch { .. })));
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_k_colorings(&Graph::complete(3), 3, DEFAULT_COUNT_CAP).unwrap(), ColoringCount::Exact(6));
        assert_eq!(count_k_colorings(&Graph::complete(4), 3, DEFAULT_COUNT_CAP).unwrap(), ColoringCount::Exact(0));
        assert_eq!(count_k_colorings(&Graph::path(2), 3, DEFAULT_COUNT_CAP).unwrap(), ColoringCount::Exact(6));
        assert_eq!(count_k_colorings(&Graph::empty(3), 3, 10).unwrap(), ColoringCount::CapExceeded);
        assert!(matches!(
            count_k_colorings(&Graph::empty(33), 3, 10),
            Err(GraphError::GuardExceeded { n: 33, limit: 32 })
        ));
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(Graph::from_edges(3, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::from_edges(3, [(0, 3)]), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn densest_examples() {
        let k4 = Graph::complete(4);
        let best = max_density_subgraph(&k4);
        assert_eq!(best.vertices, VertexSet::all(4));
        assert_eq!(best.density(), 3.0);
        assert!(best.equals_average_degree_of(&k4));

        // K4 with a pendant vertex: the K4 (density 3) beats 14/5.
        let pendant = Graph::from_edges(5, Graph::complete(4).edges().chain([(3, 4)])).unwrap();
        let best = max_density_subgraph(&pendant);
        assert_eq!(best.vertices, vs(&[0, 1, 2, 3]));
        assert_eq!(best.density(), 3.0);
        assert!(!best.equals_average_degree_of(&pendant));
        assert_eq!(max_density_flow(&pendant).vertices, vs(&[0, 1, 2, 3]));

        // A single edge has density 1; a larger tree is densest as a whole,
        // at 2(n-1)/n.
        assert_eq!(max_density_subgraph(&Graph::path(2)).density(), 1.0);
        let tree = Graph::from_edges(5, [(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(max_density_subgraph(&tree).density(), 8.0 / 5.0);
        assert_eq!(max_density_flow(&tree).density(), 8.0 / 5.0);
    }
}
