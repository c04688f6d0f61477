use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{small_coloring, FailStep, ForgeError};
use crate::generators::{apply_planting, random_partition, PlantedInstance};
use crate::graph::{for_each_k_coloring, Coloring, ColoringCount, Graph, DEFAULT_COUNT_GUARD};
use crate::seed::{Rng, Seed};

/// Largest `Q` searched for by backtracking.
pub const INDUCED_GUARD_Q: usize = 12;
/// Largest host the planting adversaries accept.
pub const INDUCED_GUARD_H: usize = 400;

fn guard(what: &'static str, n: usize, limit: usize) -> Result<(), ForgeError> {
    if n > limit {
        return Err(ForgeError::Guard { what, n, limit });
    }
    Ok(())
}

/// Visit order of `Q` with, for each vertex, an earlier neighbor if any.
fn bfs_order(q: &Graph) -> Vec<(usize, Option<usize>)> {
    let mut seen = vec![false; q.n()];
    let mut order = Vec::with_capacity(q.n());
    for s in 0..q.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let start = order.len();
        order.push((s, None));
        let mut i = start;
        while i < order.len() {
            let v = order[i].0;
            for &u in q.neighbors(v) {
                let u = u as usize;
                if !seen[u] {
                    seen[u] = true;
                    order.push((u, Some(v)));
                }
            }
            i += 1;
        }
    }
    order
}

struct CopySearch<'a> {
    g: &'a Graph,
    q: &'a Graph,
    order: Vec<(usize, Option<usize>)>,
    map: Vec<usize>,
    used: Vec<bool>,
    rng: Rng,
}

impl CopySearch<'_> {
    fn fits(&self, qv: usize, gv: usize, depth: usize) -> bool {
        !self.used[gv]
            && self.order[..depth].iter().all(|&(qu, _)| self.q.has_edge(qv, qu) == self.g.has_edge(gv, self.map[qu]))
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let (qv, parent) = self.order[depth];
        let mut candidates: Vec<usize> = match parent {
            Some(p) => self.g.neighbors(self.map[p]).iter().map(|&u| u as usize).collect(),
            None => (0..self.g.n()).collect(),
        };
        candidates.shuffle(&mut self.rng);
        for gv in candidates {
            if !self.fits(qv, gv, depth) {
                continue;
            }
            self.map[qv] = gv;
            self.used[gv] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[gv] = false;
        }
        false
    }
}

/// Random vertex-induced copy of `q` in `g`: `map[i]` is the image of `i`.
pub fn find_induced_copy(g: &Graph, q: &Graph, seed: &Seed) -> Result<Option<Vec<usize>>, ForgeError> {
    guard("Q", q.n(), INDUCED_GUARD_Q)?;
    if q.n() > g.n() {
        return Ok(None);
    }
    let mut search = CopySearch {
        g,
        q,
        order: bfs_order(q),
        map: vec![usize::MAX; q.n()],
        used: vec![false; g.n()],
        rng: seed.rng(),
    };
    Ok(search.extend(0).then_some(search.map))
}

/// A planting built around an induced copy of `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantingForge {
    pub planted: Coloring,
    /// `copy[i]` is the host vertex playing `Q`'s vertex `i`.
    pub copy: Vec<usize>,
    pub chi: Coloring,
}

/// Class targets `balanced_sizes(n, k)` handed out so the classes with the
/// largest demand get the larger slots; `None` if some demand still exceeds
/// its slot.
fn fill_balanced(forced: &[u32], k: u32, rng: &mut Rng) -> Option<Coloring> {
    let n = forced.len();
    let k_us = k as usize;
    let mut demand = vec![0usize; k_us];
    for &c in forced.iter().filter(|&&c| c != 0) {
        demand[c as usize - 1] += 1;
    }
    let mut by_demand: Vec<usize> = (0..k_us).collect();
    by_demand.sort_by_key(|&c| (std::cmp::Reverse(demand[c]), c));
    let mut target = vec![n / k_us; k_us];
    for &c in by_demand.iter().take(n % k_us) {
        target[c] += 1;
    }
    if (0..k_us).any(|c| demand[c] > target[c]) {
        return None;
    }
    let mut labels: Vec<u32> = (0..k_us).flat_map(|c| std::iter::repeat_n(c as u32 + 1, target[c] - demand[c])).collect();
    labels.shuffle(rng);
    let mut labels = labels.into_iter();
    let assign = forced.iter().map(|&c| if c != 0 { c } else { labels.next().expect("quota covers free vertices") }).collect();
    Some(Coloring::new(k, assign).expect("labels in range"))
}

fn in_copy(n: usize, copy: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; n];
    copy.iter().for_each(|&v| inside[v] = true);
    inside
}

fn copy_and_coloring(h: &Graph, q: &Graph, seed: &Seed) -> Result<(Vec<usize>, Coloring), ForgeError> {
    guard("Q", q.n(), INDUCED_GUARD_Q)?;
    guard("H", h.n(), INDUCED_GUARD_H)?;
    let chi = small_coloring(q, INDUCED_GUARD_Q, "Q")?;
    let copy = find_induced_copy(h, q, &seed.child("copy"))?.ok_or(ForgeError::Fail(FailStep::Step1))?;
    Ok((copy, chi))
}

/// Colors an induced copy of `Q` by `χ` and forces every outside neighbor
/// of a copy vertex `v` to `χ(v)`, so planting cuts `Q` loose.
pub fn forge_ra_adversary(h: &Graph, q: &Graph, seed: &Seed) -> Result<PlantingForge, ForgeError> {
    let (copy, chi) = copy_and_coloring(h, q, seed)?;
    let inside = in_copy(h.n(), &copy);
    let mut forced = vec![0u32; h.n()];
    for (i, &v) in copy.iter().enumerate() {
        forced[v] = chi.get(i);
    }
    for (i, &v) in copy.iter().enumerate() {
        for &w in h.neighbors(v) {
            let w = w as usize;
            if inside[w] {
                continue;
            }
            if forced[w] != 0 && forced[w] != chi.get(i) {
                return Err(ForgeError::Fail(FailStep::Step2));
            }
            forced[w] = chi.get(i);
        }
    }
    let planted =
        fill_balanced(&forced, 3, &mut seed.child("fill").rng()).ok_or(ForgeError::Fail(FailStep::Step3))?;
    let g = apply_planting(h, &planted)?;
    let isolated = copy.iter().all(|&v| g.neighbors(v).iter().all(|&w| inside[w as usize]));
    if !isolated || !is_induced_copy(&g, q, &copy) {
        return Err(ForgeError::Certificate("Q is not a component after planting".into()));
    }
    Ok(PlantingForge { planted, copy, chi })
}

/// A balanced 4-coloring with `Q` on colors 1–3 and its whole outside
/// neighborhood on color 4.
pub fn forge_k4_planting(h: &Graph, q: &Graph, seed: &Seed) -> Result<PlantingForge, ForgeError> {
    let (copy, chi) = copy_and_coloring(h, q, seed)?;
    let inside = in_copy(h.n(), &copy);
    let mut forced = vec![0u32; h.n()];
    let mut outside = 0usize;
    for (i, &v) in copy.iter().enumerate() {
        forced[v] = chi.get(i);
        if h.neighbors(v).iter().all(|&w| inside[w as usize]) {
            return Err(ForgeError::Fail(FailStep::S1));
        }
    }
    for &v in &copy {
        for &w in h.neighbors(v) {
            let w = w as usize;
            if !inside[w] && forced[w] == 0 {
                forced[w] = 4;
                outside += 1;
            }
        }
    }
    if outside as f64 > h.n() as f64 / 4.0 {
        return Err(ForgeError::Fail(FailStep::S2));
    }
    let planted = fill_balanced(&forced, 4, &mut seed.child("fill").rng()).ok_or(ForgeError::Fail(FailStep::S2))?;
    Ok(PlantingForge { planted, copy, chi })
}

fn is_induced_copy(g: &Graph, q: &Graph, map: &[usize]) -> bool {
    (0..q.n()).all(|i| (i + 1..q.n()).all(|j| q.has_edge(i, j) == g.has_edge(map[i], map[j])))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockHost {
    pub host: Graph,
    /// Independent blocks of `H'`, one per vertex of `Q`.
    pub blocks: Vec<Vec<usize>>,
}

/// `H'` plus a complete bipartite bundle between blocks `i` and `j` for
/// each edge `ij` of `Q`; blocks come from a greedy independent set in
/// random vertex order.
pub fn build_block_host(q: &Graph, hprime: &Graph, block_size: usize, seed: &Seed) -> Result<BlockHost, ForgeError> {
    let need = q.n() * block_size;
    let mut order: Vec<usize> = (0..hprime.n()).collect();
    order.shuffle(&mut seed.rng());
    let mut blocked = vec![false; hprime.n()];
    let mut set = Vec::with_capacity(need);
    for v in order {
        if set.len() == need {
            break;
        }
        if blocked[v] {
            continue;
        }
        set.push(v);
        blocked[v] = true;
        hprime.neighbors(v).iter().for_each(|&w| blocked[w as usize] = true);
    }
    if set.len() < need {
        return Err(ForgeError::Fail(FailStep::NoIndependentSet));
    }
    let blocks: Vec<Vec<usize>> = set.chunks(block_size).map(|c| c.to_vec()).collect();
    let bundles = q.edges().flat_map(|(i, j)| {
        let (bi, bj) = (&blocks[i], &blocks[j]);
        bi.iter().flat_map(move |&u| bj.iter().map(move |&v| (u, v)))
    });
    let host = Graph::from_edges(hprime.n(), hprime.edges().chain(bundles))?;
    Ok(BlockHost { host, blocks })
}

/// One vertex per block whose planted color is `χ(i)`; the resulting map is
/// checked to be an induced copy of `q` in the planted result.
pub fn select_faithful(
    bh: &BlockHost,
    q: &Graph,
    chi: &Coloring,
    planted: &Coloring,
) -> Result<Vec<usize>, ForgeError> {
    let map = bh
        .blocks
        .iter()
        .enumerate()
        .map(|(i, block)| block.iter().copied().find(|&v| planted.get(v) == chi.get(i)))
        .collect::<Option<Vec<usize>>>()
        .ok_or(ForgeError::Fail(FailStep::NoFaithful))?;
    let g = apply_planting(&bh.host, planted)?;
    if !is_induced_copy(&g, q, &map) {
        return Err(ForgeError::Certificate("faithful vertices do not induce Q".into()));
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub block_host: BlockHost,
    pub planted: Coloring,
    pub chi: Coloring,
    pub map: Vec<usize>,
}

/// Random planting on a block host; succeeds when every block has a vertex
/// of its prescribed color.
pub fn embed_q_via_independent_blocks(
    q: &Graph,
    hprime: &Graph,
    block_size: usize,
    seed: &Seed,
) -> Result<Embedding, ForgeError> {
    let chi = small_coloring(q, INDUCED_GUARD_Q, "Q")?;
    let block_host = build_block_host(q, hprime, block_size, &seed.child("blocks"))?;
    let planted = random_partition(hprime.n(), 3, &seed.child("plant"));
    let map = select_faithful(&block_host, q, &chi, &planted)?;
    Ok(Embedding { block_host, planted, chi, map })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uniqueness {
    /// `None` when the count passed the cap.
    pub count: Option<u64>,
    /// Every enumerated coloring is a relabeling of the planted one.
    pub all_planted: bool,
    pub unique: bool,
}

fn same_partition(a: &Coloring, b: &Coloring) -> bool {
    let mut to = vec![0u32; a.k() as usize + 1];
    let mut from = vec![0u32; b.k() as usize + 1];
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        let (x, y) = (x as usize, y as usize);
        if (to[x] != 0 && to[x] as usize != y) || (from[y] != 0 && from[y] as usize != x) {
            return false;
        }
        to[x] = y as u32;
        from[y] = x as u32;
    }
    true
}

/// Counts legal `k`-colorings of the result graph; unique means exactly the
/// `k!` relabelings of the planted partition.
pub fn uniqueness_check(inst: &PlantedInstance, cap: u64) -> Result<Uniqueness, ForgeError> {
    let g = &inst.result;
    guard("instance", g.n(), DEFAULT_COUNT_GUARD)?;
    let k = inst.planted.k();
    let mut count = 0u64;
    let mut all_planted = true;
    for_each_k_coloring(g, k, &Coloring::uncolored(g.n(), k), |c| {
        count += 1;
        all_planted &= same_partition(c, &inst.planted);
        count <= cap
    });
    let factorial: u64 = (1..=k as u64).product();
    let count = (count <= cap).then_some(count);
    let unique = count == Some(factorial) && all_planted;
    Ok(Uniqueness { count, all_planted, unique })
}

impl Uniqueness {
    pub fn as_count(&self) -> ColoringCount {
        self.count.map_or(ColoringCount::CapExceeded, ColoringCount::Exact)
    }
}
