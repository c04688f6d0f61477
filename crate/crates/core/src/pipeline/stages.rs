use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{disagreement, spectral_clustering_traced, AbortReason, PipelineError, PipelineParams};
use crate::graph::{connected_components, induced_subgraph, is_legal_coloring, Coloring, Graph, FREE};
use crate::twosat::{solve_list_coloring, ListColoringProblem};

/// Every vertex takes the color least frequent among its neighbors under
/// `c`, ties to the smaller color; isolated vertices keep theirs.
pub fn one_step_refine(g: &Graph, c: &Coloring) -> Coloring {
    let k = c.k() as usize;
    let mut counts = vec![0usize; k + 1];
    let assign = (0..g.n())
        .map(|v| {
            if g.degree(v) == 0 {
                return c.get(v);
            }
            counts.iter_mut().for_each(|x| *x = 0);
            for &u in g.neighbors(v) {
                counts[c.get(u as usize) as usize] += 1;
            }
            let mut best = 1;
            for col in 2..=k {
                if counts[col] < counts[best] {
                    best = col;
                }
            }
            best as u32
        })
        .collect();
    Coloring::new(c.k(), assign).expect("colors within range")
}

/// Rounds of [`one_step_refine`] until a fixed point or
/// `min(⌈β·d⌉, cap)` rounds.
pub fn iterative_recolor(g: &Graph, c: &Coloring, d: f64, params: &PipelineParams) -> Coloring {
    iterative_recolor_with(g, c, d, params, |_| {}).0
}

/// [`iterative_recolor`] calling `on_round` after each round; also
/// returns the number of rounds run.
pub fn iterative_recolor_with(
    g: &Graph,
    c: &Coloring,
    d: f64,
    params: &PipelineParams,
    mut on_round: impl FnMut(&Coloring),
) -> (Coloring, usize) {
    let rounds = ((params.recolor_rounds_factor * d).ceil().max(0.0) as usize).min(params.recolor_cap);
    let mut cur = c.clone();
    for round in 1..=rounds {
        let next = one_step_refine(g, &cur);
        on_round(&next);
        if next == cur {
            return (next, round);
        }
        cur = next;
    }
    (cur, rounds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepOrder {
    Ascending,
    Descending,
}

/// Uncolors, to a fixed point, vertices with fewer than `(2/3 − 2ε)d`
/// colored neighbors or fewer than `d/6` neighbors of some other color.
pub fn cautious_uncolor(g: &Graph, c: &Coloring, d: f64, params: &PipelineParams) -> Coloring {
    cautious_uncolor_ordered(g, c, d, params, SweepOrder::Ascending)
}

pub fn cautious_uncolor_ordered(
    g: &Graph,
    c: &Coloring,
    d: f64,
    params: &PipelineParams,
    order: SweepOrder,
) -> Coloring {
    let k = c.k() as usize;
    let n = g.n();
    let total_min = (2.0 / 3.0 - 2.0 * params.eps) * d;
    let class_min = d / 6.0;
    let mut out = c.clone();
    // counts[v*(k+1) + col] = neighbors of v with color col
    let mut counts = vec![0usize; n * (k + 1)];
    for v in 0..n {
        for &u in g.neighbors(v) {
            counts[v * (k + 1) + c.get(u as usize) as usize] += 1;
        }
    }
    let weak = |v: usize, own: usize, counts: &[usize]| {
        let row = &counts[v * (k + 1)..][..k + 1];
        let colored: usize = row[1..].iter().sum();
        (colored as f64) < total_min || (1..=k).any(|l| l != own && (row[l] as f64) < class_min)
    };
    loop {
        let mut changed = false;
        let ids: Box<dyn Iterator<Item = usize>> = match order {
            SweepOrder::Ascending => Box::new(0..n),
            SweepOrder::Descending => Box::new((0..n).rev()),
        };
        for v in ids {
            let own = out.get(v) as usize;
            if own == FREE as usize || !weak(v, own, &counts) {
                continue;
            }
            out.set(v, FREE);
            for &u in g.neighbors(v) {
                let row = u as usize * (k + 1);
                counts[row + own] -= 1;
                counts[row] += 1;
            }
            changed = true;
        }
        if !changed {
            return out;
        }
    }
}

/// Colors, first in first out, any free vertex whose colored neighbors
/// use exactly two colors with the third one.
pub fn safe_recolor(g: &Graph, c: &Coloring) -> Coloring {
    assert_eq!(c.k(), 3, "safe recoloring is defined for three colors");
    let mut out = c.clone();
    let mut queue: VecDeque<usize> = (0..g.n()).filter(|&v| out.is_free(v)).collect();
    let mut queued: Vec<bool> = (0..g.n()).map(|v| out.is_free(v)).collect();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !out.is_free(v) {
            continue;
        }
        let mut seen = [false; 4];
        for &u in g.neighbors(v) {
            seen[out.get(u as usize) as usize] = true;
        }
        if seen[1..].iter().filter(|&&s| s).count() != 2 {
            continue;
        }
        let third = (1..=3).find(|&col| !seen[col]).expect("one color missing") as u32;
        out.set(v, third);
        for &u in g.neighbors(v) {
            let u = u as usize;
            if out.is_free(u) && !queued[u] {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }
    out
}

/// Exhaustive completion of each free component no larger than the cap,
/// lexicographically first in ascending vertex order.
pub fn brute_force_components(g: &Graph, c: &Coloring, params: &PipelineParams) -> Result<Coloring, PipelineError> {
    let cap = params.component_cap_for(g.n());
    let free = c.free_vertices();
    if free.is_empty() {
        return Ok(c.clone());
    }
    let (sub, map) = induced_subgraph(g, &free)?;
    let mut comps = connected_components(&sub);
    comps.sort_by_key(|s| map[s.as_slice()[0]]);
    if let Some(big) = comps.iter().find(|s| s.len() > cap) {
        return Err(PipelineError::Abort(AbortReason::Oversize { size: big.len(), cap }));
    }
    let mut out = c.clone();
    for comp in &comps {
        let mut verts: Vec<usize> = comp.iter().map(|i| map[i]).collect();
        verts.sort_unstable();
        if !complete_component(g, &mut out, &verts, 0) {
            return Err(PipelineError::Abort(AbortReason::Unsatisfiable { component: verts[0] }));
        }
    }
    Ok(out)
}

fn complete_component(g: &Graph, c: &mut Coloring, verts: &[usize], i: usize) -> bool {
    let Some(&v) = verts.get(i) else { return true };
    for col in 1..=c.k() {
        if g.neighbors(v).iter().all(|&u| c.get(u as usize) != col) {
            c.set(v, col);
            if complete_component(g, c, verts, i + 1) {
                return true;
            }
        }
    }
    c.set(v, FREE);
    false
}

/// Colorings after each stage, with timings and, when the planting is
/// known, disagreement with it on colored vertices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTrace {
    pub names: Vec<String>,
    pub colorings: Vec<Coloring>,
    pub timings_ms: Vec<f64>,
    pub disagreement: Vec<Option<usize>>,
    pub cluster_attempts: Option<usize>,
    /// Stage 1 failed and the all-1 coloring was used instead.
    pub clustering_fallback: bool,
    pub recolor_rounds: usize,
    /// The later stages failed but the recolored coloring was proper and
    /// became the result.
    pub kept_recolored: bool,
}

impl StageTrace {
    fn record(&mut self, name: &str, c: &Coloring, started: Instant, planted: Option<&Coloring>) {
        self.names.push(name.to_string());
        self.timings_ms.push(started.elapsed().as_secs_f64() * 1e3);
        self.disagreement.push(planted.and_then(|p| disagreement(c, p).ok()));
        self.colorings.push(c.clone());
    }

    pub fn stage(&self, name: &str) -> Option<&Coloring> {
        self.names.iter().position(|s| s == name).map(|i| &self.colorings[i])
    }

    pub fn total_ms(&self) -> f64 {
        self.timings_ms.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: u8,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArOutcome {
    /// Final coloring on success, otherwise the last one produced.
    pub coloring: Coloring,
    pub success: bool,
    pub legal: bool,
    pub complete: bool,
    /// Free vertices after cautious uncoloring.
    pub b: usize,
    pub d: f64,
    pub trace: StageTrace,
    pub failure: Option<StageFailure>,
}

fn check_d(g: &Graph, d: Option<f64>, params: &PipelineParams) -> Result<f64, PipelineError> {
    params.validate()?;
    if params.k != 3 {
        return Err(PipelineError::InvalidParams("the 3-coloring pipeline needs k = 3".into()));
    }
    Ok(d.unwrap_or_else(|| super::estimate_d(g, None, params)))
}

/// Stage 1 with the all-1 fallback, then iterative recoloring.
fn approximate(
    g: &Graph,
    d: f64,
    params: &PipelineParams,
    planted: Option<&Coloring>,
    trace: &mut StageTrace,
) -> (Coloring, Option<StageFailure>) {
    let t = Instant::now();
    let (c1, failure) = match spectral_clustering_traced(g, d, params) {
        Ok(out) => {
            trace.cluster_attempts = Some(out.attempts);
            (out.coloring, None)
        }
        Err(e) => {
            trace.clustering_fallback = true;
            (Coloring::constant(g.n(), 3, 1), Some(StageFailure { stage: 1, error: e.to_string() }))
        }
    };
    trace.record("cluster", &c1, t, planted);

    let t = Instant::now();
    let (c2, rounds) = iterative_recolor_with(g, &c1, d, params, |_| {});
    trace.recolor_rounds = rounds;
    trace.record("recolor", &c2, t, planted);
    (c2, failure)
}

fn legality(g: &Graph, c: &Coloring) -> bool {
    is_legal_coloring(g, c).map(|r| r.0).unwrap_or(false)
}

/// Uncoloring can throw away a recolored coloring that was already proper,
/// which happens at small `d`; fall back to it when the final one is not.
fn keep_if_proper(g: &Graph, last: Coloring, recolored: &Coloring, trace: &mut StageTrace) -> Coloring {
    if (last.is_total() && legality(g, &last)) || !recolored.is_total() || !legality(g, recolored) {
        return last;
    }
    trace.kept_recolored = true;
    recolored.clone()
}

/// Clustering, iterative recoloring, cautious uncoloring, safe recoloring
/// and brute force. `d` defaults to the compensated average degree.
pub fn color_ar(
    g: &Graph,
    d: Option<f64>,
    params: &PipelineParams,
    planted: Option<&Coloring>,
) -> Result<ArOutcome, PipelineError> {
    let d = check_d(g, d, params)?;
    let mut trace = StageTrace::default();
    let (c2, mut failure) = approximate(g, d, params, planted, &mut trace);

    let t = Instant::now();
    let c3 = cautious_uncolor(g, &c2, d, params);
    trace.record("uncolor", &c3, t, planted);
    let b = c3.free_count();

    let t = Instant::now();
    let c4 = safe_recolor(g, &c3);
    trace.record("safe", &c4, t, planted);

    let t = Instant::now();
    let coloring = match brute_force_components(g, &c4, params) {
        Ok(c5) => {
            trace.record("brute", &c5, t, planted);
            c5
        }
        Err(e) => {
            failure = Some(StageFailure { stage: 5, error: e.to_string() });
            c4
        }
    };
    let coloring = keep_if_proper(g, coloring, &c2, &mut trace);
    let complete = coloring.is_total();
    let legal = legality(g, &coloring);
    let success = complete && legal;
    if success {
        failure = None;
    } else if failure.is_none() {
        failure = Some(StageFailure { stage: 5, error: "final coloring is not legal".into() });
    }
    Ok(ArOutcome { coloring, success, legal, complete, b, d, trace, failure })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaOutcome {
    pub coloring: Coloring,
    pub complete: bool,
    pub legal: bool,
    /// Free vertices after cautious uncoloring.
    pub b: usize,
    /// Free vertices after safe recoloring.
    pub free_after_safe: usize,
    /// Free vertices without colored neighbors.
    pub f0: usize,
    /// Color given to those vertices in the accepted completion.
    pub guess: Option<u32>,
    pub d: f64,
    pub trace: StageTrace,
    pub failure: Option<StageFailure>,
}

/// Partial coloring as in [`color_ar`] stages 1–4, then for each guess
/// `i` the free vertices without colored neighbors get `i` and the rest
/// are completed from two-color lists via 2SAT.
pub fn color_ra(
    g: &Graph,
    d: Option<f64>,
    params: &PipelineParams,
    planted: Option<&Coloring>,
) -> Result<RaOutcome, PipelineError> {
    let d = check_d(g, d, params)?;
    let mut trace = StageTrace::default();
    let (c2, stage1_failure) = approximate(g, d, params, planted, &mut trace);

    let t = Instant::now();
    let c3 = cautious_uncolor(g, &c2, d, params);
    trace.record("uncolor", &c3, t, planted);
    let b = c3.free_count();

    let t = Instant::now();
    let partial = safe_recolor(g, &c3);
    trace.record("safe", &partial, t, planted);
    let free_after_safe = partial.free_count();

    let t = Instant::now();
    let n = g.n();
    let mut lists: Vec<Option<Vec<u32>>> = vec![None; n];
    let mut f0 = Vec::new();
    for v in 0..n {
        if !partial.is_free(v) {
            continue;
        }
        let mut seen = [false; 4];
        for &u in g.neighbors(v) {
            seen[partial.get(u as usize) as usize] = true;
        }
        if seen[1..].iter().all(|s| !s) {
            f0.push(v);
        } else {
            lists[v] = Some((1..=3).filter(|&c| !seen[c as usize]).collect());
        }
    }
    let infeasible = lists.iter().flatten().any(|l| l.is_empty());
    let mut result = None;
    if free_after_safe == 0 {
        result = Some((partial.clone(), None));
    } else if !infeasible {
        for guess in 1..=3u32 {
            let mut fixed = partial.clone();
            for &v in &f0 {
                fixed.set(v, guess);
            }
            let problem = ListColoringProblem { graph: g.clone(), fixed, lists: lists.clone() };
            if let Some(c) = solve_list_coloring(&problem)? {
                result = Some((c, Some(guess)));
                break;
            }
        }
    }
    let (coloring, guess) = result.unwrap_or((partial, None));
    trace.record("complete", &coloring, t, planted);
    let coloring = keep_if_proper(g, coloring, &c2, &mut trace);

    let complete = coloring.is_total();
    let legal = legality(g, &coloring);
    let failure = if complete && legal {
        None
    } else {
        Some(stage1_failure.unwrap_or(StageFailure { stage: 4, error: "no guess admits a completion".into() }))
    };
    Ok(RaOutcome { coloring, complete, legal, b, free_after_safe, f0: f0.len(), guess, d, trace, failure })
}
