//! Host graphs, planted partitions and their composition into instances.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Coloring, Graph};
use crate::io::{self, FormatError};
use crate::seed::{Rng, Seed};

pub const GENERATOR_VERSION: &str = concat!("hostcolor-", env!("CARGO_PKG_VERSION"));

/// Restarts allowed before the pairing model gives up.
pub const PAIRING_RETRY_CAP: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("average degree {d} outside [0, {max}]")]
    DegreeOutOfRange { d: f64, max: f64 },
    #[error("degree sum {0} is odd")]
    OddDegreeSum(usize),
    #[error("degree {degree} impossible on {n} vertices")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("pairing model failed after {0} restarts")]
    RetryBudgetExceeded(usize),
    #[error("need at least {need} vertices, got {n}")]
    TooFewVertices { n: usize, need: usize },
    #[error("planting must be total and cover all {n} vertices")]
    PlantingNotTotal { n: usize },
    #[error("model {model} requires a supplied {what}")]
    MissingInput { model: Model, what: &'static str },
    #[error("model {model} draws the {what} at random; do not supply one")]
    UnexpectedInput { model: Model, what: &'static str },
}

/// Which of host and planting is adversarial (`A`) or random (`R`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    AA,
    AR,
    RA,
    RR,
}

impl Model {
    pub fn adversarial_host(self) -> bool {
        matches!(self, Model::AA | Model::AR)
    }

    pub fn adversarial_planting(self) -> bool {
        matches!(self, Model::AA | Model::RA)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::AA => "AA",
            Model::AR => "AR",
            Model::RA => "RA",
            Model::RR => "RR",
        };
        f.write_str(s)
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "AA" => Ok(Model::AA),
            "AR" => Ok(Model::AR),
            "RA" => Ok(Model::RA),
            "RR" => Ok(Model::RR),
            _ => Err(format!("unknown model `{s}` (expected AA, AR, RA or RR)")),
        }
    }
}

/// Random host family used on random-host axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HostKind {
    #[default]
    Gnp,
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub model: Model,
    pub n: usize,
    pub k: u32,
    /// Host average degree (target for generated hosts, measured otherwise).
    pub d: f64,
    pub seed: u64,
    pub generator_version: String,
}

/// Host graph, planted partition and their intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub host: Graph,
    pub planted: Coloring,
    pub result: Graph,
    pub params: InstanceParams,
}

/// `G(n, p)` with `p = d/(n-1)`.
pub fn gen_gnp(n: usize, d: f64, seed: &Seed) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::TooFewVertices { n, need: 2 });
    }
    let max = (n - 1) as f64;
    if !(0.0..=max).contains(&d) {
        return Err(GenError::DegreeOutOfRange { d, max });
    }
    let p = d / max;
    let mut rng = seed.rng();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    Ok(Graph::from_sorted_adjacency(adj))
}

/// Simple `d`-regular graph from the pairing model.
pub fn gen_random_regular(n: usize, d: usize, seed: &Seed) -> Result<Graph, GenError> {
    gen_degree_sequence(&vec![d; n], seed)
}

/// Simple graph with the exact degree sequence, by sequential pairing of
/// points: a pair forming a loop or a double edge is redrawn, and the whole
/// pairing restarts when no admissible pair remains.
pub fn gen_degree_sequence(degrees: &[usize], seed: &Seed) -> Result<Graph, GenError> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(GenError::OddDegreeSum(total));
    }
    if let Some(&degree) = degrees.iter().find(|&&deg| deg > 0 && deg >= n) {
        return Err(GenError::DegreeTooLarge { degree, n });
    }
    let mut rng = seed.rng();
    for _ in 0..PAIRING_RETRY_CAP {
        if let Some(adj) = try_pairing(degrees, total, &mut rng) {
            return Ok(Graph::from_sorted_adjacency(adj));
        }
    }
    Err(GenError::RetryBudgetExceeded(PAIRING_RETRY_CAP))
}

fn try_pairing(degrees: &[usize], total: usize, rng: &mut Rng) -> Option<Vec<Vec<u32>>> {
    let mut points: Vec<u32> = Vec::with_capacity(total);
    for (v, &deg) in degrees.iter().enumerate() {
        points.extend(std::iter::repeat_n(v as u32, deg));
    }
    let mut adj: Vec<Vec<u32>> = degrees.iter().map(|&deg| Vec::with_capacity(deg)).collect();
    let admissible = |adj: &[Vec<u32>], u: u32, v: u32| u != v && !adj[u as usize].contains(&v);
    let mut misses = 0;
    while !points.is_empty() {
        let len = points.len() as u64;
        let (i, j) = if misses < 64 {
            let i = rng.gen_range(0..len) as usize;
            let j = rng.gen_range(0..len - 1) as usize;
            (i, if j >= i { j + 1 } else { j })
        } else {
            // Many redraws in a row: enumerate what is left.
            let mut options = Vec::new();
            for a in 0..points.len() {
                for b in a + 1..points.len() {
                    if admissible(&adj, points[a], points[b]) {
                        options.push((a, b));
                    }
                }
            }
            if options.is_empty() {
                return None;
            }
            misses = 0;
            options[rng.gen_range(0..options.len() as u64) as usize]
        };
        let (u, v) = (points[i], points[j]);
        if !admissible(&adj, u, v) {
            misses += 1;
            continue;
        }
        misses = 0;
        adj[u as usize].push(v);
        adj[v as usize].push(u);
        let (hi, lo) = (i.max(j), i.min(j));
        points.swap_remove(hi);
        points.swap_remove(lo);
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }
    Some(adj)
}

/// Each vertex independently uniform over `1..=k`.
pub fn random_partition(n: usize, k: u32, seed: &Seed) -> Coloring {
    assert!(k >= 2, "partition needs k >= 2");
    let mut rng = seed.rng();
    let assign = (0..n).map(|_| rng.gen_range(1..=k)).collect();
    Coloring::new(k, assign).expect("colors drawn in range")
}

/// Uniformly random partition with class sizes `⌊n/k⌋` or `⌈n/k⌉`; classes
/// `1..=(n mod k)` get the extra vertex.
pub fn balanced_random_partition(n: usize, k: u32, seed: &Seed) -> Coloring {
    assert!(k >= 1 && n >= k as usize, "balanced partition needs n >= k");
    let mut labels = balanced_labels(n, k);
    labels.shuffle(&mut seed.rng());
    Coloring::new(k, labels).expect("colors in range")
}

pub(crate) fn balanced_sizes(n: usize, k: u32) -> Vec<usize> {
    let k = k as usize;
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

fn balanced_labels(n: usize, k: u32) -> Vec<u32> {
    balanced_sizes(n, k)
        .into_iter()
        .enumerate()
        .flat_map(|(c, size)| std::iter::repeat_n(c as u32 + 1, size))
        .collect()
}

/// Removes every host edge inside a planted class.
pub fn apply_planting(host: &Graph, planted: &Coloring) -> Result<Graph, GenError> {
    if planted.len() != host.n() || !planted.is_total() {
        return Err(GenError::PlantingNotTotal { n: host.n() });
    }
    Ok(host.filter_edges(|u, v| planted.get(u) != planted.get(v)))
}

impl PlantedInstance {
    pub fn new(host: Graph, planted: Coloring, model: Model, d: f64, seed: u64) -> Result<Self, GenError> {
        let result = apply_planting(&host, &planted)?;
        let params = InstanceParams {
            model,
            n: host.n(),
            k: planted.k(),
            d,
            seed,
            generator_version: GENERATOR_VERSION.to_string(),
        };
        Ok(PlantedInstance { host, planted, result, params })
    }

    pub fn write_bundle(&self, dir: &Path) -> Result<(), FormatError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("host.graph"), io::write_graph(&self.host))?;
        std::fs::write(dir.join("result.graph"), io::write_graph(&self.result))?;
        std::fs::write(dir.join("planted.coloring"), io::write_coloring(&self.planted))?;
        let meta = serde_json::to_string_pretty(&self.params).expect("params serialize");
        std::fs::write(dir.join("meta.json"), meta + "\n")?;
        Ok(())
    }

    pub fn read_bundle(dir: &Path) -> Result<Self, FormatError> {
        let host = io::load_graph(&dir.join("host.graph"))?;
        let result = io::load_graph(&dir.join("result.graph"))?;
        let meta = std::fs::read_to_string(dir.join("meta.json"))?;
        let params: InstanceParams =
            serde_json::from_str(&meta).map_err(|e| FormatError::Invalid(format!("meta.json: {e}")))?;
        let planted = io::load_coloring(&dir.join("planted.coloring"), Some(host.n()), Some(params.k))?;
        let inst = PlantedInstance { host, planted, result, params };
        let replay = apply_planting(&inst.host, &inst.planted).map_err(|e| FormatError::Invalid(e.to_string()))?;
        if replay != inst.result {
            return Err(FormatError::Invalid("result.graph is not host minus planted-monochromatic edges".into()));
        }
        Ok(inst)
    }
}

/// Options for the random axes of [`make_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomAxes {
    pub host: HostKind,
    /// Balanced classes rather than independent uniform labels.
    pub balanced: bool,
}

impl Default for RandomAxes {
    fn default() -> Self {
        RandomAxes { host: HostKind::Gnp, balanced: true }
    }
}

/// Builds an instance for the given selection rule. Adversarial axes take
/// their input from the caller; random axes draw from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn make_instance(
    model: Model,
    n: usize,
    k: u32,
    d: f64,
    host_input: Option<Graph>,
    plant_input: Option<Coloring>,
    seed: &Seed,
    axes: RandomAxes,
) -> Result<PlantedInstance, GenError> {
    let host = match (model.adversarial_host(), host_input) {
        (true, Some(h)) => h,
        (true, None) => return Err(GenError::MissingInput { model, what: "host graph" }),
        (false, Some(_)) => return Err(GenError::UnexpectedInput { model, what: "host graph" }),
        (false, None) => match axes.host {
            HostKind::Gnp => gen_gnp(n, d, &seed.child("host"))?,
            HostKind::Regular => gen_random_regular(n, d.round() as usize, &seed.child("host"))?,
        },
    };
    let planted = match (model.adversarial_planting(), plant_input) {
        (true, Some(p)) => p,
        (true, None) => return Err(GenError::MissingInput { model, what: "planted coloring" }),
        (false, Some(_)) => return Err(GenError::UnexpectedInput { model, what: "planted coloring" }),
        (false, None) if axes.balanced => balanced_random_partition(host.n(), k, &seed.child("plant")),
        (false, None) => random_partition(host.n(), k, &seed.child("plant")),
    };
    let d = if model.adversarial_host() { host.average_degree() } else { d };
    PlantedInstance::new(host, planted, model, d, seed.value)
}
