//! Seeded sweeps over instance parameters, one CSV row per cell.

use std::collections::BTreeMap;
use std::path::Path;

use hostcolor::generators::{gen_gnp, gen_random_regular, make_instance, HostKind, RandomAxes};
use hostcolor::graph::is_legal_coloring;
use hostcolor::pipeline::{approx_distance, color_ar, color_ra, compute_sb, PipelineParams, StageTrace};
use hostcolor::spectral::{validate_planted_spectrum, PlantingMode, SpectrumReport, SpectrumSlack};
use hostcolor::{Coloring, Graph, Model, PlantedInstance, Seed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{adversary_menu, Adversary};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    /// Adversarial-host pipeline.
    Ar,
    /// Random-host pipeline with the 2SAT finish.
    Ra,
    /// Spectrum shape check only.
    Spectrum,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Ar => "ar",
            Algo::Ra => "ra",
            Algo::Spectrum => "spectrum",
        })
    }
}

fn default_k() -> Vec<u32> {
    vec![3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub algo: Algo,
    pub n: Vec<usize>,
    pub d: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: Vec<u32>,
    pub num_seeds: usize,
    /// Host family, used whether the host axis is random or adversarial.
    #[serde(default)]
    pub host: HostKind,
    /// Planting strategies for adversarial-planting models, one sweep axis.
    #[serde(default)]
    pub adversaries: Vec<Adversary>,
    #[serde(default)]
    pub params: PipelineParams,
    #[serde(default)]
    pub spectrum_slack: SpectrumSlack,
    /// Master seed.
    #[serde(default)]
    pub seed: u64,
    /// Write wall-clock columns; off by default so output is reproducible.
    #[serde(default)]
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.n.is_empty() || self.d.is_empty() || self.k.is_empty() {
            return bad("sweeps over n, d and k must be nonempty");
        }
        if self.num_seeds == 0 {
            return bad("num_seeds must be at least 1");
        }
        if self.model.adversarial_planting() && self.adversaries.is_empty() {
            return bad("adversarial planting needs at least one adversary");
        }
        if !self.model.adversarial_planting() && !self.adversaries.is_empty() {
            return bad("adversaries apply only to adversarial-planting models");
        }
        if self.d.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return bad("d must be finite and nonnegative");
        }
        self.params.validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn cells(&self) -> Vec<CellSpec> {
        let advs: Vec<Option<Adversary>> =
            if self.adversaries.is_empty() { vec![None] } else { self.adversaries.iter().copied().map(Some).collect() };
        let mut cells = Vec::new();
        for &n in &self.n {
            for &d in &self.d {
                for &k in &self.k {
                    for &adversary in &advs {
                        for replicate in 0..self.num_seeds {
                            let index = cells.len();
                            let seed = Seed::new(self.seed).indexed("cell", index as u64).state();
                            cells.push(CellSpec { index, n, d, k, adversary, replicate, seed });
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub index: usize,
    pub n: usize,
    pub d: f64,
    pub k: u32,
    pub adversary: Option<Adversary>,
    pub replicate: usize,
    /// Derived from the master seed and the cell index only.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub spec: CellSpec,
    pub legal: bool,
    pub complete: bool,
    pub b: Option<usize>,
    pub sb: Option<usize>,
    pub dist: Option<usize>,
    /// Stage name and wall time.
    pub stages: Vec<(String, f64)>,
    pub failure_stage: Option<String>,
    pub error: Option<String>,
    pub spectrum: Option<SpectrumReport>,
}

impl CellOutcome {
    fn failed(spec: CellSpec, stage: &str, error: String) -> Self {
        CellOutcome {
            spec,
            legal: false,
            complete: false,
            b: None,
            sb: None,
            dist: None,
            stages: Vec::new(),
            failure_stage: Some(stage.to_string()),
            error: Some(error),
            spectrum: None,
        }
    }

    pub fn success(&self, algo: Algo) -> bool {
        match algo {
            Algo::Spectrum => self.spectrum.as_ref().is_some_and(|r| r.passed()),
            Algo::Ar | Algo::Ra => self.legal && self.complete,
        }
    }
}

fn host_for(kind: HostKind, n: usize, d: f64, seed: &Seed) -> Result<Graph, String> {
    match kind {
        HostKind::Gnp => gen_gnp(n, d, seed),
        HostKind::Regular => gen_random_regular(n, d.round() as usize, seed),
    }
    .map_err(|e| e.to_string())
}

/// The cell's instance, or the failing stage and its error.
pub fn build_instance(config: &ExperimentConfig, spec: &CellSpec) -> Result<PlantedInstance, (String, String)> {
    let seed = Seed::new(spec.seed);
    let model = config.model;
    let axes = RandomAxes { host: config.host, balanced: true };
    let host = if model.adversarial_host() {
        Some(host_for(config.host, spec.n, spec.d, &seed.child("host")).map_err(|e| ("gen".to_string(), e))?)
    } else {
        None
    };
    let plant = match spec.adversary {
        Some(adv) => {
            // The adversary sees the host, so draw it first when it is random.
            let h = match &host {
                Some(h) => h.clone(),
                None => host_for(config.host, spec.n, spec.d, &seed.child("host")).map_err(|e| ("gen".to_string(), e))?,
            };
            let p = adversary_menu(adv, &h, spec.k, &seed.child("adversary"))
                .map_err(|e| ("adversary".to_string(), e.to_string()))?;
            if !model.adversarial_host() {
                return PlantedInstance::new(h, p, model, spec.d, spec.seed).map_err(|e| ("gen".to_string(), e.to_string()));
            }
            Some(p)
        }
        None => None,
    };
    make_instance(model, spec.n, spec.k, spec.d, host, plant, &seed, axes).map_err(|e| ("gen".to_string(), e.to_string()))
}

fn stage_times(trace: &StageTrace) -> Vec<(String, f64)> {
    trace.names.iter().cloned().zip(trace.timings_ms.iter().copied()).collect()
}

fn finish(inst: &PlantedInstance, coloring: &Coloring, complete: bool) -> (bool, Option<usize>) {
    let legal = complete && is_legal_coloring(&inst.result, coloring).map(|r| r.0).unwrap_or(false);
    let dist = if complete { approx_distance(coloring, &inst.planted, inst.planted.k()).ok() } else { None };
    (legal, dist)
}

pub fn run_cell(config: &ExperimentConfig, spec: CellSpec) -> CellOutcome {
    let inst = match build_instance(config, &spec) {
        Ok(inst) => inst,
        Err((stage, e)) => return CellOutcome::failed(spec, &stage, e),
    };
    let params = PipelineParams { seed: spec.seed, k: spec.k, ..config.params.clone() };
    let sb = Some(compute_sb(&inst, params.eps).len());
    match config.algo {
        Algo::Ar => match color_ar(&inst.result, Some(spec.d), &params, Some(&inst.planted)) {
            Ok(out) => {
                let (legal, dist) = finish(&inst, &out.coloring, out.complete);
                CellOutcome {
                    spec,
                    legal,
                    complete: out.complete,
                    b: Some(out.b),
                    sb,
                    dist,
                    stages: stage_times(&out.trace),
                    failure_stage: out.failure.as_ref().map(|f| f.stage.to_string()),
                    error: out.failure.map(|f| f.error),
                    spectrum: None,
                }
            }
            Err(e) => CellOutcome::failed(spec, "params", e.to_string()),
        },
        Algo::Ra => match color_ra(&inst.result, Some(spec.d), &params, Some(&inst.planted)) {
            Ok(out) => {
                let (legal, dist) = finish(&inst, &out.coloring, out.complete);
                CellOutcome {
                    spec,
                    legal,
                    complete: out.complete,
                    b: Some(out.b),
                    sb,
                    dist,
                    stages: stage_times(&out.trace),
                    failure_stage: out.failure.as_ref().map(|f| f.stage.to_string()),
                    error: out.failure.map(|f| f.error),
                    spectrum: None,
                }
            }
            Err(e) => CellOutcome::failed(spec, "params", e.to_string()),
        },
        Algo::Spectrum => {
            let mode = if config.model.adversarial_planting() {
                PlantingMode::AdversarialPlanting
            } else {
                PlantingMode::RandomPlanting
            };
            if spec.k != 3 {
                return CellOutcome::failed(spec, "spectrum", "spectrum shape is defined for k = 3".into());
            }
            match validate_planted_spectrum(&inst, mode, config.spectrum_slack) {
                Ok(report) => CellOutcome {
                    spec,
                    legal: false,
                    complete: false,
                    b: None,
                    sb,
                    dist: None,
                    stages: Vec::new(),
                    failure_stage: (!report.passed()).then(|| "spectrum".to_string()),
                    error: None,
                    spectrum: Some(report),
                },
                Err(e) => CellOutcome::failed(spec, "spectrum", e.to_string()),
            }
        }
    }
}

pub const CSV_COLUMNS: [&str; 25] = [
    "model",
    "algo",
    "n",
    "d",
    "k",
    "seed",
    "adversary",
    "legal",
    "complete",
    "b",
    "sb",
    "dist",
    "t_total_ms",
    "t_cluster_ms",
    "t_recolor_ms",
    "t_uncolor_ms",
    "t_safe_ms",
    "t_finish_ms",
    "failure_stage",
    "lambda_1",
    "lambda_n1",
    "lambda_n",
    "middle_max",
    "host_lambda_hat",
    "spectrum_ok",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn row(config: &ExperimentConfig, c: &CellOutcome) -> Vec<String> {
    let time = |names: &[&str]| -> String {
        if !config.timings {
            return String::new();
        }
        let t: f64 = c.stages.iter().filter(|(s, _)| names.contains(&s.as_str())).map(|(_, t)| t).sum();
        format!("{t:.3}")
    };
    let total = if config.timings { format!("{:.3}", c.stages.iter().map(|(_, t)| t).sum::<f64>()) } else { String::new() };
    let s = c.spectrum.as_ref();
    vec![
        config.model.to_string(),
        config.algo.to_string(),
        c.spec.n.to_string(),
        c.spec.d.to_string(),
        c.spec.k.to_string(),
        c.spec.seed.to_string(),
        opt(c.spec.adversary),
        c.legal.to_string(),
        c.complete.to_string(),
        opt(c.b),
        opt(c.sb),
        opt(c.dist),
        total,
        time(&["cluster"]),
        time(&["recolor"]),
        time(&["uncolor"]),
        time(&["safe"]),
        time(&["brute", "complete"]),
        opt(c.failure_stage.clone()),
        opt(s.map(|r| r.lambda_1)),
        opt(s.map(|r| r.lambda_n_minus_1)),
        opt(s.map(|r| r.lambda_n)),
        opt(s.map(|r| r.middle_max)),
        opt(s.map(|r| r.host_lambda_hat)),
        opt(s.map(|r| r.passed())),
    ]
}

pub fn to_csv(config: &ExperimentConfig, cells: &[CellOutcome]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for c in cells {
        w.write_record(row(config, c))?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub d: f64,
    pub k: u32,
    pub adversary: Option<Adversary>,
    pub cells: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Cells per failure stage label.
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub model: Model,
    pub algo: Algo,
    pub seed: u64,
    pub cells: usize,
    pub successes: usize,
    pub points: Vec<SweepPoint>,
}

pub fn summarize(config: &ExperimentConfig, cells: &[CellOutcome]) -> Summary {
    let mut points: Vec<SweepPoint> = Vec::new();
    for c in cells {
        let same = |p: &SweepPoint| {
            p.n == c.spec.n && p.d == c.spec.d && p.k == c.spec.k && p.adversary == c.spec.adversary
        };
        let idx = match points.iter().position(same) {
            Some(i) => i,
            None => {
                points.push(SweepPoint {
                    n: c.spec.n,
                    d: c.spec.d,
                    k: c.spec.k,
                    adversary: c.spec.adversary,
                    cells: 0,
                    successes: 0,
                    success_rate: 0.0,
                    failures: BTreeMap::new(),
                });
                points.len() - 1
            }
        };
        let p = &mut points[idx];
        p.cells += 1;
        if c.success(config.algo) {
            p.successes += 1;
        } else if let Some(stage) = &c.failure_stage {
            *p.failures.entry(stage.clone()).or_default() += 1;
        }
    }
    for p in points.iter_mut() {
        p.success_rate = p.successes as f64 / p.cells as f64;
    }
    Summary {
        model: config.model,
        algo: config.algo,
        seed: config.seed,
        cells: cells.len(),
        successes: points.iter().map(|p| p.successes).sum(),
        points,
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub cells: Vec<CellOutcome>,
    pub csv: String,
    pub summary: Summary,
}

/// Runs every cell on `workers` threads (0 = rayon's default). Rows come
/// back in cell order whatever the scheduling.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Report, ExperimentError> {
    config.validate()?;
    let specs = config.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let cells: Vec<CellOutcome> = pool.install(|| specs.par_iter().map(|&s| run_cell(config, s)).collect());
    let csv = to_csv(config, &cells)?;
    let summary = summarize(config, &cells);
    Ok(Report { cells, csv, summary })
}

/// Writes `results.csv` and `summary.json` into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("results.csv"), &report.csv)?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&report.summary)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            model: Model::RR,
            algo: Algo::Ar,
            n: vec![60],
            d: vec![20.0],
            k: vec![3],
            num_seeds: 1,
            host: HostKind::Gnp,
            adversaries: vec![],
            params: PipelineParams::desk_scale(),
            spectrum_slack: SpectrumSlack::default(),
            seed: 5,
            timings: false,
        }
    }

    #[test]
    fn validation() {
        let mut c = small();
        c.num_seeds = 0;
        assert!(matches!(c.validate(), Err(ExperimentError::Config(_))));
        let mut c = small();
        c.model = Model::RA;
        assert!(c.validate().is_err());
        c.adversaries = vec![Adversary::IdBlocks];
        assert!(c.validate().is_ok());
        assert!(ExperimentConfig::from_json(r#"{"model":"RR","algo":"ar","n":[9],"d":[3],"num_seeds":1,"bogus":1}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"model":"RR","algo":"ra","n":[9],"d":[3],"num_seeds":2}"#).unwrap();
        assert_eq!(c.k, vec![3]);
        assert_eq!(c.cells().len(), 2);
    }

    #[test]
    fn cells_get_distinct_seeds() {
        let mut c = small();
        c.n = vec![30, 60];
        c.num_seeds = 3;
        let cells = c.cells();
        assert_eq!(cells.len(), 6);
        let seeds: std::collections::BTreeSet<u64> = cells.iter().map(|s| s.seed).collect();
        assert_eq!(seeds.len(), 6);
        assert_eq!(cells[4].n, 60);
    }

    #[test]
    fn one_cell_rr() {
        let report = run_experiment(&small(), 1).unwrap();
        assert_eq!(report.csv.lines().count(), 2);
        assert!(report.cells[0].legal, "{:?}", report.cells[0]);
        let again = run_experiment(&small(), 2).unwrap();
        assert_eq!(report.csv, again.csv);
    }
}
