use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hostcolor::forge::{
    embed_q_via_independent_blocks, forge_aa, forge_k4_planting, forge_ra_adversary, reduce_4regular_to_balanced,
    triple_copy, triple_copy_coloring, ForgeError,
};
use hostcolor::generators::{balanced_random_partition, gen_gnp, gen_random_regular, random_partition};
use hostcolor::io::{load_coloring, load_graph, write_coloring, write_graph};
use hostcolor::pipeline::{color_ar, color_ra, estimate_d, PipelineParams};
use hostcolor::spectral::{
    extreme_eigenpairs, full_spectrum_dense, validate_planted_spectrum, PlantingMode, SpectrumSlack, ITERATIVE_TOL,
};
use hostcolor::{Coloring, Graph, Model, PlantedInstance, Seed};
use hostcolor_cli::experiment::write_report;
use hostcolor_cli::{adversary_menu, run_experiment, verify, Adversary, ExperimentConfig, SEED_ENV};
use serde_json::json;

type AnyError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "hostcolor", version, about = "Planted 3-coloring: generate, color, verify, forge, experiment")]
struct Cli {
    /// Master seed; the HOSTCOLOR_SEED environment variable is used when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (stdout when absent, where that makes sense).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for experiments; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// JSON file of pipeline parameters; missing fields take their defaults.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random host graph.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Gnp)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: f64,
    },
    /// Plant a partition on a host and write an instance bundle.
    Plant {
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// `balanced`, `uniform`, or an adversary name.
        #[arg(long, default_value = "balanced")]
        strategy: String,
    },
    /// Color a graph with the spectral pipeline.
    Color {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Pipeline::Ar)]
        algo: Pipeline,
        /// Host degree; estimated from the graph when absent.
        #[arg(long)]
        d: Option<f64>,
        /// Host graph, used to read off `d`.
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Check a coloring; exits 0 iff it is total and proper.
    Verify { graph: PathBuf, coloring: PathBuf },
    /// Extreme eigenvalues of a graph, or the planted spectrum report of a bundle.
    Spectrum {
        #[arg(long, conflicts_with = "bundle")]
        graph: Option<PathBuf>,
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Hardness constructions with certificates.
    Forge(ForgeArgs),
    /// Run a sweep described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Also write wall-clock columns.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args)]
struct ForgeArgs {
    #[command(subcommand)]
    mode: ForgeMode,
}

#[derive(Subcommand)]
enum ForgeMode {
    /// Balanced graph from a 4-regular graph.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
    },
    /// `Q` glued to a random expander; default `Q` is three copies of K_{4,4}.
    Aa {
        #[arg(long)]
        q: Option<PathBuf>,
        #[arg(long)]
        chi: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Planting that cuts an induced `Q` loose from the host.
    Ra {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// 4-coloring planting that walls `Q` off with the fourth color.
    K4 {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Embed `Q` through independent blocks of a host.
    Embed {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        hprime: PathBuf,
        #[arg(long, default_value_t = 12)]
        block_size: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gnp,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    Ar,
    Ra,
}

fn master_seed(cli: &Cli) -> Result<Option<u64>, AnyError> {
    if cli.seed.is_some() {
        return Ok(cli.seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => Ok(Some(v.trim().parse().map_err(|_| format!("{SEED_ENV} must be a decimal u64, got `{v}`"))?)),
        Err(_) => Ok(None),
    }
}

fn load_params(cli: &Cli) -> Result<Option<PipelineParams>, AnyError> {
    match &cli.params {
        Some(p) => {
            let params: PipelineParams = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            params.validate()?;
            Ok(Some(params))
        }
        None => Ok(None),
    }
}

fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<(), AnyError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn need_out(out: Option<&Path>) -> Result<&Path, AnyError> {
    out.ok_or_else(|| "this command writes a bundle; pass --out <dir>".into())
}

fn write_certificate(dir: &Path, value: &serde_json::Value) -> Result<(), AnyError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("certificate.json"), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn fail_step(e: &ForgeError) -> Option<String> {
    match e {
        ForgeError::Fail(step) => Some(step.to_string()),
        _ => None,
    }
}

fn run(cli: &Cli) -> Result<ExitCode, AnyError> {
    let seed_value = master_seed(cli)?;
    let seed = Seed::new(seed_value.unwrap_or(0));
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen { kind, n, d } => {
            let g = match kind {
                Kind::Gnp => gen_gnp(*n, *d, &seed.child("host"))?,
                Kind::Regular => gen_random_regular(*n, d.round() as usize, &seed.child("host"))?,
            };
            emit(out, "host.graph", &write_graph(&g))?;
        }
        Command::Plant { host, k, strategy } => {
            let h = load_graph(host)?;
            let (planted, model) = match strategy.as_str() {
                "balanced" => (balanced_random_partition(h.n(), *k, &seed.child("plant")), Model::AR),
                "uniform" => (random_partition(h.n(), *k, &seed.child("plant")), Model::AR),
                name => (adversary_menu(name.parse::<Adversary>()?, &h, *k, &seed.child("adversary"))?, Model::AA),
            };
            let d = h.average_degree();
            PlantedInstance::new(h, planted, model, d, seed.value)?.write_bundle(need_out(out)?)?;
        }
        Command::Color { graph, algo, d, host } => {
            let g = load_graph(graph)?;
            let mut params = load_params(cli)?.unwrap_or_default();
            params.seed = seed.value;
            let host = host.as_ref().map(|p| load_graph(p)).transpose()?;
            let d = d.unwrap_or_else(|| estimate_d(&g, host.as_ref(), &params));
            let (coloring, ok, summary) = match algo {
                Pipeline::Ar => {
                    let o = color_ar(&g, Some(d), &params, None)?;
                    (o.coloring, o.success, json!({"algo": "ar", "d": d, "b": o.b, "legal": o.legal, "complete": o.complete,
                        "failure": o.failure.map(|f| format!("stage {}: {}", f.stage, f.error))}))
                }
                Pipeline::Ra => {
                    let o = color_ra(&g, Some(d), &params, None)?;
                    (o.coloring, o.legal && o.complete, json!({"algo": "ra", "d": d, "b": o.b, "legal": o.legal,
                        "complete": o.complete, "f0": o.f0, "guess": o.guess,
                        "failure": o.failure.map(|f| format!("stage {}: {}", f.stage, f.error))}))
                }
            };
            emit(out, "coloring.txt", &write_coloring(&coloring))?;
            eprintln!("{summary}");
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Verify { graph, coloring } => {
            let verdict = verify(&std::fs::read_to_string(graph)?, &std::fs::read_to_string(coloring)?)?;
            for (u, v) in &verdict.violations {
                println!("monochromatic edge {} {}", u + 1, v + 1);
            }
            if verdict.free > 0 {
                println!("{} uncolored vertices", verdict.free);
            }
            if verdict.legal() {
                println!("legal");
                return Ok(ExitCode::SUCCESS);
            }
            return Ok(ExitCode::FAILURE);
        }
        Command::Spectrum { graph, bundle, count } => {
            let value = match (graph, bundle) {
                (Some(path), _) => {
                    let g = load_graph(path)?;
                    let spectrum = if g.n() <= 64 {
                        full_spectrum_dense(&g)?
                    } else {
                        let c = (*count).min(g.n() / 2).max(1);
                        extreme_eigenpairs(&g, c, c, ITERATIVE_TOL)?
                    };
                    let ev = spectrum.eigenvalues();
                    let c = (*count).min(ev.len());
                    json!({"n": g.n(), "top": ev[..c], "bottom": ev[ev.len() - c..]})
                }
                (None, Some(dir)) => {
                    let inst = PlantedInstance::read_bundle(dir)?;
                    let mode = if inst.params.model.adversarial_planting() {
                        PlantingMode::AdversarialPlanting
                    } else {
                        PlantingMode::RandomPlanting
                    };
                    serde_json::to_value(validate_planted_spectrum(&inst, mode, SpectrumSlack::default())?)?
                }
                (None, None) => return Err("pass --graph or --bundle".into()),
            };
            emit(out, "spectrum.json", &(serde_json::to_string_pretty(&value)? + "\n"))?;
        }
        Command::Forge(args) => return forge(&args.mode, &seed, out),
        Command::Experiment { config, timings } => {
            let mut config = ExperimentConfig::from_json(&std::fs::read_to_string(config)?)?;
            if let Some(s) = seed_value {
                config.seed = s;
            }
            if let Some(p) = load_params(cli)? {
                config.params = p;
            }
            config.timings |= *timings;
            let report = run_experiment(&config, cli.workers)?;
            write_report(&report, out.unwrap_or(Path::new("results")))?;
            println!("{}/{} cells succeeded", report.summary.successes, report.summary.cells);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn forge(mode: &ForgeMode, seed: &Seed, out: Option<&Path>) -> Result<ExitCode, AnyError> {
    let dir = need_out(out)?;
    match mode {
        ForgeMode::Reduce { graph } => {
            let h4 = load_graph(graph)?;
            let r = reduce_4regular_to_balanced(&h4)?;
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("reduced.graph"), write_graph(&r.graph))?;
            write_certificate(
                dir,
                &json!({
                    "n": r.graph.n(), "m": r.graph.m(), "average_degree": r.average_degree,
                    "densest_density": r.densest.density(), "balanced": r.balanced,
                    "gadget_ports_equal": r.gadget.ports_equal, "gadget_colorings": r.gadget.colorings,
                    "ports": r.ports,
                }),
            )?;
        }
        ForgeMode::Aa { q, chi, n, d } => {
            let (q, chi) = match q {
                Some(p) => {
                    let q = load_graph(p)?;
                    let chi = chi.as_ref().map(|c| load_coloring(c, Some(q.n()), Some(3))).transpose()?;
                    (q, chi)
                }
                None => {
                    let k44 = Graph::complete_multipartite(&[4, 4]);
                    let side = Coloring::new(3, vec![1, 1, 1, 1, 2, 2, 2, 2])?;
                    (triple_copy(&k44), Some(triple_copy_coloring(&side)))
                }
            };
            let inst = forge_aa(&q, *n, *d, seed, chi.as_ref())?;
            PlantedInstance::new(inst.h.clone(), inst.planted.clone(), Model::AA, *d as f64, seed.value)?
                .write_bundle(dir)?;
            write_certificate(
                dir,
                &json!({
                    "n": inst.h.n(), "d": inst.d, "q_vertices": inst.q.n(), "connectors": inst.connectors.len(),
                    "certificate": inst.certificate,
                }),
            )?;
        }
        ForgeMode::Ra { host, q } | ForgeMode::K4 { host, q } => {
            let (h, q) = (load_graph(host)?, load_graph(q)?);
            let is_k4 = matches!(mode, ForgeMode::K4 { .. });
            let result = if is_k4 { forge_k4_planting(&h, &q, seed) } else { forge_ra_adversary(&h, &q, seed) };
            match result {
                Ok(f) => {
                    let d = h.average_degree();
                    PlantedInstance::new(h, f.planted.clone(), Model::RA, d, seed.value)?.write_bundle(dir)?;
                    write_certificate(dir, &json!({"copy": f.copy, "chi": f.chi.as_slice(), "fail_step": null}))?;
                }
                Err(e) => match fail_step(&e) {
                    Some(step) => {
                        write_certificate(dir, &json!({"fail_step": step}))?;
                        eprintln!("forge failed at step {step}");
                        return Ok(ExitCode::FAILURE);
                    }
                    None => return Err(e.into()),
                },
            }
        }
        ForgeMode::Embed { q, hprime, block_size } => {
            let (q, hprime) = (load_graph(q)?, load_graph(hprime)?);
            match embed_q_via_independent_blocks(&q, &hprime, *block_size, seed) {
                Ok(e) => {
                    let d = e.block_host.host.average_degree();
                    PlantedInstance::new(e.block_host.host.clone(), e.planted.clone(), Model::AR, d, seed.value)?
                        .write_bundle(dir)?;
                    write_certificate(dir, &json!({"map": e.map, "blocks": e.block_host.blocks, "fail_step": null}))?;
                }
                Err(e) => match fail_step(&e) {
                    Some(step) => {
                        write_certificate(dir, &json!({"fail_step": step}))?;
                        eprintln!("forge failed: {step}");
                        return Ok(ExitCode::FAILURE);
                    }
                    None => return Err(e.into()),
                },
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
