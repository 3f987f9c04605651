//! `hyperplanar` command-line tool.
//!
//! Formats:
//! - network JSON: `{radius, nodes: [{id, line_group, plane_group, true_pos, ...}], edges: [{u, v, dist}]}`
//! - building config JSON: the `BuildingConfig` fields, or a scenario object tagged by `kind`
//!   (`building` or `random-cloud`)
//! - hypergraph text: first line `n m`, then `m` lines of three 0-based vertex indices; `#` starts a comment
//! - CSV (bench, experiment): `scenario,algo,n,m,k,r,localized_fraction,rmse,wall_time_ms,error`
//!
//! Exit codes: 0 success, 1 domain error, 2 usage or IO error. Errors are
//! printed to stderr as `{"error": code, "message": text}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperplanar_core::building::BuildingConfig;
use hyperplanar_core::eval::{
    align_isometry, bench_scaling, run_experiments, to_csv, BenchConfig, RunOptions, RunRecord, Scenario,
};
use hyperplanar_core::gadget::{verify_equivalence, Hypergraph3U};
use hyperplanar_core::group::{hierarchical_localize, GroupLocalization, GroupOptions, SeedRule};
use hyperplanar_core::interval::{find_claw, find_net, unit_interval_order, Graph};
use hyperplanar_core::model::GroupLevel;
use hyperplanar_core::quad::quadrilaterate;
use hyperplanar_core::{Error, Network, Tolerances};

#[derive(Parser)]
#[command(name = "hyperplanar", version, about = "Localize sensor networks with hyperplanar groupings")]
struct Cli {
    /// Distance tolerance (default 1e-9).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Degeneracy threshold on normalized squared volumes (default 1e-12).
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Per-run timeout in seconds for experiment and bench (default 60).
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Multiplicative Gaussian range noise for generated instances.
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Worker threads for experiment.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network instance from a building config or scenario.
    Generate {
        /// Building config or scenario JSON; the flagship building if omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Localize a network instance and print its formation.
    Localize {
        #[arg(long, value_enum, default_value_t = AlgoArg::Group)]
        algorithm: AlgoArg,
        #[arg(long)]
        input: PathBuf,
        /// Seed group rank for group localization (0 = largest group).
        #[arg(long)]
        seed_rank: Option<usize>,
    },
    /// Look for an induced claw and net and a unit interval Hamiltonian path.
    CheckGraph {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to the nodes of this line group.
        #[arg(long)]
        group: Option<usize>,
    },
    /// Build the hardness gadget of a 3-uniform hypergraph and compare its
    /// groupability with 2-colourability by brute force.
    VerifyHardness {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        lift_3d: bool,
    },
    /// Run both localizers on scenarios and score them against ground truth.
    Experiment {
        /// Preset names: flagship, dense, random-cloud.
        #[arg(long = "scenario", value_name = "NAME")]
        scenarios: Vec<String>,
        /// JSON list of scenarios.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Wall-time sweep over a building family of increasing size.
    Bench {
        /// Bench config JSON (sizes, floors, algorithms, seed).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Quad,
    Group,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure split by exit code.
enum Failure {
    Domain(Error),
    Usage(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Io(_) | Error::Json(_) | Error::InvalidInput(_) | Error::InvalidConfig(_) => {
                Failure::Usage(e.code().to_string(), e.to_string())
            }
            _ => Failure::Domain(e),
        }
    }
}

fn usage(code: &str, message: impl Into<String>) -> Failure {
    Failure::Usage(code.into(), message.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage("io", format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage("json", format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    Network::from_json(&read(path)?).map_err(Failure::from)
}

fn tolerances(cli: &Cli) -> Tolerances<f64> {
    let mut tol = Tolerances::default();
    if let Some(eps) = cli.eps {
        tol.eps = eps;
    }
    if let Some(tau) = cli.tau {
        tol.tau = tau;
    }
    tol
}

fn run_options(cli: &Cli) -> RunOptions {
    let mut opts = RunOptions {
        tol: tolerances(cli),
        ..RunOptions::default()
    };
    if let Some(t) = cli.timeout {
        opts.timeout = Duration::from_secs_f64(t);
    }
    opts
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn generate(cli: &Cli, config: Option<&Path>, seed: Option<u64>) -> Result<String, Failure> {
    let mut scenario = match config {
        None => Scenario::flagship(),
        Some(p) => {
            let v: Value = parse_json(p)?;
            if v.get("kind").is_some() {
                serde_json::from_value(v).map_err(|e| usage("json", e.to_string()))?
            } else {
                let config: BuildingConfig = serde_json::from_value(v).map_err(|e| usage("json", e.to_string()))?;
                Scenario::Building {
                    name: "custom".into(),
                    config,
                }
            }
        }
    };
    match &mut scenario {
        Scenario::Building { config, .. } => {
            if let Some(s) = seed {
                config.rng_seed = s;
            }
            if let Some(sigma) = cli.noise {
                config.noise_sigma = sigma;
            }
        }
        Scenario::RandomCloud { seed: s, .. } => {
            if let Some(v) = seed {
                *s = v;
            }
            if cli.noise.is_some_and(|n| n > 0.0) {
                return Err(usage("invalid-config", "noise applies to building scenarios only"));
            }
        }
    }
    Ok(scenario.generate()?.to_json()? + "\n")
}

fn group_report(level: &str, loc: &GroupLocalization<f64>) -> Vec<Value> {
    loc.groups
        .iter()
        .map(|g| {
            json!({
                "level": level,
                "group": g.group,
                "status": g.status,
                "seed": g.seed,
                "supports": g.support_vertices,
                "plane": g.plane,
            })
        })
        .collect()
}

fn localize(cli: &Cli, algorithm: AlgoArg, input: &Path, seed_rank: Option<usize>) -> Result<String, Failure> {
    let inst = load_network(input)?;
    let truth = inst.has_ground_truth().then(|| inst.truth_formation(3));
    let blind = inst.strip_ground_truth();
    let tol = tolerances(cli);
    let (formation, mut out) = match algorithm {
        AlgoArg::Quad => {
            let trace = quadrilaterate(&blind, &tol)?;
            let out = json!({
                "algorithm": "quad",
                "localized_count": trace.localized_count,
                "trace": trace.entries,
            });
            (trace.formation, out)
        }
        AlgoArg::Group => {
            let opts = GroupOptions {
                tol,
                seed: seed_rank.map_or(SeedRule::Largest, SeedRule::Nth),
                ..GroupOptions::default()
            };
            let res = hierarchical_localize(&blind, &opts)?;
            let mut groups = Vec::new();
            for loc in res.floor_placements.values() {
                groups.extend(group_report("collinear", loc));
            }
            groups.extend(group_report("coplanar", &res.building));
            let out = json!({
                "algorithm": "group",
                "localized_count": res.formation.localized_count(),
                "groups": groups,
            });
            (res.formation, out)
        }
    };
    out["n"] = json!(inst.len());
    out["formation"] = formation.to_json_value();
    if let Some(truth) = truth {
        if let Ok(a) = align_isometry(&formation, &truth) {
            out["rmse"] = json!(a.rmse);
        }
    }
    Ok(json_text(&out))
}

fn check_graph(input: &Path, group: Option<usize>) -> Result<String, Failure> {
    let inst = load_network(input)?;
    let members: Vec<usize> = match group {
        None => inst.nodes.iter().map(|n| n.id).collect(),
        Some(g) => inst
            .nodes
            .iter()
            .filter(|n| inst.group_of(n.id, GroupLevel::Collinear) == Some(g))
            .map(|n| n.id)
            .collect(),
    };
    if members.is_empty() {
        return Err(usage("invalid-input", "no nodes selected"));
    }
    let g = Graph::induced(&inst.adjacency(), &members);
    let out = json!({
        "claw": find_claw(&g),
        "net": find_net(&g),
        "hamiltonian_path": unit_interval_order(&g).ok().map(|o| o.sequence),
    });
    Ok(json_text(&out))
}

fn verify_hardness(path: &Path, lift: bool) -> Result<String, Failure> {
    let h: Hypergraph3U = read(path)?
        .parse()
        .map_err(|e: Error| usage(e.code(), format!("{}: {e}", path.display())))?;
    Ok(json_text(&verify_equivalence(&h, lift)?))
}

fn records_out(rows: &[RunRecord], reports: Value, format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => json_text(&reports),
    }
}

fn experiment(cli: &Cli, names: &[String], config: Option<&Path>, format: Format) -> Result<String, Failure> {
    let mut scenarios: Vec<Scenario> = match config {
        Some(p) => parse_json(p)?,
        None => Vec::new(),
    };
    for name in names {
        scenarios.push(Scenario::preset(name).ok_or_else(|| usage("invalid-input", format!("unknown scenario {name}")))?);
    }
    if scenarios.is_empty() {
        scenarios = vec![Scenario::flagship(), Scenario::dense(), Scenario::random_cloud()];
    }
    if let Some(sigma) = cli.noise {
        for s in &mut scenarios {
            if let Scenario::Building { config, .. } = s {
                config.noise_sigma = sigma;
            }
        }
    }
    let mut reports = Vec::new();
    for r in run_experiments(&scenarios, &run_options(cli), cli.jobs) {
        reports.push(r?);
    }
    let rows: Vec<RunRecord> = reports.iter().flat_map(|r| r.runs.clone()).collect();
    Ok(records_out(&rows, json!(reports), format))
}

fn bench(cli: &Cli, config: Option<&Path>, sizes: Option<Vec<usize>>, format: Format) -> Result<String, Failure> {
    let mut cfg: BenchConfig = match config {
        Some(p) => parse_json(p)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = sizes {
        cfg.sizes = s;
    }
    let rows = bench_scaling(&cfg, &run_options(cli))?;
    Ok(records_out(&rows, json!(rows), format))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Generate { config, seed } => generate(cli, config.as_deref(), *seed),
        Command::Localize {
            algorithm,
            input,
            seed_rank,
        } => localize(cli, *algorithm, input, *seed_rank),
        Command::CheckGraph { input, group } => check_graph(input, *group),
        Command::VerifyHardness { hypergraph, lift_3d } => verify_hardness(hypergraph, *lift_3d),
        Command::Experiment {
            scenarios,
            config,
            format,
        } => experiment(cli, scenarios, config.as_deref(), *format),
        Command::Bench { config, sizes, format } => bench(cli, config.as_deref(), sizes.clone(), *format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| usage("io", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({"error": e.code(), "message": e.to_string()}));
            ExitCode::from(1)
        }
        Err(Failure::Usage(code, message)) => {
            eprintln!("{}", json!({"error": code, "message": message}));
            ExitCode::from(2)
        }
    }
}
