use std::fs::File;
use std::path::Path;

use interbank::contagion::{origin_fractions, StressConfig};
use interbank::experiment::{
    boundary_kappa, critical_connectivity, fit_sweep, sweep_contagion, sweep_feasibility, Arm, ContagionPlan,
    ContagionRecord, SweepPlan,
};
use interbank::io;
use interbank::metrics::connectivity;
use interbank::netgen::{random_adjacency, random_ground_truth, RngStream};
use interbank::reconstruct::{reconstruct, SolverConfig};
use interbank::Method;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{
    kappa_grid, theta_grid, ContagionArgs, FeasibilityArgs, FitArgs, GenerateArgs, OutArgs, ReconstructArgs,
    ReplayArgs, StressArgs,
};
use crate::error::{at, CliError};
use crate::manifest::{Manifest, OutputDir};

type Result<T> = std::result::Result<T, CliError>;

fn resolve_seed(seed: &mut Option<u64>) -> u64 {
    *seed.get_or_insert_with(rand::random)
}

fn config<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn open_out(subcommand: &str, cfg: Value, seed: Option<u64>, out: &OutArgs) -> Result<OutputDir> {
    OutputDir::prepare(&out.out, Manifest::new(subcommand, cfg, seed), out.force)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("value serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn generate(mut args: GenerateArgs) -> Result<Manifest> {
    let seed = resolve_seed(&mut args.seed);
    let lambda = *args.lambda.get_or_insert(args.n as f64);
    let gt = random_ground_truth(args.n, args.kappa, lambda, &mut RngStream::new(seed, args.stream_id))?;
    let mut dir = open_out("generate", config(&args), Some(seed), &args.out)?;
    let p = dir.file("exposures.csv");
    io::save_exposures(&gt.exposures, &p).map_err(at(&p))?;
    let p = dir.file("adjacency.csv");
    io::save_adjacency(&gt.adjacency, &p).map_err(at(&p))?;
    let p = dir.file("balance.csv");
    io::save_balance(&gt.balance, &p).map_err(at(&p))?;
    let p = dir.file("network.json");
    write_json(&p, &json!({"n": args.n, "kappa": args.kappa, "lambda": lambda, "seed": seed, "stream_id": args.stream_id}))?;
    dir.finish()
}

pub fn reconstruct_cmd(mut args: ReconstructArgs) -> Result<Manifest> {
    let cfg = SolverConfig::new(args.delta, args.max_iterations)?;
    let needs_draw = args.method == Method::Sras && args.support.is_none();
    if needs_draw && args.kappa.is_none() {
        return Err(CliError::Config("sras needs --support or --kappa".into()));
    }
    let seed = needs_draw.then(|| resolve_seed(&mut args.seed));
    let mut dir = open_out("reconstruct", config(&args), seed, &args.out)?;
    let bs = io::load_balance(&args.balance).map_err(at(&args.balance))?;
    let support = match (&args.support, args.method) {
        (Some(path), Method::Sras) => Some(io::load_adjacency(path).map_err(at(path))?),
        (None, Method::Sras) => {
            let q = random_adjacency(bs.n(), args.kappa.unwrap_or_default(), &mut RngStream::new(seed.unwrap_or(0), 0))?;
            let p = dir.file("support.csv");
            io::save_adjacency(&q, &p).map_err(at(&p))?;
            Some(q)
        }
        _ => None,
    };
    // solve on unit mass so δ means the same at every scale
    let mut report = reconstruct(args.method, &bs.normalized(), support.as_ref(), &cfg)?;
    report.solution = report.solution.scaled(bs.total());
    let p = dir.file("solution.csv");
    io::save_exposures(&report.solution, &p).map_err(at(&p))?;
    let p = dir.file("report.json");
    write_json(
        &p,
        &json!({
            "method": report.method,
            "n": bs.n(),
            "delta": report.delta,
            "iterations": report.iterations,
            "eta": report.final_step,
            "epsilon": report.deviation,
            "converged": report.converged(),
            "termination": report.termination,
            "work": report.work,
            "solution": "solution.csv",
        }),
    )?;
    dir.finish()
}

/// One row of a stress or contagion CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiRow {
    pub theta: f64,
    pub kappa: f64,
    pub method: Arm,
    pub xi_mean: f64,
    pub xi_min: f64,
    pub xi_max: f64,
}

impl From<&ContagionRecord> for XiRow {
    fn from(r: &ContagionRecord) -> Self {
        Self { theta: r.theta, kappa: r.kappa, method: r.method, xi_mean: r.xi_mean, xi_min: r.xi_min, xi_max: r.xi_max }
    }
}

pub fn stress(args: StressArgs) -> Result<Manifest> {
    let thetas = theta_grid(&args.theta_grid).map_err(CliError::Config)?;
    let mut dir = open_out("stress", config(&args), None, &args.out)?;
    let x = io::load_exposures(&args.exposures).map_err(at(&args.exposures))?;
    let kappa = connectivity(&x.support());
    let base = StressConfig::homogeneous(x.n(), args.capital, 0.0)?;
    let mut rows = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let xi = origin_fractions(&x, &base.with_theta(theta)?)?;
        rows.push(XiRow {
            theta,
            kappa,
            method: args.method,
            xi_mean: xi.iter().sum::<f64>() / xi.len() as f64,
            xi_min: xi.iter().copied().fold(f64::INFINITY, f64::min),
            xi_max: xi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let p = dir.file("stress.csv");
    write_rows(&p, &rows)?;
    dir.finish()
}

#[derive(Serialize)]
struct Boundary {
    n: usize,
    epsilon_star: f64,
    kappa_star: f64,
    first_feasible_kappa: Option<f64>,
    grid_step: f64,
    within_one_step: bool,
}

pub fn sweep_feasibility_cmd(mut args: FeasibilityArgs) -> Result<Manifest> {
    let seed = resolve_seed(&mut args.seed);
    let plan = SweepPlan {
        n_values: args.n.clone(),
        kappa_grid: kappa_grid(&args.kappa_grid).map_err(CliError::Config)?,
        trials: args.trials,
        delta: args.delta,
        max_iterations: args.max_iterations,
        seed,
        epsilon_star: args.epsilon_star,
    };
    plan.validate()?;
    if !(0.0..=1.0).contains(&args.failure_budget) {
        return Err(CliError::Config(format!("failure budget {} is not in [0, 1]", args.failure_budget)));
    }
    let mut dir = open_out("sweep-feasibility", config(&args), Some(seed), &args.out)?;
    let records = sweep_feasibility(&plan)?;
    let p = dir.file("feasibility.csv");
    write_rows(&p, &records)?;
    let boundary = plan
        .n_values
        .iter()
        .map(|&n| {
            let kappa_star = critical_connectivity(plan.epsilon_star, n)?;
            let first = boundary_kappa(&records, n, plan.epsilon_star);
            let step = plan.kappa_grid.step(n);
            Ok(Boundary {
                n,
                epsilon_star: plan.epsilon_star,
                kappa_star,
                first_feasible_kappa: first,
                grid_step: step,
                within_one_step: first.is_some_and(|k| (k - kappa_star).abs() <= step),
            })
        })
        .collect::<std::result::Result<Vec<_>, interbank::Error>>()?;
    let p = dir.file("boundary.json");
    write_json(&p, &boundary)?;
    let failures: usize = records.iter().map(|r| r.failures).sum();
    let total = records.len() * plan.trials;
    let manifest = dir.finish()?;
    if failures as f64 > args.failure_budget * total as f64 {
        return Err(CliError::Budget(format!("{failures} of {total} trials failed")));
    }
    Ok(manifest)
}

#[derive(Serialize)]
struct SolverStatus {
    kappa: f64,
    method: Arm,
    trials: usize,
    non_converged: usize,
}

pub fn sweep_contagion_cmd(mut args: ContagionArgs) -> Result<Manifest> {
    let seed = resolve_seed(&mut args.seed);
    let lambda = *args.lambda.get_or_insert(args.n as f64);
    let mut plan = ContagionPlan::new(
        args.n,
        args.kappa.clone(),
        theta_grid(&args.theta_grid).map_err(CliError::Config)?,
        args.trials,
        seed,
    );
    plan.lambda = lambda;
    plan.capital = args.capital;
    plan.delta = args.delta;
    plan.max_iterations = args.max_iterations;
    plan.methods = args.method.clone();
    plan.methods.sort();
    plan.methods.dedup();
    plan.use_true_support = args.use_true_support;
    plan.validate()?;
    let mut dir = open_out("sweep-contagion", config(&args), Some(seed), &args.out)?;
    let records = sweep_contagion(&plan)?;
    let p = dir.file("contagion.csv");
    write_rows(&p, &records.iter().map(XiRow::from).collect::<Vec<_>>())?;
    let mut status: Vec<SolverStatus> = Vec::new();
    for r in &records {
        if !status.iter().any(|s| s.kappa == r.kappa && s.method == r.method) {
            status.push(SolverStatus { kappa: r.kappa, method: r.method, trials: r.trials, non_converged: r.non_converged });
        }
    }
    let p = dir.file("solver_status.csv");
    write_rows(&p, &status)?;
    dir.finish()
}

pub fn read_xi_rows(path: &Path) -> Result<Vec<XiRow>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<std::result::Result<Vec<XiRow>, _>>()
        .map_err(|e| CliError::io(path, e))
}

pub fn fit(args: FitArgs) -> Result<Manifest> {
    let mut dir = open_out("fit", config(&args), None, &args.out)?;
    let rows = read_xi_rows(&args.input)?;
    let records: Vec<ContagionRecord> = rows
        .iter()
        .map(|r| ContagionRecord {
            theta: r.theta,
            kappa: r.kappa,
            method: r.method,
            xi_mean: r.xi_mean,
            xi_min: r.xi_min,
            xi_max: r.xi_max,
            n: 0,
            trials: 0,
            non_converged: 0,
        })
        .collect();
    let fits = fit_sweep(&records, args.n);
    for s in &fits.skipped {
        eprintln!("skipped kappa={} method={}: {}", s.kappa, s.method, s.reason);
    }
    let p = dir.file("fits.json");
    write_json(&p, &fits)?;
    dir.finish()
}

pub fn replay(args: ReplayArgs) -> Result<Manifest> {
    let m = Manifest::load(&args.manifest)?;
    let out = OutArgs {
        out: args.out.unwrap_or_else(|| args.manifest.parent().map(Path::to_path_buf).unwrap_or_default()),
        force: args.force,
    };
    fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
        serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("manifest config: {e}")))
    }
    match m.subcommand.as_str() {
        "generate" => generate(GenerateArgs { out, ..parse(&m.config)? }),
        "reconstruct" => reconstruct_cmd(ReconstructArgs { out, ..parse(&m.config)? }),
        "stress" => stress(StressArgs { out, ..parse(&m.config)? }),
        "sweep-feasibility" => sweep_feasibility_cmd(FeasibilityArgs { out, ..parse(&m.config)? }),
        "sweep-contagion" => sweep_contagion_cmd(ContagionArgs { out, ..parse(&m.config)? }),
        "fit" => fit(FitArgs { out, ..parse(&m.config)? }),
        other => Err(CliError::Config(format!("unknown subcommand {other:?} in manifest"))),
    }
}
