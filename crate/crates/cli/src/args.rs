use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use interbank::experiment::{linspace, Arm, KappaGrid};
use interbank::Method;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "interbank", version, about = "Interbank exposure reconstruction and contagion experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a ground-truth exposure network and save it as CSV.
    Generate(GenerateArgs),
    /// Reconstruct an exposure matrix from a balance-sheet CSV.
    Reconstruct(ReconstructArgs),
    /// Run the default cascade over a loss-rate grid on one exposure matrix.
    Stress(StressArgs),
    /// Constraint deviation of SRAS on random supports over a (N, κ) grid.
    SweepFeasibility(FeasibilityArgs),
    /// Default fractions of true, ME and SME networks over a (κ, θ) grid.
    SweepContagion(ContagionArgs),
    /// Fit logistic curves to a contagion sweep CSV.
    Fit(FitArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

/// Output directory and overwrite guard, shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    #[serde(skip, default = "default_out")]
    pub out: PathBuf,
    /// Overwrite outputs even when the directory holds a manifest for a
    /// different configuration.
    #[arg(long)]
    #[serde(skip)]
    pub force: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub kappa: f64,
    /// Total interbank volume Λ (default N).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// RNG seed; drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub stream_id: u64,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReconstructArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// Balance-sheet CSV with header `bank,assets,liabilities`.
    #[arg(long)]
    pub balance: PathBuf,
    /// Adjacency CSV for SRAS. Without it a random support with connectivity
    /// `--kappa` is drawn from `--seed`.
    #[arg(long)]
    pub support: Option<PathBuf>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1e-7)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StressArgs {
    /// Exposure matrix CSV.
    #[arg(long)]
    pub exposures: PathBuf,
    /// Loss-rate grid `min:max:steps`.
    #[arg(long, default_value = "0:1:100")]
    pub theta_grid: String,
    #[arg(long, default_value_t = 0.01)]
    pub capital: f64,
    /// Label written in the `method` column.
    #[arg(long, default_value = "TRUE", value_parser = parse_arm)]
    pub method: Arm,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FeasibilityArgs {
    /// Network sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "25,50")]
    pub n: Vec<usize>,
    /// Connectivity grid `min:max:steps`; empty bounds mean 1/N and 1-1/N.
    #[arg(long, default_value = "::100")]
    pub kappa_grid: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.005)]
    pub epsilon_star: f64,
    /// Largest tolerated fraction of trials whose solver errored.
    #[arg(long, default_value_t = 0.0)]
    pub failure_budget: f64,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContagionArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Connectivities, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    pub kappa: Vec<f64>,
    #[arg(long, default_value = "0:1:100")]
    pub theta_grid: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Total interbank volume Λ (default N).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub capital: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
    /// Arms to evaluate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "TRUE,ME,SME", value_parser = parse_arm)]
    pub method: Vec<Arm>,
    /// Reconstruct SME on the true support instead of a fresh random one.
    #[arg(long)]
    pub use_true_support: bool,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Contagion CSV produced by `sweep-contagion`.
    #[arg(long)]
    pub input: PathBuf,
    /// Network size used to report β/N.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(skip, default = "OutArgs::none")]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory (default: the manifest's directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

impl OutArgs {
    fn none() -> Self {
        Self { out: default_out(), force: false }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: interbank::Error| e.to_string())
}

fn parse_arm(s: &str) -> Result<Arm, String> {
    s.parse().map_err(|e: interbank::Error| e.to_string())
}

/// Parses `min:max:steps`. Empty bounds are returned as `None`.
pub fn parse_grid(s: &str) -> Result<(Option<f64>, Option<f64>, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("grid {s:?} is not min:max:steps"));
    };
    let bound = |v: &str| -> Result<Option<f64>, String> {
        if v.trim().is_empty() {
            Ok(None)
        } else {
            v.trim().parse().map(Some).map_err(|_| format!("bad grid bound {v:?}"))
        }
    };
    let steps: usize = steps.trim().parse().map_err(|_| format!("bad grid step count {steps:?}"))?;
    if steps == 0 {
        return Err("grid needs at least one step".into());
    }
    Ok((bound(lo)?, bound(hi)?, steps))
}

pub fn kappa_grid(s: &str) -> Result<KappaGrid, String> {
    let (min, max, steps) = parse_grid(s)?;
    Ok(KappaGrid { min, max, steps })
}

pub fn theta_grid(s: &str) -> Result<Vec<f64>, String> {
    let (lo, hi, steps) = parse_grid(s)?;
    let (lo, hi) = (lo.unwrap_or(0.0), hi.unwrap_or(1.0));
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(format!("theta grid must lie in [0, 1], got {lo}:{hi}"));
    }
    Ok(linspace(lo, hi, steps))
}
