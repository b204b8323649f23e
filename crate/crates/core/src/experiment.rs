//! Monte Carlo sweeps behind the command-line harness.
//!
//! Every trial draws from its own [`RngStream`] whose id is derived from the
//! grid point and the trial index, so a record depends only on the seed and
//! its own key, and parallel execution gives the same numbers as a serial run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contagion::{default_fraction, fit_logistic, LogisticFit, StressConfig, DEFAULT_CAPITAL};
use crate::error::{Error, Result};
use crate::metrics::{adjacency_entropy, entropy_normalized};
use crate::netgen::{random_adjacency, random_balance_sheet, random_ground_truth, stream_id, RngStream};
use crate::reconstruct::{ras, sras, SolverConfig};
use crate::types::{ExposureMatrix, Termination};

/// Deviation predicted by the Gaussian law `ε(κ, N) = ½ exp(−(Nκ − 1)² / 8)`.
pub fn predicted_deviation(kappa: f64, n: usize) -> f64 {
    let z = n as f64 * kappa - 1.0;
    0.5 * (-z * z / 8.0).exp()
}

/// Critical connectivity `κ*(ε*, N) = (1 + sqrt(8 ln(1 / 2ε*))) / N`, where
/// the Gaussian law crosses `ε*`.
pub fn critical_connectivity(epsilon_star: f64, n: usize) -> Result<f64> {
    if !(epsilon_star > 0.0 && epsilon_star < 0.5) {
        return Err(Error::Domain { name: "epsilon_star", value: epsilon_star, domain: "(0, 0.5)".into() });
    }
    Ok((1.0 + (8.0 * (1.0 / (2.0 * epsilon_star)).ln()).sqrt()) / n as f64)
}

/// Connectivity grid. Missing bounds default to `1/N` and `1 − 1/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaGrid {
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Number of intervals `M`; the grid has `M + 1` points.
    pub steps: usize,
}

impl KappaGrid {
    pub fn full(steps: usize) -> Self {
        Self { min: None, max: None, steps }
    }

    pub fn bounds(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        (self.min.unwrap_or(1.0 / nf), self.max.unwrap_or(1.0 - 1.0 / nf))
    }

    /// Grid spacing `Δκ = (κ_max − κ_min) / M`.
    pub fn step(&self, n: usize) -> f64 {
        let (lo, hi) = self.bounds(n);
        (hi - lo) / self.steps as f64
    }

    pub fn points(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.bounds(n);
        (0..=self.steps).map(|k| lo + k as f64 * (hi - lo) / self.steps as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub n_values: Vec<usize>,
    pub kappa_grid: KappaGrid,
    pub trials: usize,
    pub delta: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Feasibility threshold `ε*`.
    pub epsilon_star: f64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            n_values: vec![25, 50],
            kappa_grid: KappaGrid::full(100),
            trials: 100,
            delta: 1e-7,
            max_iterations: SolverConfig::default().max_iterations,
            seed: 0,
            epsilon_star: 0.005,
        }
    }
}

impl SweepPlan {
    pub fn solver(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.delta, self.max_iterations)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver()?;
        if self.n_values.is_empty() {
            return Err(Error::Domain { name: "n_values", value: 0.0, domain: "non-empty".into() });
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::Domain { name: "n", value: n as f64, domain: ">= 2".into() });
        }
        if self.trials == 0 {
            return Err(Error::Domain { name: "trials", value: 0.0, domain: ">= 1".into() });
        }
        if self.kappa_grid.steps == 0 {
            return Err(Error::Domain { name: "steps", value: 0.0, domain: ">= 1".into() });
        }
        critical_connectivity(self.epsilon_star, 2)?;
        for &n in &self.n_values {
            let (lo, hi) = self.kappa_grid.bounds(n);
            let (kmin, kmax) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
            if lo < kmin - 1e-12 || hi > kmax + 1e-12 || lo > hi {
                return Err(Error::Domain {
                    name: "kappa",
                    value: if lo < kmin { lo } else { hi },
                    domain: format!("[{kmin}, {kmax}] for N = {n}"),
                });
            }
        }
        Ok(())
    }
}

/// Per grid point means of one feasibility sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub kappa: f64,
    pub mean_epsilon: f64,
    pub mean_sx: f64,
    pub sq: f64,
    pub predicted_epsilon: f64,
    /// `mean_epsilon < ε*`.
    pub feasible: bool,
    /// Trials whose solver returned an error.
    pub failures: usize,
    /// Trials that did not reach the step tolerance.
    pub non_converged: usize,
}

fn point_id(n: usize, index: usize) -> u64 {
    ((n as u64) << 20) | index as u64
}

struct FeasibilityTrial {
    epsilon: f64,
    sx: f64,
    converged: bool,
}

fn feasibility_trial(n: usize, kappa: f64, cfg: &SolverConfig, rng: &mut RngStream) -> Result<FeasibilityTrial> {
    let bs = random_balance_sheet(n, 1.0, rng)?;
    let q = random_adjacency(n, kappa, rng)?;
    let report = sras(&bs, &q, cfg)?;
    // mass is 1 after a column pass; renormalize to absorb rounding
    let x = &report.solution;
    let sx = entropy_normalized(&x.scaled(1.0 / x.total()))?;
    Ok(FeasibilityTrial { epsilon: report.deviation, sx, converged: report.termination == Termination::Converged })
}

/// Constraint deviation and solution entropy of SRAS on random supports, per
/// `(N, κ)` grid point, averaged over `plan.trials` trials.
pub fn sweep_feasibility(plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    plan.validate()?;
    let cfg = plan.solver()?;
    let mut records = Vec::new();
    for &n in &plan.n_values {
        for (pi, kappa) in plan.kappa_grid.points(n).into_iter().enumerate() {
            let point = point_id(n, pi);
            let trials: Vec<Result<FeasibilityTrial>> = (0..plan.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = RngStream::new(plan.seed, stream_id(point, t as u64));
                    feasibility_trial(n, kappa, &cfg, &mut rng)
                })
                .collect();
            let ok: Vec<&FeasibilityTrial> = trials.iter().filter_map(|t| t.as_ref().ok()).collect();
            let failures = trials.len() - ok.len();
            let mean = |f: fn(&FeasibilityTrial) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|t| f(t)).sum::<f64>() / ok.len() as f64
                }
            };
            let mean_epsilon = mean(|t| t.epsilon);
            records.push(SweepRecord {
                n,
                kappa,
                mean_epsilon,
                mean_sx: mean(|t| t.sx),
                sq: adjacency_entropy(kappa)?,
                predicted_epsilon: predicted_deviation(kappa, n),
                feasible: mean_epsilon < plan.epsilon_star,
                failures,
                non_converged: ok.iter().filter(|t| !t.converged).count(),
            });
        }
    }
    Ok(records)
}

/// First grid connectivity for `n` whose mean deviation is below `ε*`.
pub fn boundary_kappa(records: &[SweepRecord], n: usize, epsilon_star: f64) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.n == n)
        .filter(|r| r.mean_epsilon < epsilon_star)
        .map(|r| r.kappa)
        .min_by(f64::total_cmp)
}

/// Root mean square gap between measured and predicted deviation for `n`.
pub fn gaussian_law_rms(records: &[SweepRecord], n: usize) -> f64 {
    let gaps: Vec<f64> = records
        .iter()
        .filter(|r| r.n == n)
        .map(|r| r.mean_epsilon - r.predicted_epsilon)
        .collect();
    (gaps.iter().map(|g| g * g).sum::<f64>() / gaps.len() as f64).sqrt()
}

/// Which exposure matrix a contagion run stresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Arm {
    /// The generated ground-truth matrix.
    True,
    /// RAS reconstruction from its marginals (dense, zero diagonal).
    Me,
    /// SRAS reconstruction from its marginals on a support of the same
    /// connectivity.
    Sme,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::True, Arm::Me, Arm::Sme];

    pub fn as_str(&self) -> &'static str {
        match self {
            Arm::True => "TRUE",
            Arm::Me => "ME",
            Arm::Sme => "SME",
        }
    }
}

impl std::fmt::Display for Arm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TRUE" => Ok(Arm::True),
            "ME" => Ok(Arm::Me),
            "SME" => Ok(Arm::Sme),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContagionPlan {
    pub n: usize,
    pub kappas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Total interbank volume `Λ`.
    pub lambda: f64,
    pub capital: f64,
    pub delta: f64,
    pub max_iterations: usize,
    pub methods: Vec<Arm>,
    /// Reconstruct SME on the true support instead of a fresh random one.
    pub use_true_support: bool,
}

impl ContagionPlan {
    /// Plan with `Λ = N`, capital 0.01 and all three arms.
    pub fn new(n: usize, kappas: Vec<f64>, thetas: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            n,
            kappas,
            thetas,
            trials,
            seed,
            lambda: n as f64,
            capital: DEFAULT_CAPITAL,
            delta: 1e-7,
            max_iterations: SolverConfig::default().max_iterations,
            methods: Arm::ALL.to_vec(),
            use_true_support: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        SolverConfig::new(self.delta, self.max_iterations)?;
        if self.n < 2 {
            return Err(Error::Domain { name: "n", value: self.n as f64, domain: ">= 2".into() });
        }
        if self.trials == 0 || self.kappas.is_empty() || self.thetas.is_empty() || self.methods.is_empty() {
            return Err(Error::Domain { name: "plan", value: 0.0, domain: "non-empty grids and trials".into() });
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain { name: "lambda", value: self.lambda, domain: "(0, inf)".into() });
        }
        StressConfig::homogeneous(self.n, self.capital, 0.0)?;
        for &t in &self.thetas {
            StressConfig::homogeneous(self.n, self.capital, t)?;
        }
        let (lo, hi) = (1.0 / self.n as f64, 1.0 - 1.0 / self.n as f64);
        if let Some(&k) = self.kappas.iter().find(|&&k| !(k >= lo - 1e-12 && k <= hi + 1e-12)) {
            return Err(Error::Domain { name: "kappa", value: k, domain: format!("[{lo}, {hi}]") });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContagionRecord {
    pub theta: f64,
    pub kappa: f64,
    pub method: Arm,
    /// Mean over trials of the mean-over-origins default fraction.
    pub xi_mean: f64,
    /// Smallest per-trial default fraction.
    pub xi_min: f64,
    /// Largest per-trial default fraction.
    pub xi_max: f64,
    pub n: usize,
    pub trials: usize,
    /// Trials whose reconstruction did not reach the step tolerance.
    pub non_converged: usize,
}

struct ContagionTrial {
    /// `xi[arm][theta]`
    xi: Vec<Vec<f64>>,
    converged: Vec<bool>,
}

fn contagion_trial(plan: &ContagionPlan, kappa: f64, cfg: &SolverConfig, rng: &mut RngStream) -> Result<ContagionTrial> {
    let gt = random_ground_truth(plan.n, kappa, plan.lambda, rng)?;
    let norm = gt.balance.normalized();
    let mut matrices: Vec<(ExposureMatrix, bool)> = Vec::with_capacity(plan.methods.len());
    for arm in &plan.methods {
        let entry = match arm {
            Arm::True => (gt.exposures.clone(), true),
            Arm::Me => {
                let r = ras(&norm, cfg)?;
                (r.solution.scaled(plan.lambda), r.converged())
            }
            Arm::Sme => {
                let q = if plan.use_true_support {
                    gt.adjacency.clone()
                } else {
                    random_adjacency(plan.n, kappa, rng)?
                };
                let r = sras(&norm, &q, cfg)?;
                (r.solution.scaled(plan.lambda), r.converged())
            }
        };
        matrices.push(entry);
    }
    let base = StressConfig::homogeneous(plan.n, plan.capital, 0.0)?;
    let xi = matrices
        .iter()
        .map(|(x, _)| {
            plan.thetas
                .iter()
                .map(|&t| default_fraction(x, &base.with_theta(t)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContagionTrial { xi, converged: matrices.iter().map(|m| m.1).collect() })
}

/// Default fraction of true and reconstructed networks over a `(κ, θ)` grid.
/// Records are sorted by `(κ, θ, method)`.
pub fn sweep_contagion(plan: &ContagionPlan) -> Result<Vec<ContagionRecord>> {
    plan.validate()?;
    let cfg = SolverConfig::new(plan.delta, plan.max_iterations)?;
    let mut records = Vec::new();
    for (ki, &kappa) in plan.kappas.iter().enumerate() {
        let point = point_id(plan.n, ki);
        let trials = (0..plan.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(plan.seed, stream_id(point, t as u64));
                contagion_trial(plan, kappa, &cfg, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        for (ai, &arm) in plan.methods.iter().enumerate() {
            let non_converged = trials.iter().filter(|t| !t.converged[ai]).count();
            for (ti, &theta) in plan.thetas.iter().enumerate() {
                let v: Vec<f64> = trials.iter().map(|t| t.xi[ai][ti]).collect();
                records.push(ContagionRecord {
                    theta,
                    kappa,
                    method: arm,
                    xi_mean: v.iter().sum::<f64>() / v.len() as f64,
                    xi_min: v.iter().copied().fold(f64::INFINITY, f64::min),
                    xi_max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    n: plan.n,
                    trials: plan.trials,
                    non_converged,
                });
            }
        }
    }
    records.sort_by(|a, b| {
        a.kappa.total_cmp(&b.kappa).then(a.theta.total_cmp(&b.theta)).then(a.method.cmp(&b.method))
    });
    Ok(records)
}

/// Logistic fit of one `(κ, method)` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub kappa: f64,
    pub method: Arm,
    pub theta_star: f64,
    pub beta: f64,
    pub residual: f64,
    /// `β / N`; absent when the series does not record `N`.
    pub beta_per_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSeries {
    pub kappa: f64,
    pub method: Arm,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepFits {
    pub fits: Vec<SeriesFit>,
    pub skipped: Vec<SkippedSeries>,
}

impl SweepFits {
    pub fn get(&self, kappa: f64, method: Arm) -> Option<&SeriesFit> {
        self.fits.iter().find(|f| f.method == method && (f.kappa - kappa).abs() < 1e-12)
    }
}

/// Fits the logistic curve to every `(κ, method)` series of `xi_mean`
/// against `θ`. Degenerate series are listed in `skipped`.
pub fn fit_sweep(records: &[ContagionRecord], n: Option<usize>) -> SweepFits {
    let mut keys: Vec<(f64, Arm)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(k, m)| k.total_cmp(&r.kappa).is_eq() && m == r.method) {
            keys.push((r.kappa, r.method));
        }
    }
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = SweepFits::default();
    for (kappa, method) in keys {
        let series: Vec<&ContagionRecord> =
            records.iter().filter(|r| r.method == method && r.kappa.total_cmp(&kappa).is_eq()).collect();
        let thetas: Vec<f64> = series.iter().map(|r| r.theta).collect();
        let xis: Vec<f64> = series.iter().map(|r| r.xi_mean).collect();
        let n = n.or_else(|| series.first().map(|r| r.n).filter(|&n| n > 0));
        match fit_logistic(&thetas, &xis) {
            Ok(LogisticFit { theta_star, beta, residual }) => out.fits.push(SeriesFit {
                kappa,
                method,
                theta_star,
                beta,
                residual,
                beta_per_n: n.map(|n| beta / n as f64),
            }),
            Err(e) => out.skipped.push(SkippedSeries { kappa, method, reason: e.to_string() }),
        }
    }
    out
}

/// Ordinary least squares `y ≈ slope · x + intercept`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit("need two points for a line".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all x values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Evenly spaced grid `lo, lo + (hi−lo)/steps, …, hi`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect()
}
