//! Default-cascade stress test and logistic fit of the default fraction.
//!
//! A cascade starts with one bank failing. In each synchronous round every
//! surviving bank `j` loses `θ Σ_{n ∈ F_t} x_jn`, where `F_t` holds the banks
//! that failed in the previous round only, and fails once its capital is at
//! or below zero. Each failure is therefore charged exactly once; the capital
//! vector carries the accumulated damage. The cascade ends after a round with
//! no new failure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ExposureMatrix;

/// Initial capital per bank used by the stress experiments.
pub const DEFAULT_CAPITAL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    #[default]
    MeanOverOrigins,
    PerOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressConfig {
    /// `c_i(0)` for every bank.
    pub initial_capital: Vec<f64>,
    /// Loss given default `θ ∈ [0, 1]`.
    pub theta: f64,
    pub aggregate: Aggregate,
}

impl StressConfig {
    pub fn new(initial_capital: Vec<f64>, theta: f64, aggregate: Aggregate) -> Result<Self> {
        let cfg = Self { initial_capital, theta, aggregate };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same capital for all `n` banks.
    pub fn homogeneous(n: usize, capital: f64, theta: f64) -> Result<Self> {
        Self::new(vec![capital; n], theta, Aggregate::MeanOverOrigins)
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.initial_capital.clone(), theta, self.aggregate)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Domain { name: "theta", value: self.theta, domain: "[0, 1]".into() });
        }
        if let Some(&c) = self.initial_capital.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Domain { name: "capital", value: c, domain: "(0, inf)".into() });
        }
        Ok(())
    }

    fn check_dim(&self, x: &ExposureMatrix) -> Result<()> {
        if self.initial_capital.len() != x.n() {
            return Err(Error::Dimension { expected: x.n(), actual: self.initial_capital.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    pub origin: usize,
    /// Failed banks in ascending order, the origin included.
    pub failed: Vec<usize>,
    /// Rounds that produced at least one new failure.
    pub rounds: usize,
    /// Default fraction `ξ = |F| / N`.
    pub fraction: f64,
    /// Capital after the cascade. Failed banks keep the value at which they
    /// failed; the origin keeps its initial capital.
    pub capital: Vec<f64>,
}

/// Runs the cascade triggered by the failure of `origin`.
pub fn cascade(x: &ExposureMatrix, cfg: &StressConfig, origin: usize) -> Result<CascadeOutcome> {
    cfg.validate()?;
    cfg.check_dim(x)?;
    let n = x.n();
    if origin >= n {
        return Err(Error::Domain { name: "origin", value: origin as f64, domain: format!("[0, {n})") });
    }
    Ok(run_cascade(x, &cfg.initial_capital, cfg.theta, origin))
}

fn run_cascade(x: &ExposureMatrix, capital0: &[f64], theta: f64, origin: usize) -> CascadeOutcome {
    let n = x.n();
    let mut capital = capital0.to_vec();
    let mut failed = vec![false; n];
    failed[origin] = true;
    let mut newly = vec![origin];
    let mut next = Vec::new();
    let mut rounds = 0;
    loop {
        next.clear();
        for j in 0..n {
            if failed[j] {
                continue;
            }
            let row = x.row(j);
            let loss: f64 = newly.iter().map(|&k| row[k]).sum();
            capital[j] -= theta * loss;
            if capital[j] <= 0.0 {
                next.push(j);
            }
        }
        if next.is_empty() {
            break;
        }
        for &j in &next {
            failed[j] = true;
        }
        rounds += 1;
        std::mem::swap(&mut newly, &mut next);
    }
    let failed: Vec<usize> = (0..n).filter(|&i| failed[i]).collect();
    CascadeOutcome { origin, fraction: failed.len() as f64 / n as f64, failed, rounds, capital }
}

/// Default fraction of every single-bank shock, indexed by origin.
pub fn origin_fractions(x: &ExposureMatrix, cfg: &StressConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    cfg.check_dim(x)?;
    Ok((0..x.n())
        .into_par_iter()
        .map(|o| run_cascade(x, &cfg.initial_capital, cfg.theta, o).fraction)
        .collect())
}

/// Mean default fraction over all `N` single-bank shocks.
///
/// Always aggregates by the mean; see [`stress`] for the per-origin view.
pub fn default_fraction(x: &ExposureMatrix, cfg: &StressConfig) -> Result<f64> {
    let f = origin_fractions(x, cfg)?;
    Ok(f.iter().sum::<f64>() / f.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum StressResult {
    Mean(f64),
    PerOrigin(Vec<CascadeOutcome>),
}

/// Stress test aggregated according to `cfg.aggregate`.
pub fn stress(x: &ExposureMatrix, cfg: &StressConfig) -> Result<StressResult> {
    match cfg.aggregate {
        Aggregate::MeanOverOrigins => default_fraction(x, cfg).map(StressResult::Mean),
        Aggregate::PerOrigin => {
            cfg.validate()?;
            cfg.check_dim(x)?;
            Ok(StressResult::PerOrigin(
                (0..x.n())
                    .into_par_iter()
                    .map(|o| run_cascade(x, &cfg.initial_capital, cfg.theta, o))
                    .collect(),
            ))
        }
    }
}

/// Logistic growth curve `ξ(θ) = 1 / (1 + exp(−β (θ − θ*)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    /// Midpoint `θ*`.
    pub theta_star: f64,
    /// Growth rate `β`.
    pub beta: f64,
    /// Root mean square of the fit residuals.
    pub residual: f64,
}

impl LogisticFit {
    pub fn eval(&self, theta: f64) -> f64 {
        logistic(theta, self.theta_star, self.beta)
    }
}

#[inline]
fn logistic(t: f64, mid: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-beta * (t - mid)).exp())
}

const FIT_GRADIENT_TOL: f64 = 1e-9;
const FIT_MAX_STEPS: usize = 200;

/// Least-squares fit of the logistic curve by Gauss-Newton with step halving.
///
/// Starts from `θ*` at the sample closest to `ξ = 0.5` and `β = 4 s`, where
/// `s` is the steepest finite-difference slope of the data (the logistic
/// slope at its midpoint is `β/4`).
pub fn fit_logistic(thetas: &[f64], xis: &[f64]) -> Result<LogisticFit> {
    if thetas.len() != xis.len() {
        return Err(Error::Dimension { expected: thetas.len(), actual: xis.len() });
    }
    if thetas.len() < 5 {
        return Err(Error::DegenerateFit(format!("{} points, need at least 5", thetas.len())));
    }
    if thetas.iter().chain(xis).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite data".into()));
    }
    let mut pts: Vec<(f64, f64)> = thetas.iter().copied().zip(xis.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if hi - lo <= 1e-12 {
        return Err(Error::DegenerateFit("all default fractions are equal".into()));
    }

    let mid0 = pts
        .iter()
        .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()))
        .map(|p| p.0)
        .unwrap();
    let slope = pts
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if slope == 0.0 {
        return Err(Error::DegenerateFit("no increase between samples".into()));
    }

    let sse = |mid: f64, beta: f64| -> f64 {
        pts.iter().map(|&(t, y)| (logistic(t, mid, beta) - y).powi(2)).sum()
    };
    let (mut mid, mut beta) = (mid0, 4.0 * slope);
    let mut cost = sse(mid, beta);
    for _ in 0..FIT_MAX_STEPS {
        // normal equations of the 2-parameter problem
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, y) in &pts {
            let f = logistic(t, mid, beta);
            let d = f * (1.0 - f);
            let j1 = -beta * d;
            let j2 = (t - mid) * d;
            let r = f - y;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        if g1.hypot(g2) <= FIT_GRADIENT_TOL {
            break;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 0.0 && det.is_finite()) {
            break;
        }
        let d_mid = -(a22 * g1 - a12 * g2) / det;
        let d_beta = -(a11 * g2 - a12 * g1) / det;
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let (m, b) = (mid + step * d_mid, beta + step * d_beta);
            let c = sse(m, b);
            if c.is_finite() && c < cost {
                mid = m;
                beta = b;
                cost = c;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if !(mid.is_finite() && beta.is_finite()) || beta <= 0.0 {
        return Err(Error::DegenerateFit(format!("fit diverged (theta* = {mid}, beta = {beta})")));
    }
    Ok(LogisticFit { theta_star: mid, beta, residual: (cost / pts.len() as f64).sqrt() })
}
