//! Seeded generators for supports, balance sheets and ground-truth networks.
//!
//! All randomness flows through [`RngStream`], a ChaCha8 generator keyed by a
//! 64-bit seed and selecting one of 2⁶⁴ independent streams. A `(seed,
//! stream_id)` pair reproduces the same sequence on every platform, so sweeps
//! give each trial its own stream and stay deterministic regardless of the
//! order in which trials execute.
//!
//! [`random_adjacency`] seeds the support with a random cyclic permutation
//! (every row and column gets exactly one off-diagonal entry) and then places
//! the remaining ones by uniform cell draws. A draw landing on an occupied or
//! diagonal cell walks forward through the flat index `m = jN + i`,
//! `m ← (m + 1) mod N²`, until it finds a free cell. This linear probing is
//! slightly biased towards cells that follow occupied runs; the effect is
//! negligible below about 90% of the maximum connectivity.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{AdjacencyMatrix, BalanceSheet, ExposureMatrix};

/// Slack used when checking connectivity bounds that were computed in floating
/// point, e.g. `1 − 1/N` reached by stepping along a grid.
const KAPPA_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform integer in `{0, …, m − 1}` (rejection sampling, no modulo bias).
    pub fn below(&mut self, m: usize) -> usize {
        self.rng.gen_range(0..m)
    }

    /// Uniform real in the open interval `(0, 1)`.
    pub fn open01(&mut self) -> f64 {
        self.rng.sample(Open01)
    }
}

/// Stream id for trial `trial` of grid point `point`.
pub fn stream_id(point: u64, trial: u64) -> u64 {
    (point << 32) | (trial & 0xffff_ffff)
}

/// A random cyclic permutation: `p_i ≠ i` for every `i`, and `p` is a single
/// `n`-cycle.
///
/// Fisher-Yates with the swap partner drawn from the strictly smaller range
/// `{0, …, i − 1}` (Sattolo's variant).
pub fn random_derangement(n: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::Domain { name: "n", value: n as f64, domain: ">= 2 (no derangement of one element)".into() });
    }
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i);
        p.swap(i, j);
    }
    Ok(p)
}

/// Number of ones placed for connectivity `κ`: `round(κ n²)` clamped to
/// `[n, n² − n]`.
pub fn one_count(n: usize, kappa: f64) -> usize {
    let n2 = n * n;
    ((kappa * n2 as f64).round() as usize).clamp(n, n2 - n)
}

/// Random support with exactly [`one_count`] ones, zero diagonal and every
/// row and column nonempty. Requires `1/n ≤ κ ≤ 1 − 1/n`.
pub fn random_adjacency(n: usize, kappa: f64, rng: &mut RngStream) -> Result<AdjacencyMatrix> {
    if n < 2 {
        return Err(Error::Domain { name: "n", value: n as f64, domain: ">= 2".into() });
    }
    let (lo, hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
    if !(kappa >= lo - KAPPA_SLACK && kappa <= hi + KAPPA_SLACK) {
        return Err(Error::Domain { name: "kappa", value: kappa, domain: format!("[{lo}, {hi}]") });
    }
    let n2 = n * n;
    let mut q = vec![false; n2];
    let p = random_derangement(n, rng)?;
    for (i, &j) in p.iter().enumerate() {
        q[i * n + j] = true;
    }
    for _ in n..one_count(n, kappa) {
        let mut m = rng.below(n2);
        loop {
            let (j, i) = (m / n, m % n);
            if i != j && !q[i * n + j] {
                q[i * n + j] = true;
                break;
            }
            m = (m + 1) % n2;
        }
    }
    Ok(AdjacencyMatrix::from_raw(n, q))
}

/// Independent uniform `(0, 1)` assets and liabilities, each rescaled to sum
/// to `total`.
pub fn random_balance_sheet(n: usize, total: f64, rng: &mut RngStream) -> Result<BalanceSheet> {
    if n < 2 {
        return Err(Error::Domain { name: "n", value: n as f64, domain: ">= 2".into() });
    }
    let draw = |rng: &mut RngStream| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.open01()).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|e| e / s * total).collect()
    };
    let assets = draw(rng);
    let liabilities = draw(rng);
    BalanceSheet::with_total(assets, liabilities, total)
}

/// A "true" exposure network together with its support and marginals.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub exposures: ExposureMatrix,
    pub adjacency: AdjacencyMatrix,
    pub balance: BalanceSheet,
}

/// Random support at connectivity `κ` carrying i.i.d. uniform `(0, 1)`
/// weights, rescaled to total mass `total`.
pub fn random_ground_truth(n: usize, kappa: f64, total: f64, rng: &mut RngStream) -> Result<GroundTruth> {
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Domain { name: "total", value: total, domain: "(0, inf)".into() });
    }
    let adjacency = random_adjacency(n, kappa, rng)?;
    let mut w: Vec<f64> = adjacency
        .as_slice()
        .iter()
        .map(|&b| if b { rng.open01() } else { 0.0 })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v = *v / s * total);
    let exposures = ExposureMatrix::new(n, w)?;
    let balance = BalanceSheet::with_total(exposures.row_sums(), exposures.col_sums(), total)?;
    Ok(GroundTruth { exposures, adjacency, balance })
}
