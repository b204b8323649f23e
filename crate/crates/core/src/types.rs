//! Domain types shared by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};

/// Relative tolerance for the closed-economy check `Σa = Σℓ = Λ`.
pub const MARGINAL_RTOL: f64 = 1e-9;

fn close_rel(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

/// Observed interbank totals: assets `a_i` (row sums), liabilities `ℓ_j`
/// (column sums) and the total volume `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceSheet {
    assets: Vec<f64>,
    liabilities: Vec<f64>,
    total: f64,
}

impl BalanceSheet {
    /// Builds a balance sheet whose total is `Σ a_i`.
    pub fn new(assets: Vec<f64>, liabilities: Vec<f64>) -> Result<Self> {
        let total = assets.iter().sum();
        Self::with_total(assets, liabilities, total)
    }

    /// Builds a balance sheet with an explicit total `Λ`; both marginal
    /// vectors must sum to it within [`MARGINAL_RTOL`].
    pub fn with_total(assets: Vec<f64>, liabilities: Vec<f64>, total: f64) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::BalanceSheet("no banks".into()));
        }
        if assets.len() != liabilities.len() {
            return Err(Error::Dimension { expected: assets.len(), actual: liabilities.len() });
        }
        if let Some(i) = assets.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::BalanceSheet(format!("assets[{i}] = {} is not positive", assets[i])));
        }
        if let Some(j) = liabilities.iter().position(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::BalanceSheet(format!(
                "liabilities[{j}] = {} is not positive",
                liabilities[j]
            )));
        }
        let sa: f64 = assets.iter().sum();
        let sl: f64 = liabilities.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::BalanceSheet(format!("total {total} is not positive")));
        }
        if !close_rel(sa, total, MARGINAL_RTOL) || !close_rel(sl, total, MARGINAL_RTOL) {
            return Err(Error::BalanceSheet(format!(
                "closed economy violated: sum(assets) = {sa}, sum(liabilities) = {sl}, total = {total}"
            )));
        }
        Ok(Self { assets, liabilities, total })
    }

    pub fn n(&self) -> usize {
        self.assets.len()
    }

    pub fn assets(&self) -> &[f64] {
        &self.assets
    }

    pub fn liabilities(&self) -> &[f64] {
        &self.liabilities
    }

    /// Total volume `Λ`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// The same sheet rescaled so that `Λ = 1`.
    pub fn normalized(&self) -> BalanceSheet {
        self.scaled(1.0 / self.total)
    }

    /// Whether a matrix with these marginals, zero diagonal and every
    /// off-diagonal entry positive exists: `a_i + ℓ_i < Λ` for every bank.
    pub fn admits_zero_diagonal(&self) -> bool {
        self.assets.len() >= 2
            && self.assets.iter().zip(&self.liabilities).all(|(a, l)| a + l < self.total)
    }

    pub fn scaled(&self, c: f64) -> BalanceSheet {
        BalanceSheet {
            assets: self.assets.iter().map(|a| a * c).collect(),
            liabilities: self.liabilities.iter().map(|l| l * c).collect(),
            total: self.total * c,
        }
    }
}

/// Dense `N×N` matrix of nonnegative bilateral exposures, row-major.
///
/// `x[i][j]` is the amount bank `i` has lent to bank `j`: an asset of `i` and
/// a liability of `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ExposureMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension { expected: n * n, actual: data.len() });
        }
        if let Some(k) = data.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Matrix(format!(
                "entry ({}, {}) = {} is not a finite nonnegative value",
                k / n,
                k % n,
                data[k]
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n, actual: r.len() });
        }
        Self::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Crate-internal constructor for values already known to be valid.
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks_exact(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for row in self.data.chunks_exact(self.n) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> ExposureMatrix {
        ExposureMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// Elementwise Heaviside step: the support pattern of the matrix.
    pub fn support(&self) -> AdjacencyMatrix {
        AdjacencyMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| v > 0.0).collect(),
        }
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    /// The balance sheet implied by this matrix's row and column sums.
    pub fn marginals(&self) -> Result<BalanceSheet> {
        BalanceSheet::with_total(self.row_sums(), self.col_sums(), self.total())
    }

    /// Frobenius distance to another matrix of the same size.
    pub fn distance(&self, other: &ExposureMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, actual: other.n });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// Largest elementwise absolute difference.
    pub fn max_abs_diff(&self, other: &ExposureMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, actual: other.n });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Binary `N×N` support matrix `q` with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    data: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn new(n: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension { expected: n * n, actual: data.len() });
        }
        if let Some(i) = (0..n).find(|&i| data[i * n + i]) {
            return Err(Error::Matrix(format!("diagonal entry ({i}, {i}) is set")));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, actual: r.len() });
            }
            for &v in r {
                match v {
                    0 => data.push(false),
                    1 => data.push(true),
                    _ => return Err(Error::Matrix(format!("adjacency entry {v} is not 0 or 1"))),
                }
            }
        }
        Self::new(n, data)
    }

    pub fn empty(n: usize) -> Self {
        Self { n, data: vec![false; n * n] }
    }

    /// All off-diagonal cells set: the dense reconstruction support.
    pub fn full(n: usize) -> Self {
        let data = (0..n * n).map(|k| k / n != k % n).collect();
        Self { n, data }
    }

    /// Permutation matrix with `q[i][perm[i]] = 1`. The permutation must have
    /// no fixed points.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut data = vec![false; n * n];
        let mut seen = vec![false; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || seen[p] {
                return Err(Error::Matrix(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
            data[i * n + p] = true;
        }
        Self::new(n, data)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.data.chunks_exact(self.n).map(|r| r.iter().filter(|&&b| b).count()).collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for row in self.data.chunks_exact(self.n) {
            for (o, &b) in out.iter_mut().zip(row) {
                *o += usize::from(b);
            }
        }
        out
    }

    /// Connectivity `κ = N⁻² Σ q_ij`.
    pub fn connectivity(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.count_ones() as f64 / (self.n * self.n) as f64
    }

    /// Sparsity `σ = 1 − κ`.
    pub fn sparsity(&self) -> f64 {
        1.0 - self.connectivity()
    }

    /// Every row and every column holds at least one entry. Necessary (but
    /// not sufficient) for `q` to carry a matrix matching positive marginals.
    pub fn check_support(&self) -> Result<()> {
        if let Some(i) = self.row_degrees().iter().position(|&d| d == 0) {
            return Err(Error::Support { axis: Axis::Row, index: i });
        }
        if let Some(j) = self.col_degrees().iter().position(|&d| d == 0) {
            return Err(Error::Support { axis: Axis::Column, index: j });
        }
        Ok(())
    }

    /// `true` when this is `Θ(x)` for the given matrix.
    pub fn is_support_of(&self, x: &ExposureMatrix) -> bool {
        self.n == x.n() && self.data.iter().zip(x.as_slice()).all(|(&q, &v)| q == (v > 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed-form dense maximum entropy `x = a ℓᵀ`.
    Me,
    /// Iterative proportional fitting against the zero-diagonal prior.
    Ras,
    /// Sparse RAS on a given support.
    Sras,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Me => "me",
            Method::Ras => "ras",
            Method::Sras => "sras",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "me" => Ok(Method::Me),
            "ras" => Ok(Method::Ras),
            "sras" => Ok(Method::Sras),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Why an iterative solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Step distance fell below the tolerance.
    Converged,
    IterationLimit,
    /// Scaling factors left the finite double range; the solution is the last
    /// finite iterate. Happens on supports that cannot carry the marginals.
    Breakdown,
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub method: Method,
    pub solution: ExposureMatrix,
    /// Complete (row + column) iterations performed.
    pub iterations: usize,
    /// Step distance `η` of the last complete iteration.
    pub final_step: f64,
    /// Constraint deviation `ε` of the solution.
    pub deviation: f64,
    pub termination: Termination,
    /// Tolerance `δ` used for the run.
    pub delta: f64,
    /// Inner-loop multiply-accumulate visits spent in the main loop.
    pub work: u64,
}

impl ReconstructionReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// Main-loop work per complete iteration.
    pub fn work_per_iteration(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.work as f64 / self.iterations as f64
        }
    }
}

/// Divides a balance sheet and an exposure matrix by the sheet's `Λ`.
pub fn normalize_pair(bs: &BalanceSheet, x: &ExposureMatrix) -> (BalanceSheet, ExposureMatrix) {
    let c = 1.0 / bs.total();
    (bs.scaled(c), x.scaled(c))
}
