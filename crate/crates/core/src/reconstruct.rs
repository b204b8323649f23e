//! Exposure-matrix reconstruction from balance-sheet marginals.
//!
//! Three procedures are provided:
//!
//! - [`me_dense`]: the closed-form maximum entropy matrix `x_ij = a_i ℓ_j`,
//!   which fills every cell including the diagonal.
//! - [`ras`]: iterative proportional fitting starting from the zero-diagonal
//!   prior. Each complete iteration rescales the rows to the assets and then the
//!   columns to the liabilities, and stops once the Frobenius distance between
//!   successive matrices drops below `δ`.
//! - [`sras`]: the sparse variant. Instead of iterating on the `N²` matrix it
//!   iterates on the two scaling vectors of the fixed point `x_ij = q_ij ψ_i φ_j`:
//!
//!   ```text
//!   ψ_i ← a_i / Σ_j q_ij φ_j
//!   φ_j ← ℓ_j / Σ_i q_ij ψ_i
//!   ```
//!
//!   starting from `ψ = a`, `φ = ℓ`, and stops once the Euclidean distance
//!   between successive `(ψ, φ)` states is at most `δ`.
//!
//! A support that cannot carry the marginals makes the scaling vectors drift
//! geometrically towards 0 and ∞ while the matrix itself settles. SRAS then
//! stops with [`Termination::Breakdown`] and returns the last finite iterate;
//! the constraint deviation `ε` in the report tells how far it is from
//! feasibility.

use crate::error::{Axis, Error, Result};
use crate::metrics::constraint_deviation;
use crate::types::{
    AdjacencyMatrix, BalanceSheet, ExposureMatrix, Method, ReconstructionReport, Termination,
};

/// Line sums below this value are treated as empty.
pub const UNDERFLOW_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Convergence tolerance `δ` on the step distance.
    pub delta: f64,
    /// Cap on complete (row + column) iterations.
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { delta: 1e-7, max_iterations: 100_000 }
    }
}

impl SolverConfig {
    pub fn new(delta: f64, max_iterations: usize) -> Result<Self> {
        let cfg = Self { delta, max_iterations };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(delta, Self::default().max_iterations)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain { name: "delta", value: self.delta, domain: "(0, 1)".into() });
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain { name: "max_iterations", value: 0.0, domain: ">= 1".into() });
        }
        Ok(())
    }
}

/// SRAS scaling vectors. Only the products `ψ_i φ_j` are meaningful:
/// `(cψ, φ/c)` describes the same matrix for every `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFactors {
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
}

impl ScalingFactors {
    /// `x_ij = q_ij ψ_i φ_j`.
    pub fn solution(&self, q: &AdjacencyMatrix) -> Result<ExposureMatrix> {
        let n = q.n();
        if self.psi.len() != n || self.phi.len() != n {
            return Err(Error::Dimension { expected: n, actual: self.psi.len().min(self.phi.len()) });
        }
        let mut data = vec![0.0; n * n];
        for (i, row) in data.chunks_exact_mut(n).enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if q.get(i, j) {
                    *cell = self.psi[i] * self.phi[j];
                }
            }
        }
        ExposureMatrix::new(n, data)
    }

    pub fn regauged(&self, c: f64) -> ScalingFactors {
        ScalingFactors {
            psi: self.psi.iter().map(|v| v * c).collect(),
            phi: self.phi.iter().map(|v| v / c).collect(),
        }
    }
}

/// Closed-form dense maximum entropy matrix `x_ij = a_i ℓ_j / Λ`
/// (`a_i ℓ_j` for a normalized sheet). Row sums equal `a`, column sums `ℓ`.
pub fn me_dense(bs: &BalanceSheet) -> ExposureMatrix {
    outer(bs, false)
}

/// The maximum entropy matrix with its diagonal cleared: a bank holds no
/// exposure to itself. No longer satisfies the marginals.
pub fn zero_diagonal_prior(bs: &BalanceSheet) -> Result<ExposureMatrix> {
    if bs.n() < 2 {
        return Err(Error::Infeasible("a single bank has no off-diagonal cells".into()));
    }
    Ok(outer(bs, true))
}

fn outer(bs: &BalanceSheet, zero_diagonal: bool) -> ExposureMatrix {
    let n = bs.n();
    let total = bs.total();
    let mut data = Vec::with_capacity(n * n);
    for (i, &a) in bs.assets().iter().enumerate() {
        for (j, &l) in bs.liabilities().iter().enumerate() {
            data.push(if zero_diagonal && i == j { 0.0 } else { a * l / total });
        }
    }
    ExposureMatrix::from_raw(n, data)
}

/// Main-loop multiply-accumulate visits per complete iteration: `4N²` for
/// RAS (row sums, row scaling, column sums, column scaling) and `2N²` for
/// SRAS (one pass per scaling vector). `None` for the closed form or `n < 2`.
pub fn iteration_cost(n: usize, method: Method) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let n2 = (n as u64) * (n as u64);
    match method {
        Method::Ras => Some(4 * n2),
        Method::Sras => Some(2 * n2),
        Method::Me => None,
    }
}

/// Euclidean norm that does not overflow for large components.
fn scaled_norm(diffs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = diffs.clone().fold(0.0f64, |m, d| m.max(d.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * diffs.map(|d| (d / m) * (d / m)).sum::<f64>().sqrt()
}

/// Iterative proportional fitting state.
pub struct RasSolver<'a> {
    bs: &'a BalanceSheet,
    n: usize,
    x: Vec<f64>,
    prev: Vec<f64>,
    col: Vec<f64>,
    work: u64,
}

impl<'a> RasSolver<'a> {
    pub fn new(bs: &'a BalanceSheet) -> Result<Self> {
        let x = zero_diagonal_prior(bs)?.into_vec();
        let n = bs.n();
        Ok(Self { bs, n, prev: x.clone(), x, col: vec![0.0; n], work: 0 })
    }

    pub fn matrix(&self) -> ExposureMatrix {
        ExposureMatrix::from_raw(self.n, self.x.clone())
    }

    pub fn work(&self) -> u64 {
        self.work
    }

    fn row_pass(&mut self) -> Result<()> {
        let n = self.n;
        for (i, (row, &a)) in self.x.chunks_exact_mut(n).zip(self.bs.assets()).enumerate() {
            let s: f64 = row.iter().sum();
            if !(s >= UNDERFLOW_GUARD && s.is_finite()) {
                return Err(Error::Support { axis: Axis::Row, index: i });
            }
            let f = a / s;
            row.iter_mut().for_each(|v| *v *= f);
        }
        self.work += 2 * (n * n) as u64;
        Ok(())
    }

    /// Rescales columns; returns the distance to the snapshot in `prev`,
    /// accumulated in the same sweep.
    fn column_pass(&mut self) -> Result<f64> {
        let n = self.n;
        self.col.iter_mut().for_each(|c| *c = 0.0);
        for row in self.x.chunks_exact(n) {
            for (c, v) in self.col.iter_mut().zip(row) {
                *c += v;
            }
        }
        for (j, (c, &l)) in self.col.iter_mut().zip(self.bs.liabilities()).enumerate() {
            if !(*c >= UNDERFLOW_GUARD && c.is_finite()) {
                return Err(Error::Support { axis: Axis::Column, index: j });
            }
            *c = l / *c;
        }
        let mut eta2 = 0.0;
        for (row, prev) in self.x.chunks_exact_mut(n).zip(self.prev.chunks_exact(n)) {
            for ((v, f), p) in row.iter_mut().zip(&self.col).zip(prev) {
                *v *= f;
                eta2 += (*v - p) * (*v - p);
            }
        }
        self.work += 2 * (n * n) as u64;
        Ok(eta2.sqrt())
    }

    /// One complete iteration; returns the Frobenius step distance `η`.
    pub fn step(&mut self) -> Result<f64> {
        self.prev.copy_from_slice(&self.x);
        self.row_pass()?;
        self.column_pass()
    }
}

/// RAS reconstruction against the zero-diagonal prior.
///
/// Stops when `‖x(t+1) − x(t)‖ < δ`. Exhausting `max_iterations` yields a
/// report with [`Termination::IterationLimit`] and the last iterate.
pub fn ras(bs: &BalanceSheet, cfg: &SolverConfig) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let mut solver = RasSolver::new(bs)?;
    let mut eta = f64::INFINITY;
    let mut iterations = 0;
    let mut termination = Termination::IterationLimit;
    while iterations < cfg.max_iterations {
        eta = solver.step()?;
        iterations += 1;
        if eta < cfg.delta {
            termination = Termination::Converged;
            break;
        }
    }
    let solution = solver.matrix();
    let deviation = constraint_deviation(&solution, bs)?;
    Ok(ReconstructionReport {
        method: Method::Ras,
        solution,
        iterations,
        final_step: eta,
        deviation,
        termination,
        delta: cfg.delta,
        work: solver.work(),
    })
}

/// Sparse RAS state: the scaling vectors `(ψ, φ)` for a fixed support.
pub struct SrasSolver<'a> {
    bs: &'a BalanceSheet,
    q: &'a AdjacencyMatrix,
    mask: Vec<f64>,
    psi: Vec<f64>,
    phi: Vec<f64>,
    next_psi: Vec<f64>,
    next_phi: Vec<f64>,
    work: u64,
}

/// Outcome of one SRAS iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SrasStep {
    /// Distance between successive `(ψ, φ)` states.
    Step(f64),
    /// The update left the finite double range; the state was not changed.
    Breakdown,
}

impl<'a> SrasSolver<'a> {
    pub fn new(bs: &'a BalanceSheet, q: &'a AdjacencyMatrix) -> Result<Self> {
        let n = bs.n();
        if q.n() != n {
            return Err(Error::Dimension { expected: n, actual: q.n() });
        }
        q.check_support()?;
        let mask = q.as_slice().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Ok(Self {
            bs,
            q,
            mask,
            psi: bs.assets().to_vec(),
            phi: bs.liabilities().to_vec(),
            next_psi: vec![0.0; n],
            next_phi: vec![0.0; n],
            work: 0,
        })
    }

    pub fn factors(&self) -> ScalingFactors {
        ScalingFactors { psi: self.psi.clone(), phi: self.phi.clone() }
    }

    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn step(&mut self) -> SrasStep {
        let n = self.psi.len();
        let ok = |v: f64| v.is_finite() && v > 0.0;

        for (i, (row, &a)) in self.mask.chunks_exact(n).zip(self.bs.assets()).enumerate() {
            let s: f64 = row.iter().zip(&self.phi).map(|(q, f)| q * f).sum();
            if !(s >= UNDERFLOW_GUARD && s.is_finite()) {
                return SrasStep::Breakdown;
            }
            let xi = a / s;
            if !ok(xi) {
                return SrasStep::Breakdown;
            }
            self.next_psi[i] = xi;
        }

        self.next_phi.iter_mut().for_each(|s| *s = 0.0);
        for (row, &p) in self.mask.chunks_exact(n).zip(&self.next_psi) {
            for (s, q) in self.next_phi.iter_mut().zip(row) {
                *s += q * p;
            }
        }
        self.work += 2 * (n * n) as u64;
        for (s, &l) in self.next_phi.iter_mut().zip(self.bs.liabilities()) {
            if !(*s >= UNDERFLOW_GUARD && s.is_finite()) {
                return SrasStep::Breakdown;
            }
            *s = l / *s;
            if !ok(*s) {
                return SrasStep::Breakdown;
            }
        }

        let diffs = self
            .next_psi
            .iter()
            .zip(&self.psi)
            .chain(self.next_phi.iter().zip(&self.phi))
            .map(|(a, b)| a - b);
        let eta = scaled_norm(diffs);
        std::mem::swap(&mut self.psi, &mut self.next_psi);
        std::mem::swap(&mut self.phi, &mut self.next_phi);
        SrasStep::Step(eta)
    }

    pub fn solution(&self) -> ExposureMatrix {
        let n = self.psi.len();
        let mut data = vec![0.0; n * n];
        for (i, row) in data.chunks_exact_mut(n).enumerate() {
            let p = self.psi[i];
            for (j, cell) in row.iter_mut().enumerate() {
                if self.q.get(i, j) {
                    *cell = p * self.phi[j];
                }
            }
        }
        ExposureMatrix::from_raw(n, data)
    }
}

/// SRAS reconstruction on support `q`. See [`sras_with_factors`].
pub fn sras(bs: &BalanceSheet, q: &AdjacencyMatrix, cfg: &SolverConfig) -> Result<ReconstructionReport> {
    sras_with_factors(bs, q, cfg).map(|(r, _)| r)
}

/// SRAS reconstruction returning the final scaling vectors as well.
///
/// `q` must have every row and column nonempty. The report's `termination`
/// refers to the step distance only; whether the marginals are met is judged
/// by its `deviation`.
pub fn sras_with_factors(
    bs: &BalanceSheet,
    q: &AdjacencyMatrix,
    cfg: &SolverConfig,
) -> Result<(ReconstructionReport, ScalingFactors)> {
    cfg.validate()?;
    let mut solver = SrasSolver::new(bs, q)?;
    let mut eta = f64::INFINITY;
    let mut iterations = 0;
    let mut termination = Termination::IterationLimit;
    while iterations < cfg.max_iterations {
        match solver.step() {
            SrasStep::Step(e) => {
                eta = e;
                iterations += 1;
                if eta <= cfg.delta {
                    termination = Termination::Converged;
                    break;
                }
            }
            SrasStep::Breakdown => {
                termination = Termination::Breakdown;
                break;
            }
        }
    }
    let solution = solver.solution();
    let deviation = constraint_deviation(&solution, bs)?;
    let report = ReconstructionReport {
        method: Method::Sras,
        solution,
        iterations,
        final_step: eta,
        deviation,
        termination,
        delta: cfg.delta,
        work: solver.work(),
    };
    Ok((report, solver.factors()))
}

/// Runs `method` on `bs`. `support` is required for SRAS and ignored otherwise.
pub fn reconstruct(
    method: Method,
    bs: &BalanceSheet,
    support: Option<&AdjacencyMatrix>,
    cfg: &SolverConfig,
) -> Result<ReconstructionReport> {
    match method {
        Method::Me => {
            let solution = me_dense(bs);
            let deviation = constraint_deviation(&solution, bs)?;
            Ok(ReconstructionReport {
                method,
                solution,
                iterations: 0,
                final_step: 0.0,
                deviation,
                termination: Termination::Converged,
                delta: cfg.delta,
                work: 0,
            })
        }
        Method::Ras => ras(bs, cfg),
        Method::Sras => {
            let q = support.ok_or_else(|| Error::Infeasible("sras needs a support matrix".into()))?;
            sras(bs, q, cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::kl_divergence;
    use approx::assert_abs_diff_eq;

    fn bs(a: &[f64], l: &[f64]) -> BalanceSheet {
        BalanceSheet::new(a.to_vec(), l.to_vec()).unwrap()
    }

    fn assert_matrix(x: &ExposureMatrix, expected: &[&[f64]], tol: f64) {
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((x.get(i, j) - e).abs() <= tol, "x[{i}][{j}] = {} != {e}", x.get(i, j));
            }
        }
    }

    #[test]
    fn me_dense_examples() {
        let x = me_dense(&bs(&[0.5, 0.5], &[0.5, 0.5]));
        assert_matrix(&x, &[&[0.25, 0.25], &[0.25, 0.25]], 0.0);
        let x = me_dense(&bs(&[0.6, 0.4], &[0.3, 0.7]));
        assert_matrix(&x, &[&[0.18, 0.42], &[0.12, 0.28]], 1e-15);
    }

    #[test]
    fn me_dense_unnormalized_keeps_marginals() {
        let sheet = bs(&[3.0, 1.0], &[2.0, 2.0]);
        let x = me_dense(&sheet);
        assert_eq!(x.row_sums(), vec![3.0, 1.0]);
        assert_eq!(x.col_sums(), vec![2.0, 2.0]);
    }

    #[test]
    fn prior_examples() {
        let x = zero_diagonal_prior(&bs(&[0.5, 0.5], &[0.5, 0.5])).unwrap();
        assert_matrix(&x, &[&[0.0, 0.25], &[0.25, 0.0]], 0.0);
        let x = zero_diagonal_prior(&bs(&[0.6, 0.4], &[0.3, 0.7])).unwrap();
        assert_matrix(&x, &[&[0.0, 0.42], &[0.12, 0.0]], 1e-15);
        assert!(matches!(zero_diagonal_prior(&bs(&[1.0], &[1.0])), Err(Error::Infeasible(_))));
    }

    #[test]
    fn ras_two_banks() {
        let r = ras(&bs(&[0.5, 0.5], &[0.5, 0.5]), &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_matrix(&r.solution, &[&[0.0, 0.5], &[0.5, 0.0]], 1e-12);
    }

    #[test]
    fn ras_three_symmetric() {
        let third = 1.0 / 3.0;
        let r = ras(&bs(&[third; 3], &[third; 3]), &SolverConfig::default()).unwrap();
        assert!(r.converged());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 0.0 } else { 1.0 / 6.0 };
                assert_abs_diff_eq!(r.solution.get(i, j), e, epsilon = 1e-12);
            }
        }
        assert!(r.deviation < 1e-12);
    }

    #[test]
    fn ras_passes_hit_marginals() {
        let sheet = bs(&[0.5, 0.3, 0.2, 0.1], &[0.2, 0.3, 0.25, 0.35]).normalized();
        let mut s = RasSolver::new(&sheet).unwrap();
        for _ in 0..20 {
            s.prev.copy_from_slice(&s.x);
            s.row_pass().unwrap();
            let x = s.matrix();
            for (r, a) in x.row_sums().iter().zip(sheet.assets()) {
                assert_abs_diff_eq!(r, a, epsilon = 1e-15);
            }
            s.column_pass().unwrap();
            let x = s.matrix();
            for (c, l) in x.col_sums().iter().zip(sheet.liabilities()) {
                assert_abs_diff_eq!(c, l, epsilon = 1e-15);
            }
            assert!(x.has_zero_diagonal());
        }
    }

    #[test]
    fn ras_iteration_limit_keeps_partial_solution() {
        let sheet = bs(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]);
        let cfg = SolverConfig::new(1e-15, 3).unwrap();
        let r = ras(&sheet, &cfg).unwrap();
        assert_eq!(r.termination, Termination::IterationLimit);
        assert_eq!(r.iterations, 3);
        assert!(r.solution.has_zero_diagonal());
        assert!(r.final_step > cfg.delta);
    }

    #[test]
    fn ras_decreases_divergence_to_prior_against_feasible_alternatives() {
        // Any feasible zero-diagonal matrix is at least as far from the prior.
        let sheet = bs(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]);
        let prior = zero_diagonal_prior(&sheet).unwrap();
        let r = ras(&sheet, &SolverConfig::with_delta(1e-12).unwrap()).unwrap();
        let d_ras = kl_divergence(&r.solution, &prior).unwrap();
        // 3x3 zero-diagonal matrices with given marginals form a 1-parameter family.
        let x = &r.solution;
        for t in [-0.05, -0.01, 0.01, 0.05] {
            let mut v = x.as_slice().to_vec();
            // cycle 0->1->2->0 minus cycle 0->2->1->0 preserves all line sums
            v[1] += t;
            v[5] += t;
            v[6] += t;
            v[2] -= t;
            v[7] -= t;
            v[3] -= t;
            if v.iter().all(|&e| e >= 0.0) {
                let y = ExposureMatrix::new(3, v).unwrap();
                assert!(kl_divergence(&y, &prior).unwrap() > d_ras);
            }
        }
    }

    #[test]
    fn sras_permutation_support() {
        let q = AdjacencyMatrix::from_permutation(&[1, 2, 0]).unwrap();
        let sheet = bs(&[0.2, 0.3, 0.5], &[0.5, 0.2, 0.3]);
        let r = sras(&sheet, &q, &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_matrix(
            &r.solution,
            &[&[0.0, 0.2, 0.0], &[0.0, 0.0, 0.3], &[0.5, 0.0, 0.0]],
            1e-12,
        );
        assert!(r.deviation < 1e-12);
    }

    #[test]
    fn sras_infeasible_two_banks() {
        // Row and column constraints disagree on both cells; the scaling
        // vectors drift by a factor 1.2 per iteration while x stays fixed.
        let q = AdjacencyMatrix::full(2);
        let sheet = bs(&[0.6, 0.4], &[0.5, 0.5]);
        let (r, f) = sras_with_factors(&sheet, &q, &SolverConfig::default()).unwrap();
        assert_eq!(r.termination, Termination::Breakdown);
        assert!(!r.converged());
        assert_matrix(&r.solution, &[&[0.0, 0.5], &[0.5, 0.0]], 1e-12);
        assert_abs_diff_eq!(r.deviation, (0.02f64 / 1.02).sqrt(), epsilon = 1e-12);
        assert!(f.psi.iter().chain(&f.phi).all(|v| v.is_finite() && *v > 0.0));
        assert!(r.final_step.is_finite());
    }

    #[test]
    fn sras_first_iteration_by_hand() {
        let q = AdjacencyMatrix::full(2);
        let sheet = bs(&[0.6, 0.4], &[0.5, 0.5]);
        let mut s = SrasSolver::new(&sheet, &q).unwrap();
        s.step();
        let f = s.factors();
        assert_abs_diff_eq!(f.psi[0], 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(f.psi[1], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(f.phi[0], 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(f.phi[1], 0.5 / 1.2, epsilon = 1e-15);
    }

    #[test]
    fn sras_rejects_bad_support() {
        let sheet = bs(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]);
        let q = AdjacencyMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0]]).unwrap();
        assert!(matches!(
            sras(&sheet, &q, &SolverConfig::default()),
            Err(Error::Support { axis: Axis::Column, index: 2 })
        ));
        assert!(matches!(
            sras(&sheet, &AdjacencyMatrix::full(4), &SolverConfig::default()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn sras_full_support_matches_ras() {
        let sheet = bs(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]);
        let cfg = SolverConfig::default();
        let a = ras(&sheet, &cfg).unwrap();
        let b = sras(&sheet, &AdjacencyMatrix::full(3), &cfg).unwrap();
        assert!(a.solution.max_abs_diff(&b.solution).unwrap() < 1e-6);
    }

    #[test]
    fn gauge_invariance() {
        let sheet = bs(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]);
        let q = AdjacencyMatrix::full(3);
        let (_, f) = sras_with_factors(&sheet, &q, &SolverConfig::default()).unwrap();
        let x = f.solution(&q).unwrap();
        for c in [1e-3, 0.5, 7.0, 1e4] {
            let y = f.regauged(c).solution(&q).unwrap();
            assert!(x.max_abs_diff(&y).unwrap() < 1e-15);
        }
    }

    #[test]
    fn costs() {
        assert_eq!(iteration_cost(100, Method::Sras), Some(20_000));
        assert_eq!(iteration_cost(100, Method::Ras), Some(40_000));
        assert_eq!(iteration_cost(1, Method::Ras), None);
        assert_eq!(iteration_cost(5, Method::Me), None);
        for n in 2..50 {
            assert_eq!(iteration_cost(n, Method::Ras).unwrap(), 2 * iteration_cost(n, Method::Sras).unwrap());
        }
    }

    #[test]
    fn counters_match_cost_model() {
        let sheet = bs(&[0.5, 0.3, 0.2, 0.1], &[0.2, 0.3, 0.25, 0.35]).normalized();
        let r = ras(&sheet, &SolverConfig::default()).unwrap();
        let s = sras(&sheet, &AdjacencyMatrix::full(4), &SolverConfig::default()).unwrap();
        assert_eq!(r.work_per_iteration(), 64.0);
        assert_eq!(s.work_per_iteration(), 32.0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 10).is_err());
        assert!(SolverConfig::new(1.5, 10).is_err());
        assert!(SolverConfig::new(1e-7, 0).is_err());
        assert_eq!(SolverConfig::default().delta, 1e-7);
        assert_eq!(SolverConfig::default().max_iterations, 100_000);
    }

    #[test]
    fn reconstruct_dispatch() {
        let sheet = bs(&[0.6, 0.4], &[0.3, 0.7]);
        let r = reconstruct(Method::Me, &sheet, None, &SolverConfig::default()).unwrap();
        assert!(r.deviation < 1e-15);
        assert!(reconstruct(Method::Sras, &sheet, None, &SolverConfig::default()).is_err());
    }
}
