//! Diagnostic metrics on exposure and adjacency matrices.
//!
//! Entropy and divergence use the convention `0 · ln 0 = 0`. Positive mass on
//! a cell where the reference matrix is zero is reported as
//! [`Error::InfiniteDivergence`] rather than a large finite number.

use crate::error::{Error, Result};
use crate::types::{AdjacencyMatrix, BalanceSheet, ExposureMatrix};

/// Absolute tolerance on the total mass of a normalized matrix.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[inline]
fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Normalized entropy `S_x = −(1 / 2 ln N) Σ x_ij ln x_ij`.
///
/// The matrix must already be normalized to unit mass.
pub fn entropy_normalized(x: &ExposureMatrix) -> Result<f64> {
    let n = x.n();
    if n < 2 {
        return Err(Error::Domain { name: "N", value: n as f64, domain: ">= 2".into() });
    }
    let total = x.total();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { total });
    }
    let s: f64 = x.as_slice().iter().map(|&v| xlnx(v)).sum();
    Ok(-s / (2.0 * (n as f64).ln()))
}

/// Binary entropy of the connectivity, `−κ log₂ κ − (1−κ) log₂(1−κ)`, on the
/// open interval `0 < κ < 1`.
pub fn adjacency_entropy(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain { name: "kappa", value: kappa, domain: "(0, 1)".into() });
    }
    Ok(binary_entropy(kappa))
}

/// Like [`adjacency_entropy`] but accepts the endpoints, where it is 0.
pub fn adjacency_entropy_closed(kappa: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Domain { name: "kappa", value: kappa, domain: "[0, 1]".into() });
    }
    Ok(binary_entropy(kappa))
}

fn binary_entropy(k: f64) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    h(k) + h(1.0 - k)
}

/// Kullback-Leibler divergence `D(x ‖ x0) = Σ x_ij ln(x_ij / x0_ij)` over the
/// cells where `x_ij > 0`.
pub fn kl_divergence(x: &ExposureMatrix, x0: &ExposureMatrix) -> Result<f64> {
    if x.n() != x0.n() {
        return Err(Error::Dimension { expected: x0.n(), actual: x.n() });
    }
    let n = x.n();
    let mut d = 0.0;
    for (k, (&v, &v0)) in x.as_slice().iter().zip(x0.as_slice()).enumerate() {
        if v > 0.0 {
            if v0 <= 0.0 {
                return Err(Error::InfiniteDivergence { row: k / n, col: k % n });
            }
            d += v * (v / v0).ln();
        }
    }
    Ok(d)
}

/// Relative deviation of the matrix marginals from the balance sheet:
///
/// `ε = sqrt( [Σ_i (row_i − a_i)² + Σ_j (col_j − ℓ_j)²] / [Σ a_i² + Σ ℓ_j²] )`.
pub fn constraint_deviation(x: &ExposureMatrix, bs: &BalanceSheet) -> Result<f64> {
    if x.n() != bs.n() {
        return Err(Error::Dimension { expected: bs.n(), actual: x.n() });
    }
    let sq_err = |sums: Vec<f64>, target: &[f64]| -> f64 {
        sums.iter().zip(target).map(|(s, t)| (s - t) * (s - t)).sum()
    };
    let num = sq_err(x.row_sums(), bs.assets()) + sq_err(x.col_sums(), bs.liabilities());
    let den: f64 = bs.assets().iter().chain(bs.liabilities()).map(|v| v * v).sum();
    Ok((num / den).sqrt())
}

/// Connectivity `κ = N⁻² Σ q_ij`.
pub fn connectivity(q: &AdjacencyMatrix) -> f64 {
    q.connectivity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> ExposureMatrix {
        ExposureMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn entropy_uniform_is_one() {
        let x = ExposureMatrix::new(10, vec![0.01; 100]).unwrap();
        assert_abs_diff_eq!(entropy_normalized(&x).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_antidiagonal() {
        let x = m(&[&[0.0, 0.5], &[0.5, 0.0]]);
        assert_abs_diff_eq!(entropy_normalized(&x).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn entropy_uniform_product() {
        let x = ExposureMatrix::new(3, vec![1.0 / 9.0; 9]).unwrap();
        assert_abs_diff_eq!(entropy_normalized(&x).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_requires_normalization() {
        let x = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(entropy_normalized(&x), Err(Error::NotNormalized { .. })));
        let one = ExposureMatrix::new(1, vec![1.0]).unwrap();
        assert!(entropy_normalized(&one).is_err());
    }

    #[test]
    fn adjacency_entropy_values() {
        assert_abs_diff_eq!(adjacency_entropy(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(adjacency_entropy(0.25).unwrap(), 0.8112781244591328, epsilon = 1e-12);
        assert_abs_diff_eq!(adjacency_entropy(0.75).unwrap(), 0.8112781244591328, epsilon = 1e-12);
        assert!(adjacency_entropy(0.0).is_err());
        assert!(adjacency_entropy(1.0).is_err());
        assert!(adjacency_entropy(f64::NAN).is_err());
        assert_eq!(adjacency_entropy_closed(0.0).unwrap(), 0.0);
        assert_eq!(adjacency_entropy_closed(1.0).unwrap(), 0.0);
        assert!(adjacency_entropy_closed(1.5).is_err());
    }

    #[test]
    fn kl_examples() {
        let x0 = m(&[&[0.0, 0.5], &[0.5, 0.0]]);
        assert_eq!(kl_divergence(&x0, &x0).unwrap(), 0.0);

        let x = m(&[&[0.0, 0.6], &[0.4, 0.0]]);
        let expected = 0.6 * 1.2f64.ln() + 0.4 * 0.8f64.ln();
        assert_abs_diff_eq!(kl_divergence(&x, &x0).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.020136, epsilon = 1e-6);

        let flat = m(&[&[0.25, 0.25], &[0.25, 0.25]]);
        assert_abs_diff_eq!(kl_divergence(&x0, &flat).unwrap(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn kl_zero_prior_is_infinite() {
        let x = m(&[&[0.25, 0.25], &[0.25, 0.25]]);
        let x0 = m(&[&[0.0, 0.5], &[0.5, 0.0]]);
        match kl_divergence(&x, &x0) {
            Err(Error::InfiniteDivergence { row: 0, col: 0 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(kl_divergence(&x, &ExposureMatrix::zeros(3)).is_err());
    }

    #[test]
    fn deviation_examples() {
        let bs = BalanceSheet::new(vec![0.6, 0.4], vec![0.5, 0.5]).unwrap();
        let x = m(&[&[0.0, 0.5], &[0.5, 0.0]]);
        // rows miss by ±0.1, columns exact; denominator 0.36 + 0.16 + 0.25 + 0.25
        let eps = constraint_deviation(&x, &bs).unwrap();
        assert_abs_diff_eq!(eps, (0.02f64 / 1.02).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(eps, 0.14003, epsilon = 1e-5);

        let feasible = m(&[&[0.0, 0.6], &[0.4, 0.0]]);
        let bs = BalanceSheet::new(vec![0.6, 0.4], vec![0.4, 0.6]).unwrap();
        assert_eq!(constraint_deviation(&feasible, &bs).unwrap(), 0.0);

        assert!(constraint_deviation(&ExposureMatrix::zeros(3), &bs).is_err());
    }

    fn normalized_matrix(n: usize) -> impl Strategy<Value = ExposureMatrix> {
        prop::collection::vec(0.01f64..1.0, n * n).prop_map(move |v| {
            let s: f64 = v.iter().sum();
            ExposureMatrix::new(n, v.into_iter().map(|e| e / s).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn entropy_below_uniform(x in normalized_matrix(5)) {
            let s = entropy_normalized(&x).unwrap();
            prop_assert!(s < 1.0);
            prop_assert!(s > 0.0);
        }

        #[test]
        fn kl_nonnegative(x in normalized_matrix(4), y in normalized_matrix(4)) {
            let d = kl_divergence(&x, &y).unwrap();
            prop_assert!(d >= -1e-12);
            prop_assert!(kl_divergence(&x, &x).unwrap().abs() < 1e-12);
        }

        #[test]
        fn deviation_scale_invariant(x in normalized_matrix(4), c in 0.01f64..100.0) {
            let bs = BalanceSheet::new(vec![0.1, 0.2, 0.3, 0.4], vec![0.4, 0.3, 0.2, 0.1]).unwrap();
            let e1 = constraint_deviation(&x, &bs).unwrap();
            let e2 = constraint_deviation(&x.scaled(c), &bs.scaled(c)).unwrap();
            prop_assert!((e1 - e2).abs() < 1e-12);
        }

        #[test]
        fn adjacency_entropy_symmetric(k in 1e-6f64..(1.0 - 1e-6)) {
            let a = adjacency_entropy(k).unwrap();
            let b = adjacency_entropy(1.0 - k).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
