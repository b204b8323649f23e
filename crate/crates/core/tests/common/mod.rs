//! Independent reference solver for the KL projection onto marginal
//! constraints, used to cross-check RAS and SRAS.
//!
//! Solves the convex dual
//!
//!   min_{u,v}  Σ_ij p_ij exp(u_i + v_j) − Σ_i a_i u_i − Σ_j l_j v_j
//!
//! with damped Newton steps on the full Hessian (dense LU via nalgebra),
//! pinning `v_{N−1} = 0` to remove the gauge direction. The primal optimum is
//! `x_ij = p_ij exp(u_i + v_j)`.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub struct OracleSolution {
    pub x: Vec<f64>,
    pub newton_steps: usize,
    pub gradient_norm: f64,
}

fn dual(p: &[f64], n: usize, a: &[f64], l: &[f64], z: &DVector<f64>) -> f64 {
    let (u, v) = split(z, n);
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            f += p[i * n + j] * (u[i] + v[j]).exp();
        }
    }
    f - (0..n).map(|i| a[i] * u[i] + l[i] * v[i]).sum::<f64>()
}

fn split(z: &DVector<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let u = z.rows(0, n).iter().copied().collect();
    let mut v: Vec<f64> = z.rows(n, n - 1).iter().copied().collect();
    v.push(0.0);
    (u, v)
}

/// KL projection of the prior `p` (row-major, `n × n`) onto the marginals.
pub fn kl_projection(p: &[f64], n: usize, a: &[f64], l: &[f64]) -> OracleSolution {
    let dim = 2 * n - 1;
    let mut z = DVector::<f64>::zeros(dim);
    let mut steps = 0;
    let mut gnorm = f64::INFINITY;
    while steps < 200 {
        let (u, v) = split(&z, n);
        let x: Vec<f64> = (0..n * n).map(|k| p[k] * (u[k / n] + v[k % n]).exp()).collect();
        let mut g = DVector::<f64>::zeros(dim);
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                let xij = x[i * n + j];
                g[i] += xij;
                h[(i, i)] += xij;
                if j < n - 1 {
                    g[n + j] += xij;
                    h[(n + j, n + j)] += xij;
                    h[(i, n + j)] += xij;
                    h[(n + j, i)] += xij;
                }
            }
        }
        for i in 0..n {
            g[i] -= a[i];
        }
        for j in 0..n - 1 {
            g[n + j] -= l[j];
        }
        gnorm = g.norm();
        if gnorm < 1e-15 {
            break;
        }
        let d = h.lu().solve(&(-&g)).expect("singular dual Hessian");
        let f0 = dual(p, n, a, l, &z);
        let slope = g.dot(&d);
        let mut t = 1.0;
        while !(dual(p, n, a, l, &(&z + t * &d)) <= f0 + 1e-4 * t * slope + 1e-15 * f0.abs()) {
            t *= 0.5;
            if t < 1e-12 {
                break;
            }
        }
        if t < 1e-12 {
            break;
        }
        z += t * d;
        steps += 1;
    }
    let (u, v) = split(&z, n);
    let x = (0..n * n).map(|k| p[k] * (u[k / n] + v[k % n]).exp()).collect();
    OracleSolution { x, newton_steps: steps, gradient_norm: gnorm }
}

/// `count` balance sheets of size `n` admitting a positive zero-diagonal
/// matrix, drawn from consecutive streams starting at `first_stream`.
pub fn feasible_sheets(n: usize, count: usize, seed: u64, first_stream: u64) -> Vec<interbank::BalanceSheet> {
    use interbank::netgen::{random_balance_sheet, RngStream};
    (first_stream..)
        .map(|s| random_balance_sheet(n, 1.0, &mut RngStream::new(seed, s)).unwrap())
        .filter(|bs| bs.admits_zero_diagonal())
        .take(count)
        .collect()
}
