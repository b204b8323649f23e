use interbank::contagion::{default_fraction, StressConfig};
use interbank::io;
use interbank::metrics::{constraint_deviation, kl_divergence};
use interbank::netgen::{random_ground_truth, RngStream};
use interbank::reconstruct::{ras, sras, SolverConfig};

#[test]
fn generate_save_reconstruct_stress() {
    let dir = tempfile::tempdir().unwrap();
    let gt = random_ground_truth(30, 0.3, 30.0, &mut RngStream::new(77, 0)).unwrap();
    io::save_exposures(&gt.exposures, dir.path().join("x.csv")).unwrap();
    io::save_adjacency(&gt.adjacency, dir.path().join("q.csv")).unwrap();
    io::save_balance(&gt.balance, dir.path().join("b.csv")).unwrap();

    let x = io::load_exposures(dir.path().join("x.csv")).unwrap();
    let q = io::load_adjacency(dir.path().join("q.csv")).unwrap();
    let bs = io::load_balance(dir.path().join("b.csv")).unwrap();
    assert_eq!(x, gt.exposures);
    assert_eq!(q, gt.adjacency);
    assert_eq!(bs.assets(), gt.balance.assets());
    assert_eq!(bs.liabilities(), gt.balance.liabilities());

    let cfg = SolverConfig::default();
    let norm = bs.normalized();
    let me = ras(&norm, &cfg).unwrap();
    let sme = sras(&norm, &q, &cfg).unwrap();
    assert!(me.converged() && sme.converged());
    assert!(constraint_deviation(&me.solution.scaled(30.0), &bs).unwrap() < 1e-6);
    assert!(constraint_deviation(&sme.solution.scaled(30.0), &bs).unwrap() < 1e-6);
    // the true matrix is feasible on q, so SRAS on q is at least as close to it as dense RAS
    let truth = x.scaled(1.0 / 30.0);
    let d_me = kl_divergence(&truth, &me.solution).unwrap();
    let d_sme = kl_divergence(&truth, &sme.solution).unwrap();
    assert!(d_sme < d_me, "{d_sme} vs {d_me}");

    let cfg = StressConfig::homogeneous(30, 0.01, 0.0).unwrap();
    let xi = |m: &interbank::ExposureMatrix, t: f64| default_fraction(m, &cfg.with_theta(t).unwrap()).unwrap();
    assert_eq!(xi(&x, 0.0), xi(&me.solution.scaled(30.0), 0.0));
    // dense ME spreads losses thinly and fails fewer banks at a moderate loss rate
    assert!(xi(&x, 0.05) >= xi(&me.solution.scaled(30.0), 0.05));
}
