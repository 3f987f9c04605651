use hyperplanar_core::eval::{align_isometry, bench_scaling, run_experiment, Algorithm, BenchConfig, RunOptions, Scenario};
use hyperplanar_core::Formation;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn formation(points: &[Vec<f64>]) -> Formation {
    let mut f = Formation::new(points[0].len(), 0..points.len());
    for (i, p) in points.iter().enumerate() {
        f.set(i, p.clone());
    }
    f
}

/// Closed-form planar Procrustes: best rotation angle, then the same for the
/// x-mirrored source; returns the smaller RMSE.
fn planar_oracle(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    let centre = |v: &[Vec<f64>]| {
        let n = v.len() as f64;
        let c = [v.iter().map(|a| a[0]).sum::<f64>() / n, v.iter().map(|a| a[1]).sum::<f64>() / n];
        v.iter().map(|a| [a[0] - c[0], a[1] - c[1]]).collect::<Vec<_>>()
    };
    let qc = centre(q);
    let best = |pc: &[[f64; 2]]| {
        let (mut sdot, mut scross) = (0.0, 0.0);
        for (a, b) in pc.iter().zip(&qc) {
            sdot += a[0] * b[0] + a[1] * b[1];
            scross += a[0] * b[1] - a[1] * b[0];
        }
        let t = scross.atan2(sdot);
        let (c, s) = (t.cos(), t.sin());
        let sq: f64 = pc
            .iter()
            .zip(&qc)
            .map(|(a, b)| (c * a[0] - s * a[1] - b[0]).powi(2) + (s * a[0] + c * a[1] - b[1]).powi(2))
            .sum();
        (sq / pc.len() as f64).sqrt()
    };
    let pc = centre(p);
    let mirrored: Vec<[f64; 2]> = pc.iter().map(|a| [-a[0], a[1]]).collect();
    best(&pc).min(best(&mirrored))
}

#[test]
fn translation_is_free() {
    let truth = formation(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let moved = formation(&[vec![5.0, 0.0, 0.0], vec![6.0, 0.0, 0.0], vec![5.0, 1.0, 0.0], vec![5.0, 0.0, 1.0]]);
    assert!(align_isometry(&moved, &truth).unwrap().rmse < 1e-12);
}

#[test]
fn perturbation_bounds_rmse() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| rng.random::<f64>() * 4.0).collect()).collect();
    let noisy: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            let dir: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
            let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            p.iter().zip(&dir).map(|(a, d)| a + 1e-3 * d / n).collect()
        })
        .collect();
    let clean = align_isometry(&formation(&pts), &formation(&pts)).unwrap().rmse;
    let rmse = align_isometry(&formation(&noisy), &formation(&pts)).unwrap().rmse;
    assert!(rmse <= 1e-3 && rmse >= clean);
}

proptest! {
    #[test]
    fn self_alignment_is_exact(seed in any::<u64>(), n in 4usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect()).collect();
        let a = align_isometry(&formation(&pts), &formation(&pts)).unwrap();
        prop_assert!(a.rmse < 1e-9);
        prop_assert!((a.determinant.abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_planar_oracle(seed in any::<u64>(), n in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gen = || (0..n).map(|_| vec![rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0]).collect::<Vec<_>>();
        let (p, q) = (gen(), gen());
        let got = align_isometry(&formation(&p), &formation(&q)).unwrap().rmse;
        prop_assert!((got - planar_oracle(&p, &q)).abs() < 1e-6);
    }
}

#[test]
fn flagship_head_to_head() {
    let r = run_experiment(&Scenario::flagship(), &RunOptions::default()).unwrap();
    let group = r.run(Algorithm::Group).unwrap();
    let quad = r.run(Algorithm::Quad).unwrap();
    assert_eq!(group.localized_fraction, 1.0);
    assert!(group.rmse.unwrap() < 1e-6);
    assert!(quad.localized_fraction < 1.0);
}

#[test]
fn dense_scenario_both_succeed() {
    let r = run_experiment(&Scenario::dense(), &RunOptions::default()).unwrap();
    for a in [Algorithm::Quad, Algorithm::Group] {
        let run = r.run(a).unwrap();
        assert_eq!(run.localized_fraction, 1.0, "{a:?}");
        assert!(run.rmse.unwrap() < 1e-6, "{a:?}");
    }
}

#[test]
fn experiments_are_deterministic() {
    let a = run_experiment(&Scenario::flagship(), &RunOptions::default()).unwrap();
    let b = run_experiment(&Scenario::flagship(), &RunOptions::default()).unwrap();
    let strip = |r: &hyperplanar_core::eval::ExperimentReport| r.runs.iter().map(|x| x.untimed()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bench_columns_repeat() {
    let cfg = BenchConfig {
        sizes: vec![100, 200],
        algorithms: vec![Algorithm::Group],
        ..BenchConfig::default()
    };
    let key = |rows: Vec<hyperplanar_core::eval::RunRecord>| rows.into_iter().map(|r| (r.n, r.m, r.k, r.r)).collect::<Vec<_>>();
    let a = key(bench_scaling(&cfg, &RunOptions::default()).unwrap());
    let b = key(bench_scaling(&cfg, &RunOptions::default()).unwrap());
    assert_eq!(a, b);
    assert!(a.iter().all(|&(_, _, k, r)| k == 3 && r == 12));
}
