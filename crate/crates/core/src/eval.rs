//! Accuracy up to isometry, head-to-head experiments and scaling runs.

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::building::{generate_building, random_points, BuildingConfig};
use crate::error::{Error, Result};
use crate::group::{hierarchical_localize, GroupOptions};
use crate::linalg::{self, Matrix};
use crate::model::{build_udg, GroupLevel, NetworkInstance, PointFormation};
use crate::quad::quadrilaterate;
use crate::scalar::{Scalar, Tolerances};

/// Best rigid motion (reflections allowed) taking a formation onto ground
/// truth: `truth ≈ linear·p + translation`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AlignmentResult<T> {
    pub linear: Matrix<T>,
    pub translation: Vec<T>,
    pub determinant: T,
    pub rmse: T,
    pub residuals: BTreeMap<usize, T>,
}

/// Least-squares orthogonal alignment over the nodes localized in both
/// formations (orthogonal Procrustes on the centred cross-covariance).
pub fn align_isometry<T: Scalar>(formation: &PointFormation<T>, truth: &PointFormation<T>) -> Result<AlignmentResult<T>> {
    let d = formation.dim;
    if truth.dim != d {
        return Err(Error::InvalidInput(format!("dimension mismatch: {d} vs {}", truth.dim)));
    }
    let ids: Vec<usize> = formation.localized_ids().into_iter().filter(|&id| truth.is_localized(id)).collect();
    if ids.len() < d + 1 {
        return Err(Error::TooFewPoints {
            found: ids.len(),
            needed: d + 1,
        });
    }
    let p: Vec<Vec<T>> = ids.iter().map(|&id| formation.get(id).unwrap().to_vec()).collect();
    let q: Vec<Vec<T>> = ids.iter().map(|&id| truth.get(id).unwrap().to_vec()).collect();
    let (pc, qc) = (linalg::centroid(&p), linalg::centroid(&q));
    let mut h = Matrix::zeros(d, d);
    for (a, b) in p.iter().zip(&q) {
        let (a, b) = (linalg::sub(a, &pc), linalg::sub(b, &qc));
        for i in 0..d {
            for j in 0..d {
                h[(i, j)] = h[(i, j)] + a[i] * b[j];
            }
        }
    }
    let svd = linalg::svd(&h);
    let linear = svd.v.mul(&svd.u.transpose());
    let translation = linalg::sub(&qc, &linear.mul_vec(&pc));
    let mut residuals = BTreeMap::new();
    let mut sq = T::zero();
    for ((&id, a), b) in ids.iter().zip(&p).zip(&q) {
        let r = linalg::dist(&linalg::add(&linear.mul_vec(a), &translation), b);
        sq = sq + r * r;
        residuals.insert(id, r);
    }
    let rmse = (sq / T::from_usize(ids.len()).unwrap()).sqrt();
    Ok(AlignmentResult {
        determinant: linear.determinant(),
        linear,
        translation,
        rmse,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Quad,
    Group,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Quad => "quad",
            Algorithm::Group => "group",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Building {
        name: String,
        #[serde(default)]
        config: BuildingConfig,
    },
    RandomCloud {
        name: String,
        n: usize,
        side: f64,
        radius: f64,
        seed: u64,
    },
}

impl Scenario {
    pub fn flagship() -> Self {
        Scenario::Building {
            name: "flagship".into(),
            config: BuildingConfig::flagship(),
        }
    }

    /// Compact stacked building where every corridor node sees the crossing
    /// corridor, so plain multilateration can succeed as well.
    pub fn dense() -> Self {
        Scenario::Building {
            name: "dense".into(),
            config: BuildingConfig {
                floors: 3,
                floor_spacing: 0.5,
                corridors_per_floor: [1, 1],
                corridor_length: 1.8,
                node_spacing: 0.3,
                radius: 1.0,
                connector_columns: vec![[0.9, 0.9]],
                rng_seed: 7,
                noise_sigma: 0.0,
            },
        }
    }

    pub fn random_cloud() -> Self {
        Scenario::RandomCloud {
            name: "random-cloud".into(),
            n: 50,
            side: 1.8,
            radius: 1.0,
            seed: 5,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "flagship" => Some(Self::flagship()),
            "dense" => Some(Self::dense()),
            "random-cloud" => Some(Self::random_cloud()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Scenario::Building { name, .. } | Scenario::RandomCloud { name, .. } => name,
        }
    }

    pub fn generate(&self) -> Result<NetworkInstance<f64>> {
        match self {
            Scenario::Building { config, .. } => generate_building(config),
            Scenario::RandomCloud { n, side, radius, seed, .. } => {
                if *n == 0 {
                    return Err(Error::InvalidConfig("random cloud needs n >= 1".into()));
                }
                build_udg(&random_points::<f64>(*n, 3, *side, *seed), *radius)
            }
        }
    }
}

/// One algorithm's outcome on one instance. Also a CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub scenario: String,
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub localized_fraction: f64,
    pub rmse: Option<f64>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl RunRecord {
    /// Same record with the wall time cleared, for determinism checks.
    pub fn untimed(&self) -> RunRecord {
        RunRecord {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub runs: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn run(&self, algo: Algorithm) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.algo == algo.name())
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub tol: Tolerances<f64>,
    pub timeout: Duration,
    pub warm_up: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: Tolerances::default(),
            timeout: Duration::from_secs(60),
            warm_up: false,
        }
    }
}

fn group_counts(inst: &NetworkInstance<f64>) -> (usize, usize) {
    let k = inst.grouping(GroupLevel::Coplanar).map_or(0, |g| g.k);
    let r = inst.grouping(GroupLevel::Collinear).map_or(0, |g| g.k);
    (k, r)
}

/// Runs a localizer on its own thread, giving up after `timeout`.
fn localize(algo: Algorithm, blind: NetworkInstance<f64>, tol: Tolerances<f64>, timeout: Duration) -> (Result<PointFormation<f64>>, f64) {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let start = Instant::now();
        let out = match algo {
            Algorithm::Quad => quadrilaterate(&blind, &tol).map(|t| t.formation),
            Algorithm::Group => hierarchical_localize(&blind, &GroupOptions { tol, ..GroupOptions::default() }).map(|h| h.formation),
        };
        let _ = tx.send((out, start.elapsed().as_secs_f64() * 1e3));
    });
    match rx.recv_timeout(timeout) {
        Ok(r) => r,
        Err(_) => (Err(Error::Timeout), timeout.as_secs_f64() * 1e3),
    }
}

/// Localizes one instance with one algorithm and scores it against the
/// instance's ground truth. Localizers only see the stripped instance.
pub fn run_algorithm(scenario: &str, inst: &NetworkInstance<f64>, algo: Algorithm, opts: &RunOptions) -> RunRecord {
    let (k, r) = group_counts(inst);
    let blind = inst.strip_ground_truth();
    if opts.warm_up {
        let _ = localize(algo, blind.clone(), opts.tol, opts.timeout);
    }
    let (out, ms) = localize(algo, blind, opts.tol, opts.timeout);
    let n = inst.len();
    let (fraction, rmse, error) = match out {
        Ok(f) => {
            let rmse = align_isometry(&f, &inst.truth_formation(3)).ok().map(|a| a.rmse);
            (f.localized_count() as f64 / n.max(1) as f64, rmse, None)
        }
        Err(e) => (0.0, None, Some(e.code().to_string())),
    };
    RunRecord {
        scenario: scenario.to_string(),
        algo: algo.name().to_string(),
        n,
        m: inst.edges.len(),
        k,
        r,
        localized_fraction: fraction,
        rmse,
        wall_time_ms: ms,
        error,
    }
}

/// Generates the scenario and runs both localizers on it.
pub fn run_experiment(scenario: &Scenario, opts: &RunOptions) -> Result<ExperimentReport> {
    let inst = scenario.generate()?;
    let (k, r) = group_counts(&inst);
    let runs = [Algorithm::Quad, Algorithm::Group]
        .into_iter()
        .map(|a| run_algorithm(scenario.name(), &inst, a, opts))
        .collect();
    Ok(ExperimentReport {
        scenario: scenario.name().to_string(),
        n: inst.len(),
        m: inst.edges.len(),
        k,
        r,
        runs,
    })
}

/// Runs scenarios on up to `jobs` worker threads, preserving input order.
pub fn run_experiments(scenarios: &[Scenario], opts: &RunOptions, jobs: usize) -> Vec<Result<ExperimentReport>> {
    let jobs = jobs.max(1);
    let mut out: Vec<Option<Result<ExperimentReport>>> = (0..scenarios.len()).map(|_| None).collect();
    for (chunk_idx, chunk) in scenarios.chunks(jobs).enumerate() {
        let results: Vec<Result<ExperimentReport>> = thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|sc| s.spawn(move || run_experiment(sc, opts))).collect();
            handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
        });
        for (i, r) in results.into_iter().enumerate() {
            out[chunk_idx * jobs + i] = Some(r);
        }
    }
    out.into_iter().map(Option::unwrap).collect()
}

pub const MAX_BENCH_NODES: usize = 2000;

/// Building family with `k = floors` and `r = floors · 4` groups whose
/// corridors lengthen to reach each target node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub floors: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![100, 200, 400, 800],
            floors: 3,
            algorithms: vec![Algorithm::Group, Algorithm::Quad],
            seed: 42,
        }
    }
}

impl BenchConfig {
    /// Two horizontal and two vertical corridors per floor, a stairwell at
    /// every crossing, corridor length chosen so the total is about `n`.
    pub fn building_for(&self, n: usize) -> BuildingConfig {
        let spacing = 0.9;
        let per_corridor = n as f64 / (self.floors * 4) as f64;
        let length = (per_corridor * spacing).max(3.3);
        let (a, b) = (length / 3.0, 2.0 * length / 3.0);
        BuildingConfig {
            floors: self.floors,
            floor_spacing: 0.8,
            corridors_per_floor: [2, 2],
            corridor_length: length,
            node_spacing: spacing,
            radius: 1.0,
            connector_columns: vec![[a, a], [a, b], [b, a], [b, b]],
            rng_seed: self.seed,
            noise_sigma: 0.0,
        }
    }
}

/// Wall-time sweep over the family. Timeouts and localization failures are
/// recorded in the rows; only invalid configurations are errors.
pub fn bench_scaling(cfg: &BenchConfig, opts: &RunOptions) -> Result<Vec<RunRecord>> {
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) {
        return Err(Error::InvalidConfig("bench sizes must be non-empty and positive".into()));
    }
    if let Some(&big) = cfg.sizes.iter().find(|&&n| n > MAX_BENCH_NODES) {
        return Err(Error::InvalidConfig(format!("bench size {big} exceeds {MAX_BENCH_NODES}")));
    }
    let opts = RunOptions {
        warm_up: true,
        ..opts.clone()
    };
    let mut rows = Vec::new();
    for &target in &cfg.sizes {
        let inst: NetworkInstance<f64> = generate_building(&cfg.building_for(target))?;
        let name = format!("building-{target}");
        for &algo in &cfg.algorithms {
            rows.push(run_algorithm(&name, &inst, algo, &opts));
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "scenario,algo,n,m,k,r,localized_fraction,rmse,wall_time_ms,error";

pub fn to_csv(rows: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.3},{}\n",
            r.scenario,
            r.algo,
            r.n,
            r.m,
            r.k,
            r.r,
            r.localized_fraction,
            r.rmse.map_or(String::new(), |x| format!("{x:e}")),
            r.wall_time_ms,
            r.error.as_deref().unwrap_or("")
        ));
    }
    out
}

/// Least-squares slope of `ln(time)` against `ln(n)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formation(points: &[[f64; 2]]) -> PointFormation<f64> {
        let mut f = PointFormation::new(2, 0..points.len());
        for (i, p) in points.iter().enumerate() {
            f.set(i, p.to_vec());
        }
        f
    }

    #[test]
    fn reflection_aligns_exactly() {
        let truth = formation(&[[0.0, 0.0], [1.0, 0.0], [0.3, 2.0], [2.0, 1.5]]);
        let mirrored = formation(&[[0.0, 0.0], [-1.0, 0.0], [-0.3, 2.0], [-2.0, 1.5]]);
        let a = align_isometry(&mirrored, &truth).unwrap();
        assert!(a.rmse < 1e-12);
        assert!((a.determinant + 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let f = formation(&[[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(align_isometry(&f, &f).unwrap_err().code(), "too-few-points");
    }

    #[test]
    fn empty_bench_rejected() {
        let cfg = BenchConfig {
            sizes: vec![0],
            ..BenchConfig::default()
        };
        assert_eq!(bench_scaling(&cfg, &RunOptions::default()).unwrap_err().code(), "invalid-config");
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
    }
}
