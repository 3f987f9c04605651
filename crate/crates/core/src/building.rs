//! Deterministic scenario generation: corridor buildings and uniform clouds.
//!
//! A building floor carries `horizontal` corridors along the x axis and
//! `vertical` corridors along the y axis, evenly spread over a square
//! footprint of side `corridor_length`. Every corridor crossing gets a
//! junction so the crossing corridors share at least two interlinear
//! support nodes. Crossings listed in `connector_columns` become stairwells:
//! a five-node cluster of diameter `0.5·radius` whose nodes see the whole
//! cluster on the adjacent floors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{udg_edges, NetworkInstance, NodeRecord};
use crate::scalar::Scalar;

/// Offset of the two vertical-corridor nodes flanking a plain crossing.
const PLAIN_OFFSET: f64 = 0.35;
/// Arm length of a stairwell cluster.
const CLUSTER_OFFSET: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildingConfig {
    pub floors: usize,
    pub floor_spacing: f64,
    /// `[horizontal, vertical]` corridor counts per floor.
    pub corridors_per_floor: [usize; 2],
    pub corridor_length: f64,
    pub node_spacing: f64,
    pub radius: f64,
    /// Stairwell positions; each must coincide with a corridor crossing.
    pub connector_columns: Vec<[f64; 2]>,
    pub rng_seed: u64,
    /// Multiplicative Gaussian range noise; 0 means exact distances.
    pub noise_sigma: f64,
}

impl Default for BuildingConfig {
    fn default() -> Self {
        BuildingConfig {
            floors: 3,
            floor_spacing: 0.8,
            corridors_per_floor: [1, 1],
            corridor_length: 6.0,
            node_spacing: 0.9,
            radius: 1.0,
            connector_columns: vec![[3.0, 3.0]],
            rng_seed: 42,
            noise_sigma: 0.0,
        }
    }
}

impl BuildingConfig {
    /// The three-floor corridor building: one corridor pair per floor
    /// crossing at a single stairwell.
    pub fn flagship() -> Self {
        BuildingConfig::default()
    }

    pub fn corridor_count(&self) -> usize {
        self.corridors_per_floor[0] + self.corridors_per_floor[1]
    }

    fn crossings(&self) -> (Vec<f64>, Vec<f64>) {
        let [nh, nv] = self.corridors_per_floor;
        let l = self.corridor_length;
        let ys = (0..nh).map(|j| (j + 1) as f64 * l / (nh + 1) as f64).collect();
        let xs = (0..nv).map(|i| (i + 1) as f64 * l / (nv + 1) as f64).collect();
        (ys, xs)
    }

    fn is_stairwell(&self, x: f64, y: f64) -> bool {
        let tol = 1e-6 * self.radius;
        self.connector_columns
            .iter()
            .any(|c| (c[0] - x).abs() <= tol && (c[1] - y).abs() <= tol)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let r = self.radius;
        if !(r > 0.0) || !r.is_finite() {
            return bad("radius must be positive");
        }
        if self.floors == 0 {
            return bad("floors must be at least 1");
        }
        if self.corridor_count() == 0 {
            return bad("at least one corridor per floor is required");
        }
        if !(self.node_spacing > 0.0) || self.node_spacing > r {
            return bad("node_spacing must lie in (0, radius]");
        }
        if self.corridors_per_floor[0] > 0 && self.corridors_per_floor[1] > 0 && self.node_spacing > 0.93 * r {
            return bad("crossing junctions need node_spacing <= 0.93 * radius");
        }
        if !(self.floor_spacing > 0.0) || !self.floor_spacing.is_finite() {
            return bad("floor_spacing must be positive");
        }
        if !(self.corridor_length > 0.0) || !self.corridor_length.is_finite() {
            return bad("corridor_length must be positive");
        }
        if !(self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be non-negative");
        }
        let (ys, xs) = self.crossings();
        let gap = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let edge_gap = self.corridor_length / (self.corridors_per_floor.iter().max().unwrap() + 1) as f64;
        if gap(&ys).min(gap(&xs)) <= r {
            return bad("corridors must be more than one radius apart");
        }
        if edge_gap <= PLAIN_OFFSET * r {
            return bad("crossings must leave room for junction nodes inside the footprint");
        }
        for c in &self.connector_columns {
            let on = xs.iter().any(|&x| (x - c[0]).abs() <= 1e-6 * r) && ys.iter().any(|&y| (y - c[1]).abs() <= 1e-6 * r);
            if !on {
                return bad("connector columns must coincide with corridor crossings");
            }
        }
        Ok(())
    }
}

/// Positions along `[0, length]` that include every `required` coordinate
/// and are at most `spacing` apart. Intervals starting at a coordinate in
/// `open` are left empty (they straddle a crossing corridor).
fn fill_line(length: f64, required: &[f64], open: &[f64], spacing: f64) -> Vec<f64> {
    let mut anchors: Vec<f64> = required.to_vec();
    anchors.push(0.0);
    anchors.push(length);
    anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    anchors.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut out = vec![anchors[0]];
    for w in anchors.windows(2) {
        let skip = open.iter().any(|&o| (o - w[0]).abs() < 1e-12);
        let steps = if skip { 1 } else { ((w[1] - w[0]) / spacing - 1e-9).ceil().max(1.0) as usize };
        for s in 1..=steps {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / steps as f64);
        }
    }
    out
}

/// Generates a corridor building. Node ids run floor by floor, corridor by
/// corridor (horizontal first), along each corridor. Line groups are unique
/// across the building; plane group is the 1-based floor index.
pub fn generate_building<T: Scalar>(config: &BuildingConfig) -> Result<NetworkInstance<T>> {
    config.validate()?;
    let r = config.radius;
    let (ys, xs) = config.crossings();
    let l = config.corridor_length;
    let mut layout: Vec<(usize, [f64; 2])> = Vec::new();
    let mut corridor = 0;
    for &y in &ys {
        let mut req = Vec::new();
        for &x in &xs {
            req.push(x);
            if config.is_stairwell(x, y) {
                req.push(x - CLUSTER_OFFSET * r);
                req.push(x + CLUSTER_OFFSET * r);
            }
        }
        corridor += 1;
        layout.extend(fill_line(l, &req, &[], config.node_spacing).into_iter().map(|x| (corridor, [x, y])));
    }
    for &x in &xs {
        let (mut req, mut open) = (Vec::new(), Vec::new());
        for &y in &ys {
            let off = if config.is_stairwell(x, y) { CLUSTER_OFFSET } else { PLAIN_OFFSET } * r;
            req.push(y - off);
            req.push(y + off);
            open.push(y - off);
        }
        corridor += 1;
        layout.extend(fill_line(l, &req, &open, config.node_spacing).into_iter().map(|y| (corridor, [x, y])));
    }
    let per_floor = config.corridor_count();
    let mut nodes = Vec::new();
    let mut points = Vec::new();
    for f in 0..config.floors {
        let z = f as f64 * config.floor_spacing;
        for &(c, [x, y]) in &layout {
            let id = nodes.len();
            let pos = [T::lit(x), T::lit(y), T::lit(z)];
            nodes.push(NodeRecord {
                line_group: Some(f * per_floor + c),
                plane_group: Some(f + 1),
                true_pos: Some(pos),
                ..NodeRecord::new(id)
            });
            points.push(pos.to_vec());
        }
    }
    let radius = T::lit(r);
    let mut edges = udg_edges(&points, radius);
    if config.noise_sigma > 0.0 {
        apply_noise(&mut edges, config.noise_sigma, config.rng_seed, radius);
    }
    Ok(NetworkInstance { radius, nodes, edges })
}

fn apply_noise<T: Scalar>(edges: &mut [crate::model::Edge<T>], sigma: f64, seed: u64, radius: T) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let floor = radius * T::lit(1e-9);
    for e in edges {
        let factor = T::lit(1.0 + normal.sample(&mut rng));
        e.dist = (e.dist * factor).max(floor).min(radius);
    }
}

/// `n` points uniform in `[0, side]^dim`, reproducible from `seed`.
pub fn random_points<T: Scalar>(n: usize, dim: usize, side: f64, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| T::lit(rng.random::<f64>() * side)).collect())
        .collect()
}
