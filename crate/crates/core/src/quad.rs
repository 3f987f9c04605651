//! Baseline 3D localizer: seed tetrahedron plus queue-driven quadrilateration.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{NetworkInstance, PointFormation};
use crate::scalar::{Scalar, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SeedTetrahedron<T> {
    pub vertices: [usize; 4],
    pub positions: [Vec<T>; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct TraceEntry<T> {
    pub node: usize,
    pub position: Vec<T>,
    /// Empty for seed vertices.
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LocalizationTrace<T> {
    pub entries: Vec<TraceEntry<T>>,
    pub formation: PointFormation<T>,
    pub localized_count: usize,
}

/// Cayley–Menger determinant of a 4-point distance table, normalized by
/// the sixth power of the largest distance (scale free; equals 288·V²/D⁶).
pub fn normalized_cayley_menger<T: Scalar>(d: &[[T; 4]; 4]) -> T {
    let mut m = Matrix::zeros(5, 5);
    let mut max = T::zero();
    for i in 0..4 {
        m[(0, i + 1)] = T::one();
        m[(i + 1, 0)] = T::one();
        for j in 0..4 {
            m[(i + 1, j + 1)] = d[i][j] * d[i][j];
            max = max.max(d[i][j]);
        }
    }
    if max == T::zero() {
        return T::zero();
    }
    m.determinant() / max.powi(6)
}

/// Places four vertices in the canonical frame: origin, positive x-axis,
/// upper half of the xy-plane, positive z.
pub fn place_seed<T: Scalar>(d: &[[T; 4]; 4], tol: &Tolerances<T>) -> Result<[Vec<T>; 4]> {
    if !(normalized_cayley_menger(d) > tol.tau) {
        return Err(Error::DegenerateDistances);
    }
    let two = T::lit(2.0);
    let sq = |x: T| x * x;
    let d01 = d[0][1];
    let x2 = (sq(d01) + sq(d[0][2]) - sq(d[1][2])) / (two * d01);
    let y2 = (sq(d[0][2]) - sq(x2)).max(T::zero()).sqrt();
    if y2 <= T::zero() {
        return Err(Error::DegenerateDistances);
    }
    let x3 = (sq(d01) + sq(d[0][3]) - sq(d[1][3])) / (two * d01);
    let y3 = (sq(d[0][2]) + sq(d[0][3]) - sq(d[2][3]) - two * x2 * x3) / (two * y2);
    let z3 = (sq(d[0][3]) - sq(x3) - sq(y3)).max(T::zero()).sqrt();
    let z = T::zero();
    let pts = [vec![z, z, z], vec![d01, z, z], vec![x2, y2, z], vec![x3, y3, z3]];
    let mut worst = T::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max((linalg::dist(&pts[i], &pts[j]) - d[i][j]).abs());
        }
    }
    if worst > tol.eps {
        return Err(Error::InconsistentDistances {
            residual: worst.as_f64(),
        });
    }
    Ok(pts)
}

/// Lexicographically smallest 4-clique whose distances realize a
/// non-degenerate tetrahedron.
pub fn find_seed_k4<T: Scalar>(inst: &NetworkInstance<T>, tol: &Tolerances<T>) -> Option<SeedTetrahedron<T>> {
    let adj = inst.adjacency();
    let later = |u: usize| adj.neighbors(u).iter().map(|&(w, _)| w).filter(move |&w| w > u);
    for a in 0..inst.len() {
        for b in later(a) {
            for c in later(b).filter(|&c| adj.has_edge(a, c)) {
                for e in later(c).filter(|&e| adj.has_edge(a, e) && adj.has_edge(b, e)) {
                    let ids = [a, b, c, e];
                    let mut d = [[T::zero(); 4]; 4];
                    for i in 0..4 {
                        for j in 0..4 {
                            if i != j {
                                d[i][j] = adj.dist(ids[i], ids[j]).unwrap();
                            }
                        }
                    }
                    if let Ok(positions) = place_seed(&d, tol) {
                        return Some(SeedTetrahedron {
                            vertices: ids,
                            positions,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Position from ranges to anchors spanning ℝᵈ: pairwise sphere differences
/// give a linear least-squares system; the result is residual-checked.
pub fn multilaterate<T: Scalar>(anchors: &[Vec<T>], dists: &[T], tol: &Tolerances<T>) -> Result<Vec<T>> {
    let d = anchors.first().map_or(0, Vec::len);
    if anchors.len() != dists.len() {
        return Err(Error::InvalidInput("anchor and distance counts differ".into()));
    }
    if anchors.len() < d + 1 || linalg::affine_rank(anchors, tol.rank_cutoff()) < d {
        return Err(Error::DegenerateAnchors);
    }
    let a0 = &anchors[0];
    let n0 = linalg::dot(a0, a0);
    let two = T::lit(2.0);
    let rows: Vec<Vec<T>> = anchors[1..].iter().map(|a| linalg::scale(&linalg::sub(a, a0), two)).collect();
    let rhs: Vec<T> = anchors[1..]
        .iter()
        .zip(&dists[1..])
        .map(|(a, &di)| linalg::dot(a, a) - n0 - di * di + dists[0] * dists[0])
        .collect();
    let x = linalg::lstsq(&Matrix::from_rows(&rows), &rhs, tol.rank_cutoff()).ok_or(Error::DegenerateAnchors)?;
    let residual = anchors
        .iter()
        .zip(dists)
        .map(|(a, &di)| (linalg::dist(&x, a) - di).abs())
        .fold(T::zero(), T::max);
    if residual > tol.eps {
        return Err(Error::InconsistentDistances {
            residual: residual.as_f64(),
        });
    }
    Ok(x)
}

/// Queue-driven quadrilateration from the smallest non-degenerate K4.
///
/// Every dequeued node notifies its unlocalized neighbors; a neighbor with
/// at least four notifications whose announcing anchors span ℝ³ is solved
/// against all of them and enqueued. Nodes that never qualify stay
/// unlocalized.
pub fn quadrilaterate<T: Scalar>(inst: &NetworkInstance<T>, tol: &Tolerances<T>) -> Result<LocalizationTrace<T>> {
    let seed = find_seed_k4(inst, tol).ok_or(Error::NoSeed)?;
    let adj = inst.adjacency();
    let n = inst.len();
    let mut pos: Vec<Option<Vec<T>>> = vec![None; n];
    let mut notified: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = VecDeque::new();
    let mut entries = Vec::new();
    for (v, p) in seed.vertices.iter().zip(seed.positions.iter()) {
        pos[*v] = Some(p.clone());
        queue.push_back(*v);
        entries.push(TraceEntry {
            node: *v,
            position: p.clone(),
            anchors: vec![],
        });
    }
    let mut formation = PointFormation::new(3, 0..n);
    while let Some(u) = queue.pop_front() {
        let pu = pos[u].clone().expect("queued nodes are localized");
        formation.set(u, pu);
        for &(v, _) in adj.neighbors(u) {
            if pos[v].is_some() {
                continue;
            }
            notified[v].push(u);
            if notified[v].len() < 4 {
                continue;
            }
            let anchors: Vec<Vec<T>> = notified[v].iter().map(|&a| pos[a].clone().unwrap()).collect();
            if linalg::affine_rank(&anchors, tol.rank_cutoff()) < 3 {
                continue;
            }
            let dists: Vec<T> = notified[v].iter().map(|&a| adj.dist(v, a).unwrap()).collect();
            if let Ok(p) = multilaterate(&anchors, &dists, tol) {
                entries.push(TraceEntry {
                    node: v,
                    position: p.clone(),
                    anchors: notified[v].clone(),
                });
                pos[v] = Some(p);
                queue.push_back(v);
            }
        }
    }
    let localized_count = formation.localized_count();
    Ok(LocalizationTrace {
        entries,
        formation,
        localized_count,
    })
}
