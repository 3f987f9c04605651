//! Network data model: unit disk graphs with measured ranges, grouping
//! functions and point formations.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// One sensor node. `true_pos` is ground truth and must never be read by a localizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NodeRecord<T> {
    pub id: usize,
    #[serde(default)]
    pub line_group: Option<usize>,
    #[serde(default)]
    pub plane_group: Option<usize>,
    #[serde(rename = "pos", default, skip_serializing_if = "Option::is_none")]
    pub true_pos: Option<[T; 3]>,
    #[serde(skip)]
    pub pos1: Option<T>,
    #[serde(skip)]
    pub pos2: Option<[T; 2]>,
    #[serde(skip)]
    pub pos3: Option<[T; 3]>,
}

impl<T: Scalar> NodeRecord<T> {
    pub fn new(id: usize) -> Self {
        NodeRecord {
            id,
            line_group: None,
            plane_group: None,
            true_pos: None,
            pos1: None,
            pos2: None,
            pos3: None,
        }
    }
}

/// Undirected measured edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub dist: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NetworkInstance<T> {
    pub radius: T,
    pub nodes: Vec<NodeRecord<T>>,
    pub edges: Vec<Edge<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupLevel {
    Collinear,
    Coplanar,
}

/// Classification of an edge relative to both grouping levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// Both endpoints on the same line.
    Collinear,
    /// Same plane, different lines.
    Interlinear,
    /// Different planes.
    Interplanar,
}

/// Sorted neighbor lists with distances.
#[derive(Debug, Clone)]
pub struct Adjacency<T> {
    lists: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> Adjacency<T> {
    pub fn neighbors(&self, u: usize) -> &[(usize, T)] {
        &self.lists[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.lists[u].len()
    }

    pub fn dist(&self, u: usize, v: usize) -> Option<T> {
        let l = &self.lists[u];
        l.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| l[i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.dist(u, v).is_some()
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

impl<T: Scalar> NetworkInstance<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn adjacency(&self) -> Adjacency<T> {
        let mut lists = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            lists[e.u].push((e.v, e.dist));
            lists[e.v].push((e.u, e.dist));
        }
        for l in &mut lists {
            l.sort_by_key(|&(w, _)| w);
        }
        Adjacency { lists }
    }

    pub fn has_ground_truth(&self) -> bool {
        self.nodes.iter().any(|n| n.true_pos.is_some())
    }

    /// Ground truth restricted to the first `dim` coordinates.
    pub fn truth_formation(&self, dim: usize) -> PointFormation<T> {
        let mut f = PointFormation::new(dim, 0..self.nodes.len());
        for n in &self.nodes {
            if let Some(p) = n.true_pos {
                f.set(n.id, p[..dim].to_vec());
            }
        }
        f
    }

    pub fn group_of(&self, id: usize, level: GroupLevel) -> Option<usize> {
        match level {
            GroupLevel::Collinear => self.nodes[id].line_group,
            GroupLevel::Coplanar => self.nodes[id].plane_group,
        }
    }

    /// Grouping function at one level, `None` when that level is absent.
    pub fn grouping(&self, level: GroupLevel) -> Option<GroupingFunction> {
        let mut assignment = BTreeMap::new();
        for n in &self.nodes {
            assignment.insert(n.id, self.group_of(n.id, level)?);
        }
        GroupingFunction::new(level, assignment).ok()
    }

    pub fn classify_edge(&self, u: usize, v: usize) -> Option<EdgeClass> {
        let (a, b) = (&self.nodes[u], &self.nodes[v]);
        let plane = (a.plane_group?, b.plane_group?);
        let line = (a.line_group?, b.line_group?);
        Some(if plane.0 != plane.1 {
            EdgeClass::Interplanar
        } else if line.0 != line.1 {
            EdgeClass::Interlinear
        } else {
            EdgeClass::Collinear
        })
    }

    /// Checks every structural invariant of the instance.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.radius > T::zero()) || !self.radius.is_finite() {
            return bad("radius must be positive".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return bad(format!("node ids must be contiguous, found {} at {}", n.id, i));
            }
            if let Some(p) = n.true_pos {
                if p.iter().any(|c| !c.is_finite()) {
                    return bad(format!("node {} has non-finite position", i));
                }
            }
        }
        for level in [GroupLevel::Collinear, GroupLevel::Coplanar] {
            let set = self
                .nodes
                .iter()
                .filter(|n| self.group_of(n.id, level).is_some())
                .count();
            if set != 0 && set != self.nodes.len() {
                return bad(format!("{:?} grouping is partial", level));
            }
        }
        let slack = self.radius * T::lit(1e-12);
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.u >= e.v || e.v >= self.nodes.len() {
                return bad(format!("edge ({}, {}) must satisfy u < v < n", e.u, e.v));
            }
            if !seen.insert((e.u, e.v)) {
                return bad(format!("duplicate edge ({}, {})", e.u, e.v));
            }
            if !(e.dist > T::zero()) || e.dist > self.radius + slack {
                return bad(format!("edge ({}, {}) distance out of range", e.u, e.v));
            }
        }
        Ok(())
    }

    /// Localizer-facing view without ground truth.
    pub fn strip_ground_truth(&self) -> NetworkInstance<T> {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.true_pos = None;
        }
        out
    }

    /// Same network with node `i` renamed `perm[i]`; `perm` must be a
    /// permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Result<NetworkInstance<T>> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("relabelling is not a permutation".into()));
        }
        let mut nodes = self.nodes.clone();
        for (old, rec) in self.nodes.iter().enumerate() {
            nodes[perm[old]] = NodeRecord { id: perm[old], ..rec.clone() };
        }
        let mut edges: Vec<Edge<T>> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.u], perm[e.v]);
                Edge { u: a.min(b), v: a.max(b), dist: e.dist }
            })
            .collect();
        edges.sort_by_key(|e| (e.u, e.v));
        Ok(NetworkInstance { radius: self.radius, nodes, edges })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Map from node id to group id `1..=k` at a single level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingFunction {
    pub level: GroupLevel,
    pub assignment: BTreeMap<usize, usize>,
    pub k: usize,
}

impl GroupingFunction {
    /// Builds a grouping, renumbering nothing: ids must already be `1..=k`
    /// with no empty group.
    pub fn new(level: GroupLevel, assignment: BTreeMap<usize, usize>) -> Result<Self> {
        let k = assignment.values().copied().max().unwrap_or(0);
        let mut used = vec![false; k + 1];
        for &g in assignment.values() {
            used[g] = true;
        }
        if used.first() == Some(&true) || used.iter().skip(1).any(|u| !u) {
            return Err(Error::InvalidInput(format!(
                "group ids must be exactly 1..={k} with no empty group"
            )));
        }
        Ok(GroupingFunction {
            level,
            assignment,
            k,
        })
    }

    pub fn group(&self, id: usize) -> Option<usize> {
        self.assignment.get(&id).copied()
    }

    /// Members of every group, ascending ids, indexed by `group - 1`.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (&id, &g) in &self.assignment {
            out[g - 1].push(id);
        }
        out
    }
}

/// Positions for a set of node ids in ℝ^dim; `None` marks an unlocalized node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PointFormation<T> {
    pub dim: usize,
    pub rows: BTreeMap<usize, Option<Vec<T>>>,
}

impl<T: Scalar> PointFormation<T> {
    pub fn new(dim: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        PointFormation {
            dim,
            rows: ids.into_iter().map(|i| (i, None)).collect(),
        }
    }

    pub fn set(&mut self, id: usize, p: Vec<T>) {
        debug_assert_eq!(p.len(), self.dim);
        self.rows.insert(id, Some(p));
    }

    pub fn get(&self, id: usize) -> Option<&[T]> {
        self.rows.get(&id).and_then(|r| r.as_deref())
    }

    pub fn is_localized(&self, id: usize) -> bool {
        self.get(id).is_some()
    }

    pub fn localized_ids(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter_map(|(&i, r)| r.as_ref().map(|_| i))
            .collect()
    }

    pub fn localized_count(&self) -> usize {
        self.rows.values().filter(|r| r.is_some()).count()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest violation `| ‖p_u − p_v‖ − dist |` over edges with both ends localized.
    pub fn max_edge_residual(&self, inst: &NetworkInstance<T>) -> T {
        inst.edges
            .iter()
            .filter_map(|e| {
                let (a, b) = (self.get(e.u)?, self.get(e.v)?);
                Some((linalg::dist(a, b) - e.dist).abs())
            })
            .fold(T::zero(), T::max)
    }

    /// Pairwise distance matrix over the localized ids, in ascending id order.
    pub fn distance_matrix(&self) -> Vec<Vec<T>> {
        let pts: Vec<&[T]> = self.rows.values().filter_map(|r| r.as_deref()).collect();
        pts.iter()
            .map(|a| pts.iter().map(|b| linalg::dist(a, b)).collect())
            .collect()
    }

    /// Formation JSON: `{"<id>": [x, ...] | null}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .rows
            .iter()
            .map(|(id, r)| {
                let v = match r {
                    Some(p) => serde_json::Value::from(p.iter().map(|c| c.as_f64()).collect::<Vec<_>>()),
                    None => serde_json::Value::Null,
                };
                (id.to_string(), v)
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Hyperplane `normal · x = offset` with unit normal and canonical sign
/// (first nonzero normal component positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Hyperplane<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Hyperplane<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Result<Self> {
        let len = linalg::norm(&normal);
        if !(len > T::zero()) || !len.is_finite() {
            return Err(Error::DegeneratePoints);
        }
        let mut normal: Vec<T> = normal.iter().map(|&c| c / len).collect();
        let mut offset = offset / len;
        let tiny = T::lit(1e-12);
        if let Some(&first) = normal.iter().find(|c| c.abs() > tiny) {
            if first < T::zero() {
                normal.iter_mut().for_each(|c| *c = -*c);
                offset = -offset;
            }
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Axis-aligned hyperplane `x_axis = value`.
    pub fn axis(dim: usize, axis: usize, value: T) -> Self {
        let mut normal = vec![T::zero(); dim];
        normal[axis] = T::one();
        Hyperplane {
            normal,
            offset: value,
        }
    }

    pub fn signed_distance(&self, p: &[T]) -> T {
        linalg::dot(&self.normal, p) - self.offset
    }
}

/// Builds the unit disk graph of `points` (dimension 1 to 3) with exact distances.
pub fn build_udg<T: Scalar>(points: &[Vec<T>], radius: T) -> Result<NetworkInstance<T>> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidInput("radius must be positive and finite".into()));
    }
    let dim = points.first().map_or(1, Vec::len);
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidInput(format!("dimension {dim} not in 1..=3")));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::InvalidInput(format!("point {i} has wrong dimension")));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("point {i} is not finite")));
        }
    }
    let nodes = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut full = [T::zero(); 3];
            full[..dim].copy_from_slice(p);
            NodeRecord {
                true_pos: Some(full),
                ..NodeRecord::new(i)
            }
        })
        .collect();
    Ok(NetworkInstance {
        radius,
        nodes,
        edges: udg_edges(points, radius),
    })
}

/// All pairs at distance ≤ radius, sorted by `(u, v)`; grid-bucketed.
pub(crate) fn udg_edges<T: Scalar>(points: &[Vec<T>], radius: T) -> Vec<Edge<T>> {
    let cell = |p: &[T]| -> [i64; 3] {
        let mut c = [0i64; 3];
        for (k, &x) in p.iter().enumerate() {
            c[k] = (x / radius).floor().to_i64().unwrap_or(0);
        }
        c
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let dim = points.first().map_or(0, Vec::len);
    let mut edges = Vec::new();
    for (u, p) in points.iter().enumerate() {
        let c = cell(p);
        let span = |k: usize| if k < dim { -1..=1 } else { 0..=0 };
        for dx in span(0) {
            for dy in span(1) {
                for dz in span(2) {
                    let Some(bucket) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    for &v in bucket {
                        if v <= u {
                            continue;
                        }
                        let d = linalg::dist(p, &points[v]);
                        if d <= radius {
                            edges.push(Edge { u, v, dist: d });
                        }
                    }
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));
    edges
}
