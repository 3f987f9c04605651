//! Group-aware localization: 1D embedding of collinear groups, placement
//! of hyperplanar groups relative to each other, and the corridor → floor
//! → building driver.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{unit_interval_order, Graph, LinearOrder};
use crate::linalg::{self, Matrix};
use crate::model::{Adjacency, GroupLevel, GroupingFunction, Hyperplane, NetworkInstance, PointFormation};
use crate::quad::multilaterate;
use crate::scalar::{Scalar, Tolerances};

/// Distance-preserving affine map ℝᵈ⁻¹ → ℝᵈ: `x ↦ linear·x + translation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct GroupTransform<T> {
    /// `d × (d−1)` with orthonormal columns.
    pub linear: Matrix<T>,
    pub translation: Vec<T>,
}

impl<T: Scalar> GroupTransform<T> {
    /// Embeds ℝᵈ⁻¹ as the coordinate hyperplane `x_d = 0`.
    pub fn canonical(d: usize) -> Self {
        let mut linear = Matrix::zeros(d, d - 1);
        for i in 0..d - 1 {
            linear[(i, i)] = T::one();
        }
        GroupTransform {
            linear,
            translation: vec![T::zero(); d],
        }
    }

    pub fn apply(&self, local: &[T]) -> Vec<T> {
        linalg::add(&self.linear.mul_vec(local), &self.translation)
    }

    /// Largest deviation of `linearᵀ·linear` from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let g = self.linear.transpose().mul(&self.linear);
        let mut worst = T::zero();
        for i in 0..g.rows {
            for j in 0..g.cols {
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - want).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupStatus {
    Unlocalized,
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportKind {
    /// Fixed by anchors spanning ℝᵈ.
    Unique,
    /// One of a mirror pair across the anchors' hyperplane.
    Mirror,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SupportVertex<T> {
    pub node: usize,
    pub position: Vec<T>,
    pub kind: SupportKind,
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct GroupLocalState<T> {
    pub group: usize,
    pub status: GroupStatus,
    pub seed: bool,
    pub support_vertices: Vec<SupportVertex<T>>,
    pub plane: Option<Hyperplane<T>>,
    pub transform: Option<GroupTransform<T>>,
}

/// Localized-neighbor announcements received by each node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NotificationCounter {
    anchors: HashMap<usize, Vec<usize>>,
}

impl NotificationCounter {
    pub fn notify(&mut self, node: usize, from: usize) {
        let list = self.anchors.entry(node).or_default();
        if !list.contains(&from) {
            list.push(from);
        }
    }

    pub fn count(&self, node: usize) -> usize {
        self.anchors.get(&node).map_or(0, Vec::len)
    }

    pub fn anchors(&self, node: usize) -> &[usize] {
        self.anchors.get(&node).map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct GroupLocalization<T> {
    pub seed_group: usize,
    pub formation: PointFormation<T>,
    pub groups: Vec<GroupLocalState<T>>,
}

/// How the seed group of each placement stage is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedRule {
    /// Largest group, smallest id on ties.
    #[default]
    Largest,
    /// This group id; an error if the stage has no such group.
    Fixed(usize),
    /// The `i`-th group in ascending id order, wrapping around.
    Nth(usize),
}

#[derive(Debug, Clone)]
pub struct GroupOptions<T> {
    pub tol: Tolerances<T>,
    pub seed: SeedRule,
    /// Maximum number of explored mirror branches.
    pub branch_budget: usize,
}

impl<T: Scalar> Default for GroupOptions<T> {
    fn default() -> Self {
        GroupOptions {
            tol: Tolerances::default(),
            seed: SeedRule::Largest,
            branch_budget: 64,
        }
    }
}

/// 1D formation of a path: prefix sums of the edge weights from 0.
pub fn localize_path<T: Scalar>(path: &LinearOrder, weights: &[T]) -> PointFormation<T> {
    let mut f = PointFormation::new(1, path.sequence.iter().copied());
    let mut at = T::zero();
    for (i, &v) in path.sequence.iter().enumerate() {
        if i > 0 {
            at = at + weights[i - 1];
        }
        f.set(v, vec![at]);
    }
    f
}

/// 1D formation of one collinear group.
///
/// The three-sweep order gives a Hamiltonian path; walking it and picking
/// the side of each step that agrees with already placed neighbors yields
/// the geometric left-to-right order, which is then embedded by prefix sums
/// and every chord is checked.
pub fn localize_collinear_group<T: Scalar>(adj: &Adjacency<T>, members: &[usize], tol: &Tolerances<T>) -> Result<PointFormation<T>> {
    let g = Graph::induced(adj, members);
    if !g.is_connected() {
        return Err(Error::NoHamiltonianPath);
    }
    let order = unit_interval_order(&g)?;
    let seq = &order.sequence;
    let mut coord: HashMap<usize, T> = HashMap::new();
    let Some(&first) = seq.first() else {
        return Ok(PointFormation::new(1, []));
    };
    coord.insert(first, T::zero());
    let mut dir = T::one();
    for w in seq.windows(2) {
        let (prev, v) = (w[0], w[1]);
        let step = adj.dist(prev, v).expect("consecutive vertices are adjacent");
        let placed: Vec<(usize, T, T)> = adj
            .neighbors(v)
            .iter()
            .filter_map(|&(a, d)| coord.get(&a).map(|&c| (a, c, d)))
            .collect();
        let error = |c: T| placed.iter().map(|&(_, p, d)| ((c - p).abs() - d).abs()).fold(T::zero(), T::max);
        let base = coord[&prev];
        let (fwd, back) = (base + dir * step, base - dir * step);
        let (ef, eb) = (error(fwd), error(back));
        let pick = if ef <= tol.eps || ef <= eb { fwd } else { back };
        let worst = error(pick);
        if worst > tol.eps {
            let (a, p, d) = placed
                .iter()
                .copied()
                .max_by(|x, y| ((pick - x.1).abs() - x.2).abs().partial_cmp(&((pick - y.1).abs() - y.2).abs()).unwrap())
                .unwrap();
            return Err(Error::ChordInconsistency {
                u: a.min(v),
                v: a.max(v),
                measured: d.as_f64(),
                embedded: (pick - p).abs().as_f64(),
            });
        }
        dir = if pick >= base { T::one() } else { -T::one() };
        coord.insert(v, pick);
    }
    let mut sorted = seq.clone();
    sorted.sort_by(|a, b| coord[a].partial_cmp(&coord[b]).unwrap());
    let mut weights = Vec::with_capacity(sorted.len());
    for w in sorted.windows(2) {
        weights.push(adj.dist(w[0], w[1]).ok_or(Error::NoHamiltonianPath)?);
    }
    let f = localize_path(&LinearOrder { sequence: sorted }, &weights);
    for &u in members {
        for &(v, d) in adj.neighbors(u) {
            if v <= u || f.get(v).is_none() {
                continue;
            }
            let embedded = (f.get(u).unwrap()[0] - f.get(v).unwrap()[0]).abs();
            if (embedded - d).abs() > tol.eps {
                return Err(Error::ChordInconsistency {
                    u,
                    v,
                    measured: d.as_f64(),
                    embedded: embedded.as_f64(),
                });
            }
        }
    }
    Ok(f)
}

/// Candidate positions of a node from ranges to localized anchors in ℝᵈ:
/// one point when the anchors span ℝᵈ, the mirror pair across their flat
/// when they span only a hyperplane.
pub fn localize_support_vertex<T: Scalar>(anchors: &[Vec<T>], dists: &[T], tol: &Tolerances<T>) -> Result<Vec<Vec<T>>> {
    let d = anchors.first().map_or(0, Vec::len);
    if d == 0 || anchors.len() < d || anchors.len() != dists.len() {
        return Err(Error::DegenerateAnchors);
    }
    let rank = linalg::affine_rank(anchors, tol.rank_cutoff());
    if rank == d && anchors.len() > d {
        return multilaterate(anchors, dists, tol).map(|p| vec![p]);
    }
    if rank + 1 != d {
        return Err(Error::DegenerateAnchors);
    }
    let a0 = &anchors[0];
    let diffs: Vec<Vec<T>> = anchors[1..].iter().map(|a| linalg::sub(a, a0)).collect();
    let svd = linalg::svd(&Matrix::from_rows(&diffs));
    let basis: Vec<Vec<T>> = (0..d - 1).map(|j| svd.v.col(j)).collect();
    let normal = Hyperplane::new(svd.v.col(d - 1), T::zero())?.normal;
    // In-flat coordinates of the anchors relative to a0.
    let q: Vec<Vec<T>> = diffs.iter().map(|df| basis.iter().map(|b| linalg::dot(df, b)).collect()).collect();
    let two = T::lit(2.0);
    let rows: Vec<Vec<T>> = q.iter().map(|qi| linalg::scale(qi, two)).collect();
    let rhs: Vec<T> = q
        .iter()
        .zip(&dists[1..])
        .map(|(qi, &di)| linalg::dot(qi, qi) - di * di + dists[0] * dists[0])
        .collect();
    let foot = linalg::lstsq(&Matrix::from_rows(&rows), &rhs, tol.rank_cutoff()).ok_or(Error::DegenerateAnchors)?;
    let d0_sq = dists[0] * dists[0];
    let h_sq = d0_sq - linalg::dot(&foot, &foot);
    // On the anchors' flat h is pure roundoff whose square root would be
    // far larger than eps; the two candidates coincide there.
    let h = if h_sq <= T::lit(64.0) * T::epsilon() * d0_sq { T::zero() } else { h_sq.sqrt() };
    let mut base = a0.clone();
    for (b, &c) in basis.iter().zip(&foot) {
        base = linalg::add(&base, &linalg::scale(b, c));
    }
    let mut cands = vec![linalg::add(&base, &linalg::scale(&normal, h))];
    if h > T::zero() {
        cands.push(linalg::sub(&base, &linalg::scale(&normal, h)));
    }
    let residual = anchors
        .iter()
        .zip(dists)
        .map(|(a, &di)| (linalg::dist(&cands[0], a) - di).abs())
        .fold(T::zero(), T::max);
    if residual > tol.eps {
        return Err(Error::InconsistentDistances {
            residual: residual.as_f64(),
        });
    }
    Ok(cands)
}

/// The hyperplane through `d` affinely independent points of ℝᵈ.
pub fn fit_hyperplane<T: Scalar>(points: &[Vec<T>], tol: &Tolerances<T>) -> Result<Hyperplane<T>> {
    let d = points.first().map_or(0, Vec::len);
    if d == 0 || points.len() != d {
        return Err(Error::DegeneratePoints);
    }
    if d == 1 {
        return Hyperplane::new(vec![T::one()], points[0][0]);
    }
    if linalg::affine_rank(points, tol.rank_cutoff()) != d - 1 {
        return Err(Error::DegeneratePoints);
    }
    let diffs: Vec<Vec<T>> = points[1..].iter().map(|p| linalg::sub(p, &points[0])).collect();
    let normal = linalg::svd(&Matrix::from_rows(&diffs)).v.col(d - 1);
    let offset = linalg::dot(&normal, &points[0]);
    Hyperplane::new(normal, offset)
}

/// Isometric map sending `local[i]` (ℝᵈ⁻¹) onto `ambient[i]` (ℝᵈ).
pub fn compute_group_transform<T: Scalar>(local: &[Vec<T>], ambient: &[Vec<T>], tol: &Tolerances<T>) -> Result<GroupTransform<T>> {
    let d = ambient.first().map_or(0, Vec::len);
    if d < 2 || local.len() != d || ambient.len() != d || local.iter().any(|p| p.len() != d - 1) {
        return Err(Error::DegenerateSupports);
    }
    let mut mismatch = T::zero();
    for i in 0..d {
        for j in i + 1..d {
            let m = (linalg::dist(&local[i], &local[j]) - linalg::dist(&ambient[i], &ambient[j])).abs();
            mismatch = mismatch.max(m);
        }
    }
    if mismatch > tol.eps {
        return Err(Error::NonIsometric {
            mismatch: mismatch.as_f64(),
        });
    }
    let ldiff: Vec<Vec<T>> = local[1..].iter().map(|p| linalg::sub(p, &local[0])).collect();
    let adiff: Vec<Vec<T>> = ambient[1..].iter().map(|p| linalg::sub(p, &ambient[0])).collect();
    if linalg::orthonormalize(&ldiff, tol.rank_cutoff()).is_none() {
        return Err(Error::DegenerateSupports);
    }
    // Columns are the difference vectors.
    let l = Matrix::from_rows(&ldiff).transpose();
    let a = Matrix::from_rows(&adiff).transpose();
    let raw = a.mul(&l.inverse().ok_or(Error::DegenerateSupports)?);
    // Nearest matrix with orthonormal columns (polar factor).
    let svd = linalg::svd(&raw);
    let stretch = svd.s.iter().map(|&s| (s - T::one()).abs()).fold(T::zero(), T::max);
    let linear = svd.u.mul(&svd.v.transpose());
    let mut translation = vec![T::zero(); d];
    let n = T::from_usize(d).unwrap();
    for (lp, ap) in local.iter().zip(ambient) {
        let r = linalg::sub(ap, &linear.mul_vec(lp));
        translation = linalg::add(&translation, &linalg::scale(&r, T::one() / n));
    }
    let t = GroupTransform { linear, translation };
    let fit = local
        .iter()
        .zip(ambient)
        .map(|(lp, ap)| linalg::dist(&t.apply(lp), ap))
        .fold(T::zero(), T::max);
    if fit > tol.eps || stretch > tol.rank_cutoff() {
        return Err(Error::NonIsometric {
            mismatch: fit.max(stretch).as_f64(),
        });
    }
    Ok(t)
}

struct Ctx<'a, T> {
    adj: &'a Adjacency<T>,
    groups: &'a BTreeMap<usize, Vec<usize>>,
    group_of: HashMap<usize, usize>,
    local: &'a BTreeMap<usize, PointFormation<T>>,
    d: usize,
    radius: T,
    tol: Tolerances<T>,
}

#[derive(Clone)]
struct State<T> {
    pos: HashMap<usize, Vec<T>>,
    groups: BTreeMap<usize, GroupLocalState<T>>,
    notified: NotificationCounter,
}

#[derive(Clone)]
struct Placement<T> {
    supports: Vec<SupportVertex<T>>,
    transform: GroupTransform<T>,
    positions: Vec<(usize, Vec<T>)>,
}

enum Attempt<T> {
    NotReady,
    Conflict(T),
    Options(Vec<Placement<T>>),
}

enum Halt {
    Conflict { group: usize, residual: f64 },
    Fatal(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Fatal(e)
    }
}

impl<'a, T: Scalar> Ctx<'a, T> {
    fn local_pos(&self, g: usize, u: usize) -> Result<Vec<T>> {
        self.local
            .get(&g)
            .and_then(|f| f.get(u))
            .map(<[T]>::to_vec)
            .ok_or_else(|| Error::InvalidInput(format!("node {u} has no local position in group {g}")))
    }

    fn apply(&self, state: &mut State<T>, g: usize, p: Placement<T>, seed: bool) -> Result<()> {
        let plane = if seed {
            Some(Hyperplane::axis(self.d, self.d - 1, T::zero()))
        } else {
            let pts: Vec<Vec<T>> = p.supports.iter().map(|s| s.position.clone()).collect();
            Some(fit_hyperplane(&pts, &self.tol)?)
        };
        for (u, x) in &p.positions {
            state.pos.insert(*u, x.clone());
        }
        for (u, _) in &p.positions {
            for &(v, _) in self.adj.neighbors(*u) {
                if self.group_of.get(&v).is_some_and(|&h| h != g) && !state.pos.contains_key(&v) {
                    state.notified.notify(v, *u);
                }
            }
        }
        state.groups.insert(
            g,
            GroupLocalState {
                group: g,
                status: GroupStatus::Localized,
                seed,
                support_vertices: p.supports,
                plane,
                transform: Some(p.transform),
            },
        );
        Ok(())
    }

    fn attempt(&self, state: &State<T>, g: usize) -> Result<Attempt<T>> {
        let d = self.d;
        let members = &self.groups[&g];
        let mut supports: Vec<(usize, Vec<Vec<T>>, Vec<usize>)> = Vec::new();
        for &u in members {
            let ids = state.notified.anchors(u);
            if ids.len() < d {
                continue;
            }
            let pts: Vec<Vec<T>> = ids.iter().map(|a| state.pos[a].clone()).collect();
            let dists: Vec<T> = ids.iter().map(|&a| self.adj.dist(u, a).unwrap()).collect();
            match localize_support_vertex(&pts, &dists, &self.tol) {
                Ok(c) => supports.push((u, c, ids.to_vec())),
                Err(Error::InconsistentDistances { residual }) => return Ok(Attempt::Conflict(T::lit(residual))),
                Err(_) => {}
            }
        }
        supports.sort_by_key(|(u, c, _)| (c.len(), *u));
        let mut chosen: Vec<(usize, Vec<Vec<T>>, Vec<usize>)> = Vec::new();
        let mut chosen_local: Vec<Vec<T>> = Vec::new();
        for s in supports {
            if chosen.len() == d {
                break;
            }
            let lp = self.local_pos(g, s.0)?;
            chosen_local.push(lp);
            if linalg::affine_rank(&chosen_local, self.tol.rank_cutoff()) + 1 == chosen_local.len() {
                chosen.push(s);
            } else {
                chosen_local.pop();
            }
        }
        if chosen.len() < d {
            return Ok(Attempt::NotReady);
        }
        let locals: Vec<(usize, Vec<T>)> = members.iter().map(|&u| Ok((u, self.local_pos(g, u)?))).collect::<Result<_>>()?;
        let grid = Grid::new(&state.pos, self.radius);
        let mut options: Vec<Placement<T>> = Vec::new();
        let mut best = T::infinity();
        let combos: usize = chosen.iter().map(|s| s.1.len()).product();
        for mut code in 0..combos {
            let mut ambient = Vec::with_capacity(d);
            for s in &chosen {
                ambient.push(s.1[code % s.1.len()].clone());
                code /= s.1.len();
            }
            let Ok(transform) = compute_group_transform(&chosen_local, &ambient, &self.tol) else {
                continue;
            };
            let positions: Vec<(usize, Vec<T>)> = locals.iter().map(|(u, lp)| (*u, transform.apply(lp))).collect();
            let violation = self.violation(state, &grid, &positions);
            best = best.min(violation);
            if violation > self.tol.eps {
                continue;
            }
            let duplicate = options.iter().any(|o| {
                o.positions
                    .iter()
                    .zip(&positions)
                    .all(|((_, a), (_, b))| linalg::dist(a, b) <= self.tol.eps.sqrt())
            });
            if duplicate {
                continue;
            }
            let supports = chosen
                .iter()
                .zip(&ambient)
                .map(|((u, c, ids), p)| SupportVertex {
                    node: *u,
                    position: p.clone(),
                    kind: if c.len() == 1 { SupportKind::Unique } else { SupportKind::Mirror },
                    anchors: ids.clone(),
                })
                .collect();
            options.push(Placement {
                supports,
                transform,
                positions,
            });
        }
        Ok(if options.is_empty() {
            Attempt::Conflict(best)
        } else {
            Attempt::Options(options)
        })
    }

    /// Worst violation of measured edges to localized nodes, and of the
    /// unit-disk non-edge condition (non-neighbors lie beyond the radius).
    fn violation(&self, state: &State<T>, grid: &Grid<T>, positions: &[(usize, Vec<T>)]) -> T {
        let mut worst = T::zero();
        for (u, p) in positions {
            for &(v, dist) in self.adj.neighbors(*u) {
                if let Some(q) = state.pos.get(&v) {
                    worst = worst.max((linalg::dist(p, q) - dist).abs());
                }
            }
            for v in grid.near(p) {
                if self.adj.has_edge(*u, v) {
                    continue;
                }
                let gap = self.radius - linalg::dist(p, &state.pos[&v]);
                if gap > self.tol.eps {
                    worst = worst.max(gap);
                }
            }
        }
        worst
    }

    fn run(&self, mut state: State<T>, budget: &mut usize) -> std::result::Result<State<T>, Halt> {
        loop {
            let mut ambiguous: Option<(usize, Vec<Placement<T>>)> = None;
            let mut placed = false;
            let pending: Vec<usize> = self.groups.keys().copied().filter(|g| !state.groups.contains_key(g)).collect();
            for g in pending {
                match self.attempt(&state, g)? {
                    Attempt::NotReady => {}
                    Attempt::Conflict(r) => {
                        return Err(Halt::Conflict {
                            group: g,
                            residual: r.as_f64(),
                        })
                    }
                    Attempt::Options(mut opts) if opts.len() == 1 => {
                        self.apply(&mut state, g, opts.pop().unwrap(), false)?;
                        placed = true;
                        break;
                    }
                    Attempt::Options(opts) => {
                        if ambiguous.is_none() {
                            ambiguous = Some((g, opts));
                        }
                    }
                }
            }
            if placed {
                continue;
            }
            let Some((g, options)) = ambiguous else {
                return Ok(state);
            };
            let localized: Vec<Vec<T>> = state.pos.values().cloned().collect();
            if linalg::affine_rank(&localized, self.tol.rank_cutoff()) < self.d {
                // Everything placed so far lies in one hyperplane: its mirror
                // is a global isometry, so either choice is equivalent.
                self.apply(&mut state, g, options.into_iter().next().unwrap(), false)?;
                continue;
            }
            let mut complete: Vec<State<T>> = Vec::new();
            for option in options {
                if *budget == 0 {
                    return Err(Halt::Fatal(Error::AmbiguousPlacement { group: g }));
                }
                *budget -= 1;
                let mut branch = state.clone();
                self.apply(&mut branch, g, option, false)?;
                match self.run(branch, budget) {
                    Ok(s) => complete.push(s),
                    Err(Halt::Conflict { .. }) => {}
                    Err(fatal) => return Err(fatal),
                }
            }
            let most = complete.iter().map(|s| s.pos.len()).max().unwrap_or(0);
            complete.retain(|s| s.pos.len() == most);
            return match complete.len() {
                0 => Err(Halt::Conflict { group: g, residual: 0.0 }),
                1 => Ok(complete.pop().unwrap()),
                _ => Err(Halt::Fatal(Error::AmbiguousPlacement { group: g })),
            };
        }
    }
}

/// Uniform grid over localized positions with cell size = radius.
struct Grid<T> {
    cells: HashMap<[i64; 3], Vec<usize>>,
    radius: T,
}

impl<T: Scalar> Grid<T> {
    fn key(p: &[T], radius: T) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (i, &c) in p.iter().enumerate().take(3) {
            k[i] = (c / radius).floor().to_i64().unwrap_or(0);
        }
        k
    }

    fn new(pos: &HashMap<usize, Vec<T>>, radius: T) -> Self {
        let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (&u, p) in pos {
            cells.entry(Self::key(p, radius)).or_default().push(u);
        }
        Grid { cells, radius }
    }

    fn near<'s>(&'s self, p: &[T]) -> impl Iterator<Item = usize> + 's {
        let k = Self::key(p, self.radius);
        let dim = p.len();
        let span = move |i: usize| if i < dim { -1i64..=1 } else { 0..=0 };
        let mut keys = Vec::with_capacity(27);
        for a in span(0) {
            for b in span(1) {
                for c in span(2) {
                    keys.push([k[0] + a, k[1] + b, k[2] + c]);
                }
            }
        }
        keys.into_iter().filter_map(move |key| self.cells.get(&key)).flatten().copied()
    }
}

/// Places every group given its `(d−1)`-dimensional local formation.
///
/// The seed group is embedded as `x_d = 0`. Any unlocalized group with `d`
/// support vertices (nodes whose localized neighbors pin them to one point
/// or a mirror pair) is placed by an isometric transform; sign combinations
/// are filtered by support distances, measured cross edges and the unit
/// disk non-edge condition. Placement repeats until no group progresses.
pub fn localize_groups<T: Scalar>(
    inst: &NetworkInstance<T>,
    grouping: &GroupingFunction,
    local_formations: &BTreeMap<usize, PointFormation<T>>,
    d: usize,
    opts: &GroupOptions<T>,
) -> Result<GroupLocalization<T>> {
    let groups: BTreeMap<usize, Vec<usize>> = grouping.members().into_iter().enumerate().map(|(i, m)| (i + 1, m)).collect();
    localize_group_set(inst.radius, &inst.adjacency(), &groups, local_formations, d, opts)
}

pub(crate) fn localize_group_set<T: Scalar>(
    radius: T,
    adj: &Adjacency<T>,
    groups: &BTreeMap<usize, Vec<usize>>,
    local_formations: &BTreeMap<usize, PointFormation<T>>,
    d: usize,
    opts: &GroupOptions<T>,
) -> Result<GroupLocalization<T>> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("group localization needs d in 2..=3, got {d}")));
    }
    if groups.is_empty() {
        return Err(Error::InvalidInput("no groups".into()));
    }
    let ctx = Ctx {
        adj,
        groups,
        group_of: groups.iter().flat_map(|(&g, m)| m.iter().map(move |&u| (u, g))).collect(),
        local: local_formations,
        d,
        radius,
        tol: opts.tol,
    };
    let seed = match opts.seed {
        SeedRule::Fixed(s) if groups.contains_key(&s) => s,
        SeedRule::Fixed(s) => return Err(Error::InvalidInput(format!("unknown seed group {s}"))),
        SeedRule::Nth(i) => *groups.keys().nth(i % groups.len()).unwrap(),
        SeedRule::Largest => *groups.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0))).unwrap().0,
    };
    let mut state = State {
        pos: HashMap::new(),
        groups: BTreeMap::new(),
        notified: NotificationCounter::default(),
    };
    let canonical = GroupTransform::canonical(d);
    let positions = groups[&seed]
        .iter()
        .map(|&u| Ok((u, canonical.apply(&ctx.local_pos(seed, u)?))))
        .collect::<Result<Vec<_>>>()?;
    ctx.apply(
        &mut state,
        seed,
        Placement {
            supports: vec![],
            transform: canonical,
            positions,
        },
        true,
    )?;
    let mut budget = opts.branch_budget;
    let state = match ctx.run(state, &mut budget) {
        Ok(s) => s,
        Err(Halt::Fatal(e)) => return Err(e),
        Err(Halt::Conflict { group, residual }) => {
            return Err(Error::InconsistentDistances { residual }.in_stage("place-group", Some(group)));
        }
    };
    if groups.len() > 1 && state.groups.len() == 1 {
        let first = groups.keys().copied().find(|&g| g != seed);
        return Err(Error::NotLocalizable { group: first });
    }
    let mut formation = PointFormation::new(d, groups.values().flatten().copied());
    for (&u, p) in &state.pos {
        formation.set(u, p.clone());
    }
    let reports = groups
        .keys()
        .map(|&g| {
            state.groups.get(&g).cloned().unwrap_or(GroupLocalState {
                group: g,
                status: GroupStatus::Unlocalized,
                seed: false,
                support_vertices: vec![],
                plane: None,
                transform: None,
            })
        })
        .collect();
    Ok(GroupLocalization {
        seed_group: seed,
        formation,
        groups: reports,
    })
}

/// Positions produced at each level of the corridor → floor → building
/// hierarchy.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct HierarchicalResult<T> {
    /// 1D formation per line group.
    pub corridors: BTreeMap<usize, PointFormation<T>>,
    /// 2D formation per plane group.
    pub floors: BTreeMap<usize, PointFormation<T>>,
    pub floor_placements: BTreeMap<usize, GroupLocalization<T>>,
    pub building: GroupLocalization<T>,
    /// Final 3D formation (same as `building.formation`).
    pub formation: PointFormation<T>,
}

impl<T: Scalar> HierarchicalResult<T> {
    /// Copies the per-level positions into the node records.
    pub fn write_node_positions(&self, inst: &mut NetworkInstance<T>) {
        for node in &mut inst.nodes {
            let find = |m: &BTreeMap<usize, PointFormation<T>>| m.values().find_map(|f| f.get(node.id).map(<[T]>::to_vec));
            node.pos1 = find(&self.corridors).map(|p| p[0]);
            node.pos2 = find(&self.floors).map(|p| [p[0], p[1]]);
            node.pos3 = self.formation.get(node.id).map(|p| [p[0], p[1], p[2]]);
        }
    }
}

/// Localizes a building from its two grouping levels: every corridor on its
/// own, then the corridors of each floor, then the floors.
pub fn hierarchical_localize<T: Scalar>(inst: &NetworkInstance<T>, opts: &GroupOptions<T>) -> Result<HierarchicalResult<T>> {
    let lines = inst
        .grouping(GroupLevel::Collinear)
        .ok_or_else(|| Error::InvalidInput("instance has no line groups".into()))?;
    let planes = inst
        .grouping(GroupLevel::Coplanar)
        .ok_or_else(|| Error::InvalidInput("instance has no plane groups".into()))?;
    let adj = inst.adjacency();
    let tol = &opts.tol;

    let mut corridors = BTreeMap::new();
    let mut by_floor: BTreeMap<usize, BTreeMap<usize, Vec<usize>>> = BTreeMap::new();
    for (i, members) in lines.members().into_iter().enumerate() {
        let c = i + 1;
        let f = localize_collinear_group(&adj, &members, tol).map_err(|e| e.in_stage("collinear", Some(c)))?;
        corridors.insert(c, f);
        let floor = planes.group(members[0]).unwrap();
        if members.iter().any(|&u| planes.group(u) != Some(floor)) {
            return Err(Error::InvalidInput(format!("line group {c} spans several plane groups")));
        }
        by_floor.entry(floor).or_default().insert(c, members);
    }

    let mut floors = BTreeMap::new();
    let mut floor_placements = BTreeMap::new();
    for (&floor, groups) in &by_floor {
        let placed = localize_group_set(inst.radius, &adj, groups, &corridors, 2, opts).map_err(|e| e.in_stage("coplanar", Some(floor)))?;
        if let Some(g) = placed.groups.iter().find(|g| g.status == GroupStatus::Unlocalized) {
            return Err(Error::NotLocalizable { group: Some(g.group) }.in_stage("coplanar", Some(floor)));
        }
        floors.insert(floor, placed.formation.clone());
        floor_placements.insert(floor, placed);
    }

    let floor_groups: BTreeMap<usize, Vec<usize>> = planes.members().into_iter().enumerate().map(|(i, m)| (i + 1, m)).collect();
    let building = localize_group_set(inst.radius, &adj, &floor_groups, &floors, 3, opts).map_err(|e| e.in_stage("building", None))?;
    if let Some(g) = building.groups.iter().find(|g| g.status == GroupStatus::Unlocalized) {
        return Err(Error::NotLocalizable { group: Some(g.group) }.in_stage("building", None));
    }
    let formation = building.formation.clone();
    let residual = formation.max_edge_residual(inst);
    if residual > tol.eps {
        return Err(Error::InconsistentDistances {
            residual: residual.as_f64(),
        });
    }
    Ok(HierarchicalResult {
        corridors,
        floors,
        floor_placements,
        building,
        formation,
    })
}
