//! Reduction gadget from 3-uniform hypergraph 2-colouring to hyperplanar
//! grouping, its 3D lift, and brute-force checkers.
//!
//! Layout (radius 1): a main line `y = 0` with a two-node support line at
//! `y = 0.3` over its left end, one vertical vertex line per hypergraph
//! vertex, and per hyperedge `f` a red line `y = +y_f` and a blue line
//! `y = -y_f`. For every `x ∈ f` the vertex line carries a flag (a pair of
//! apexes straddling it) on the red line of `f`. Flipping a vertex line
//! upside down moves all its flags to the blue side; flipping it left to
//! right swaps the apexes. Each edge line also holds one isolated probe
//! node that must sit at a slot next to a member vertex line whose flag is
//! absent from that line. Both probes of `f` fit iff `f` is not
//! monochromatic.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{udg_edges, Adjacency, Hyperplane, NetworkInstance, NodeRecord};

pub const MAX_VERTICES: usize = 8;
pub const MAX_EDGES: usize = 8;
pub const MAX_COLORING_VERTICES: usize = 20;

pub const VERTEX_LINE_SPACING: f64 = 2.9;
pub const MAIN_SPACING: f64 = VERTEX_LINE_SPACING / 4.0;
pub const SUPPORT_HEIGHT: f64 = 0.3;
pub const FIRST_EDGE_LINE: f64 = 4.5;
pub const EDGE_LINE_STEP: f64 = 2.0;
pub const APEX_OFFSET: f64 = 0.45;
pub const CHAIN_SPACING: f64 = 0.9;
pub const PROBE_OFFSET: f64 = 1.2;

const RADIUS: f64 = 1.0;
const ON_LINE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypergraph3U {
    pub n_vertices: usize,
    pub edges: Vec<[usize; 3]>,
}

impl Hypergraph3U {
    pub fn new(n_vertices: usize, edges: Vec<[usize; 3]>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut sorted = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if e[0] == e[1] || e[1] == e[2] {
                return Err(Error::InvalidInput(format!("edge {e:?} repeats a vertex")));
            }
            if e[2] >= n_vertices {
                return Err(Error::InvalidInput(format!("edge {e:?} out of range")));
            }
            if !seen.insert(e) {
                return Err(Error::InvalidInput(format!("duplicate edge {e:?}")));
            }
            sorted.push(e);
        }
        Ok(Hypergraph3U {
            n_vertices,
            edges: sorted,
        })
    }

    pub fn fano() -> Self {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        Hypergraph3U::new(7, lines.to_vec()).unwrap()
    }

    /// All 3-subsets of `0..n`.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    edges.push([a, b, c]);
                }
            }
        }
        Hypergraph3U { n_vertices: n, edges }
    }
}

/// Text format: `n m` then `m` lines of three vertex indices; `#` starts a
/// comment.
impl FromStr for Hypergraph3U {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut nums = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad integer {t:?}"))));
        let mut next = || nums.next().unwrap_or_else(|| Err(Error::InvalidInput("hypergraph text ended early".into())));
        let n = next()?;
        let m = next()?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            edges.push([next()?, next()?, next()?]);
        }
        if nums.next().is_some() {
            return Err(Error::InvalidInput("trailing data after hypergraph edges".into()));
        }
        Hypergraph3U::new(n, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineColor {
    Black,
    Red,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedHyperplane {
    pub plane: Hyperplane<f64>,
    pub color: LineColor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Flip {
    pub vertical: bool,
    pub horizontal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FlipConfiguration {
    pub flips: Vec<Flip>,
}

impl FlipConfiguration {
    /// Vertex colour: the colour of the edge lines its flags are missing from.
    pub fn coloring(&self) -> Vec<Color> {
        self.flips
            .iter()
            .map(|f| if f.vertical { Color::Red } else { Color::Blue })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetInstance {
    pub hypergraph: Hypergraph3U,
    /// 2 for the planar gadget, 3 for its lift.
    pub dim: usize,
    pub instance: NetworkInstance<f64>,
    pub hyperplanes: Vec<TaggedHyperplane>,
    pub main_line: usize,
    pub support_line: usize,
    /// Hyperplane index of each vertex line.
    pub vertex_lines: Vec<usize>,
    /// `[red, blue]` hyperplane indices per hyperedge.
    pub edge_lines: Vec<[usize; 2]>,
    /// Chain node ids per vertex line (main-line crossing excluded).
    pub chains: Vec<Vec<usize>>,
    /// `(vertex, edge) → [left apex, right apex]`.
    pub flags: BTreeMap<(usize, usize), [usize; 2]>,
    /// `[red probe, blue probe]` per hyperedge.
    pub probes: Vec<[usize; 2]>,
    /// Main and support line ids.
    pub fixed: Vec<usize>,
    /// Ids of the upper layer in a lift (`id + offset`), 0 otherwise.
    pub layer_offset: usize,
}

fn column(x: usize) -> f64 {
    VERTEX_LINE_SPACING * (x + 1) as f64
}

fn edge_y(f: usize) -> f64 {
    FIRST_EDGE_LINE + EDGE_LINE_STEP * f as f64
}

/// Upper half of a vertex chain: from `y = 1` past the last edge line, with
/// nodes just above and below every edge line and none on it.
fn chain_heights(m: usize) -> Vec<f64> {
    let mut req = vec![1.0];
    for f in 0..m {
        req.push(edge_y(f) - APEX_OFFSET);
        req.push(edge_y(f) + APEX_OFFSET);
    }
    let mut out = vec![req[0]];
    for (i, w) in req.windows(2).enumerate() {
        let straddles_edge_line = i % 2 == 1;
        let steps = if straddles_edge_line {
            1
        } else {
            ((w[1] - w[0]) / CHAIN_SPACING - 1e-9).ceil().max(1.0) as usize
        };
        for s in 1..=steps {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / steps as f64);
        }
    }
    out
}

/// Builds the planar gadget in its reference configuration (no flips).
/// Probes are parked on their edge lines beyond the last vertex line.
pub fn build_gadget(h: &Hypergraph3U) -> Result<GadgetInstance> {
    if h.n_vertices > MAX_VERTICES {
        return Err(Error::SizeLimit {
            what: "gadget vertices",
            limit: MAX_VERTICES,
        });
    }
    if h.edges.len() > MAX_EDGES {
        return Err(Error::SizeLimit {
            what: "gadget edges",
            limit: MAX_EDGES,
        });
    }
    let (n, m) = (h.n_vertices, h.edges.len());
    let mut hyperplanes = Vec::new();
    let mut line = |normal: [f64; 2], offset: f64, color: LineColor| {
        hyperplanes.push(TaggedHyperplane {
            plane: Hyperplane::new(normal.to_vec(), offset).unwrap(),
            color,
        });
        hyperplanes.len() - 1
    };
    let main_line = line([0.0, 1.0], 0.0, LineColor::Black);
    let support_line = line([0.0, 1.0], SUPPORT_HEIGHT, LineColor::Black);
    let vertex_lines: Vec<usize> = (0..n).map(|x| line([1.0, 0.0], column(x), LineColor::Black)).collect();
    let edge_lines: Vec<[usize; 2]> = (0..m)
        .map(|f| [line([0.0, 1.0], edge_y(f), LineColor::Red), line([0.0, 1.0], -edge_y(f), LineColor::Blue)])
        .collect();

    let mut points: Vec<[f64; 2]> = Vec::new();
    let mut groups: Vec<usize> = Vec::new();
    let mut add = |p: [f64; 2], g: usize| {
        points.push(p);
        groups.push(g);
        points.len() - 1
    };
    let mut fixed = Vec::new();
    let main_end = column(n);
    let steps = (main_end / MAIN_SPACING).round() as usize;
    for i in 0..=steps {
        fixed.push(add([MAIN_SPACING * i as f64, 0.0], main_line));
    }
    fixed.push(add([0.0, SUPPORT_HEIGHT], support_line));
    fixed.push(add([MAIN_SPACING, SUPPORT_HEIGHT], support_line));

    let heights = chain_heights(m);
    let mut chains = Vec::with_capacity(n);
    let mut flags = BTreeMap::new();
    for x in 0..n {
        let cx = column(x);
        let mut chain = Vec::new();
        for &y in heights.iter().rev() {
            chain.push(add([cx, -y], vertex_lines[x]));
        }
        for &y in &heights {
            chain.push(add([cx, y], vertex_lines[x]));
        }
        chains.push(chain);
        for (f, e) in h.edges.iter().enumerate() {
            if e.contains(&x) {
                let y = edge_y(f);
                let l = add([cx - APEX_OFFSET, y], edge_lines[f][0]);
                let r = add([cx + APEX_OFFSET, y], edge_lines[f][0]);
                flags.insert((x, f), [l, r]);
            }
        }
    }
    let park = column(n);
    let mut probes = Vec::with_capacity(m);
    for f in 0..m {
        let red = add([park, edge_y(f)], edge_lines[f][0]);
        let blue = add([park, -edge_y(f)], edge_lines[f][1]);
        probes.push([red, blue]);
    }
    let solid = points.len() - 2 * m;

    let as_vec: Vec<Vec<f64>> = points[..solid].iter().map(|p| p.to_vec()).collect();
    let edges = udg_edges(&as_vec, RADIUS);
    let nodes = points
        .iter()
        .zip(&groups)
        .enumerate()
        .map(|(id, (p, &g))| NodeRecord {
            line_group: Some(g + 1),
            true_pos: Some([p[0], p[1], 0.0]),
            ..NodeRecord::new(id)
        })
        .collect();
    let instance = NetworkInstance {
        radius: RADIUS,
        nodes,
        edges,
    };
    instance.validate()?;
    Ok(GadgetInstance {
        hypergraph: h.clone(),
        dim: 2,
        instance,
        hyperplanes,
        main_line,
        support_line,
        vertex_lines,
        edge_lines,
        chains,
        flags,
        probes,
        fixed,
        layer_offset: 0,
    })
}

/// Every proper 2-colouring (no monochromatic edge), in binary counting
/// order with bit `x` set meaning red.
pub fn two_colorings(h: &Hypergraph3U) -> Result<Vec<Vec<Color>>> {
    if h.n_vertices > MAX_COLORING_VERTICES {
        return Err(Error::SizeLimit {
            what: "2-colouring vertices",
            limit: MAX_COLORING_VERTICES,
        });
    }
    let n = h.n_vertices;
    let masks: Vec<u32> = h.edges.iter().map(|e| e.iter().map(|&v| 1u32 << v).sum()).collect();
    let mut out = Vec::new();
    for c in 0u32..(1 << n) {
        let proper = masks.iter().all(|&m| {
            let red = c & m;
            red != 0 && red != m
        });
        if proper {
            out.push((0..n).map(|x| if c >> x & 1 == 1 { Color::Red } else { Color::Blue }).collect());
        }
    }
    Ok(out)
}

/// Node positions of one vertex line's chain and flags under a flip.
struct Variant {
    nodes: Vec<(usize, [f64; 2])>,
    /// Internal consistency with the fixed nodes and own hyperplanes.
    ok: bool,
}

struct Checker<'g> {
    g: &'g GadgetInstance,
    adj: Adjacency<f64>,
    /// `variants[x][bits]`, bits = vertical | horizontal << 1.
    variants: Vec<Vec<Variant>>,
    fixed: Vec<(usize, [f64; 2])>,
    fixed_ok: bool,
    /// `cross[x][x'][b][b']` for `x < x'`.
    cross: Vec<Vec<[[bool; 4]; 4]>>,
}

fn flip_bits(f: Flip) -> usize {
    f.vertical as usize | (f.horizontal as usize) << 1
}

fn d2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn pos2(g: &GadgetInstance, id: usize) -> [f64; 2] {
    let p = g.instance.nodes[id].true_pos.unwrap();
    [p[0], p[1]]
}

impl<'g> Checker<'g> {
    fn new(g: &'g GadgetInstance) -> Self {
        let adj = g.instance.adjacency();
        let fixed: Vec<(usize, [f64; 2])> = g.fixed.iter().map(|&id| (id, pos2(g, id))).collect();
        let mut c = Checker {
            g,
            adj,
            variants: Vec::new(),
            fixed_ok: true,
            fixed,
            cross: Vec::new(),
        };
        c.fixed_ok = c.pairs_ok(&c.fixed, &c.fixed);
        let n = g.hypergraph.n_vertices;
        c.variants = (0..n).map(|x| (0..4).map(|b| c.variant(x, b)).collect()).collect();
        c.cross = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        let mut t = [[true; 4]; 4];
                        if x < y {
                            for (b, row) in t.iter_mut().enumerate() {
                                for (b2, cell) in row.iter_mut().enumerate() {
                                    *cell = c.pairs_ok(&c.variants[x][b].nodes, &c.variants[y][b2].nodes);
                                }
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        c
    }

    fn variant(&self, x: usize, bits: usize) -> Variant {
        let g = self.g;
        let cx = column(x);
        let (vertical, horizontal) = (bits & 1 == 1, bits & 2 == 2);
        let place = |p: [f64; 2]| {
            let px = if horizontal { 2.0 * cx - p[0] } else { p[0] };
            let py = if vertical { -p[1] } else { p[1] };
            [px, py]
        };
        let mut nodes: Vec<(usize, [f64; 2])> = g.chains[x].iter().map(|&id| (id, place(pos2(g, id)))).collect();
        let mut on_planes = nodes
            .iter()
            .all(|&(_, p)| g.hyperplanes[g.vertex_lines[x]].plane.signed_distance(&p).abs() <= ON_LINE);
        for (&(fx, f), apexes) in &g.flags {
            if fx != x {
                continue;
            }
            let plane = &g.hyperplanes[g.edge_lines[f][vertical as usize]].plane;
            for &id in apexes {
                let p = place(pos2(g, id));
                on_planes &= plane.signed_distance(&p).abs() <= ON_LINE;
                nodes.push((id, p));
            }
        }
        let ok = on_planes && self.pairs_ok(&nodes, &nodes) && self.pairs_ok(&nodes, &self.fixed);
        Variant { nodes, ok }
    }

    /// Edge iff within the radius, over all pairs drawn from `a × b`.
    fn pairs_ok(&self, a: &[(usize, [f64; 2])], b: &[(usize, [f64; 2])]) -> bool {
        a.iter().all(|&(u, p)| {
            b.iter()
                .all(|&(v, q)| u == v || self.adj.has_edge(u, v) == (d2(p, q) <= RADIUS))
        })
    }

    /// Probe slots next to every member vertex line of `f`, on one side.
    fn slots(&self, f: usize, blue: bool) -> Vec<[f64; 2]> {
        let y = if blue { -edge_y(f) } else { edge_y(f) };
        self.g.hypergraph.edges[f].iter().map(|&x| [column(x) + PROBE_OFFSET, y]).collect()
    }

    fn free(&self, slot: [f64; 2], config: &FlipConfiguration, placed: &[[f64; 2]]) -> bool {
        let clear = |nodes: &[(usize, [f64; 2])]| nodes.iter().all(|&(_, p)| d2(p, slot) > RADIUS);
        clear(&self.fixed)
            && config
                .flips
                .iter()
                .enumerate()
                .all(|(x, &fl)| clear(&self.variants[x][flip_bits(fl)].nodes))
            && placed.iter().all(|&q| d2(q, slot) > RADIUS)
    }

    /// Implied positions of the probes (first free slot each), or `None`
    /// if some probe has no admissible slot.
    fn probe_positions(&self, config: &FlipConfiguration) -> Option<Vec<[f64; 2]>> {
        let mut placed = Vec::new();
        for f in 0..self.g.probes.len() {
            for blue in [false, true] {
                let slot = self.slots(f, blue).into_iter().find(|&s| self.free(s, config, &placed))?;
                placed.push(slot);
            }
        }
        Some(placed)
    }

    fn is_valid(&self, config: &FlipConfiguration) -> bool {
        if !self.fixed_ok {
            return false;
        }
        let bits: Vec<usize> = config.flips.iter().map(|&f| flip_bits(f)).collect();
        let n = bits.len();
        for x in 0..n {
            if !self.variants[x][bits[x]].ok {
                return false;
            }
            for y in x + 1..n {
                if !self.cross[x][y][bits[x]][bits[y]] {
                    return false;
                }
            }
        }
        self.probe_positions(config).is_some()
    }

    /// Full 2D node positions implied by a configuration.
    fn positions(&self, config: &FlipConfiguration) -> Option<BTreeMap<usize, [f64; 2]>> {
        let mut out: BTreeMap<usize, [f64; 2]> = self.fixed.iter().copied().collect();
        for (x, &fl) in config.flips.iter().enumerate() {
            out.extend(self.variants[x][flip_bits(fl)].nodes.iter().copied());
        }
        let probes = self.probe_positions(config)?;
        for (ids, pair) in self.g.probes.iter().zip(probes.chunks(2)) {
            out.insert(ids[0], pair[0]);
            out.insert(ids[1], pair[1]);
        }
        Some(out)
    }
}

fn all_configurations(n: usize) -> impl Iterator<Item = FlipConfiguration> {
    (0usize..1 << (2 * n)).map(move |code| FlipConfiguration {
        flips: (0..n)
            .map(|x| Flip {
                vertical: code >> (2 * x) & 1 == 1,
                horizontal: code >> (2 * x + 1) & 1 == 1,
            })
            .collect(),
    })
}

/// Every flip configuration whose implied placement realizes the gadget's
/// unit disk graph exactly with every node on its hyperplane. For a lift
/// the two layers must use the same configuration, which is checked by
/// comparing the implied positions of each node and its copy.
pub fn enumerate_groupings(g: &GadgetInstance) -> Result<Vec<FlipConfiguration>> {
    let n = g.hypergraph.n_vertices;
    if n > MAX_VERTICES {
        return Err(Error::SizeLimit {
            what: "gadget vertices",
            limit: MAX_VERTICES,
        });
    }
    let base = if g.dim == 3 { lower_layer(g) } else { g.clone() };
    let checker = Checker::new(&base);
    let valid: Vec<FlipConfiguration> = all_configurations(n).filter(|c| checker.is_valid(c)).collect();
    if g.dim == 2 {
        return Ok(valid);
    }
    // A node and its copy are adjacent (distance 1 in z) only if their
    // planar positions coincide, so both layers carry the same implied
    // positions (the upper layer can always repeat the lower configuration).
    // Across layers a node and another node's copy are non-adjacent only if
    // their planar positions differ.
    let lifted = valid
        .into_iter()
        .filter(|c| {
            let pos = checker.positions(c).unwrap();
            let keys: HashSet<[u64; 2]> = pos.values().map(|p| [p[0].to_bits(), p[1].to_bits()]).collect();
            keys.len() == pos.len()
        })
        .collect();
    Ok(lifted)
}

/// The `z = 0` layer of a lift, as a planar gadget.
fn lower_layer(g: &GadgetInstance) -> GadgetInstance {
    let k = g.layer_offset;
    let nodes = g.instance.nodes[..k]
        .iter()
        .map(|r| NodeRecord {
            line_group: r.plane_group,
            plane_group: None,
            ..r.clone()
        })
        .collect();
    let edges = g.instance.edges.iter().filter(|e| e.v < k).cloned().collect();
    let hyperplanes = g
        .hyperplanes
        .iter()
        .map(|t| TaggedHyperplane {
            plane: Hyperplane::new(t.plane.normal[..2].to_vec(), t.plane.offset).unwrap(),
            color: t.color,
        })
        .collect();
    GadgetInstance {
        dim: 2,
        instance: NetworkInstance {
            radius: g.instance.radius,
            nodes,
            edges,
        },
        hyperplanes,
        layer_offset: 0,
        ..g.clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceEntry {
    pub coloring: Vec<Color>,
    pub configurations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub colorable: bool,
    pub groupable: bool,
    pub agree: bool,
    pub proper_colorings: usize,
    pub valid_configurations: usize,
    /// Valid configurations grouped by the colouring they induce.
    pub correspondence: Vec<CorrespondenceEntry>,
    /// Every valid configuration induces a proper colouring and every
    /// proper colouring is induced by exactly `2^|X|` configurations.
    pub correspondence_exact: bool,
}

/// Brute-force check that the gadget of `h` is groupable exactly when `h`
/// is 2-colourable.
pub fn verify_equivalence(h: &Hypergraph3U, lift: bool) -> Result<EquivalenceReport> {
    let colorings = two_colorings(h)?;
    let mut g = build_gadget(h)?;
    if lift {
        g = lift_to_3d(&g);
    }
    let configs = enumerate_groupings(&g)?;
    let mut by_coloring: BTreeMap<Vec<bool>, (Vec<Color>, usize)> = BTreeMap::new();
    for c in &configs {
        let col = c.coloring();
        let key = col.iter().map(|&k| k == Color::Red).collect();
        by_coloring.entry(key).or_insert((col, 0)).1 += 1;
    }
    let proper: HashSet<Vec<Color>> = colorings.iter().cloned().collect();
    let per = 1usize << h.n_vertices;
    let correspondence_exact = by_coloring.len() == proper.len()
        && by_coloring.values().all(|(col, count)| proper.contains(col) && *count == per);
    let (colorable, groupable) = (!colorings.is_empty(), !configs.is_empty());
    Ok(EquivalenceReport {
        colorable,
        groupable,
        agree: colorable == groupable,
        proper_colorings: colorings.len(),
        valid_configurations: configs.len(),
        correspondence: by_coloring
            .into_values()
            .map(|(coloring, configurations)| CorrespondenceEntry { coloring, configurations })
            .collect(),
        correspondence_exact,
    })
}

/// Stacks a copy of the planar gadget at `z = 1`; each node is joined only
/// to its own copy across layers and lines become vertical planes.
pub fn lift_to_3d(g: &GadgetInstance) -> GadgetInstance {
    let k = g.instance.len();
    let mut nodes = Vec::with_capacity(2 * k);
    for layer in 0..2 {
        for r in &g.instance.nodes {
            let p = r.true_pos.unwrap();
            nodes.push(NodeRecord {
                line_group: None,
                plane_group: r.line_group,
                true_pos: Some([p[0], p[1], layer as f64]),
                ..NodeRecord::new(r.id + layer * k)
            });
        }
    }
    let mut edges = g.instance.edges.clone();
    edges.extend(g.instance.edges.iter().map(|e| crate::model::Edge {
        u: e.u + k,
        v: e.v + k,
        dist: e.dist,
    }));
    edges.extend((0..k).map(|u| crate::model::Edge {
        u,
        v: u + k,
        dist: 1.0,
    }));
    edges.sort_by_key(|e| (e.u, e.v));
    let hyperplanes = g
        .hyperplanes
        .iter()
        .map(|t| TaggedHyperplane {
            plane: Hyperplane::new(vec![t.plane.normal[0], t.plane.normal[1], 0.0], t.plane.offset).unwrap(),
            color: t.color,
        })
        .collect();
    GadgetInstance {
        dim: 3,
        instance: NetworkInstance {
            radius: g.instance.radius,
            nodes,
            edges,
        },
        hyperplanes,
        layer_offset: k,
        ..g.clone()
    }
}
