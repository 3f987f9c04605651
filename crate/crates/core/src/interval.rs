//! Forbidden induced subgraphs (claw, net) and Hamiltonian orders of unit
//! interval graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Adjacency;
use crate::scalar::Scalar;

/// Simple undirected graph on `0..n` whose vertices carry external labels
/// (node ids). Labels are ascending so local order matches id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph on labels `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v && !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Graph {
            labels: (0..n).collect(),
            adj,
        }
    }

    /// Subgraph of a network induced by `members` (any order).
    pub fn induced<T: Scalar>(adjacency: &Adjacency<T>, members: &[usize]) -> Self {
        let mut labels = members.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let adj = labels
            .iter()
            .map(|&u| {
                adjacency
                    .neighbors(u)
                    .iter()
                    .filter_map(|&(w, _)| labels.binary_search(&w).ok())
                    .collect()
            })
            .collect();
        Graph { labels, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Induced K(1,3): `center` adjacent to each leaf, leaves pairwise non-adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedClaw {
    pub center: usize,
    pub leaves: [usize; 3],
}

/// Induced net: a triangle with one private pendant per triangle vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedNet {
    pub triangle: [usize; 3],
    pub pendants: [usize; 3],
}

/// A Hamiltonian path of a group's induced subgraph, as node ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearOrder {
    pub sequence: Vec<usize>,
}

/// Lexicographically smallest induced claw by `(center, sorted leaves)`.
pub fn find_claw(g: &Graph) -> Option<InducedClaw> {
    for c in 0..g.len() {
        let nb = g.neighbors(c);
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if g.adjacent(a, b) {
                    continue;
                }
                for &d in &nb[j + 1..] {
                    if !g.adjacent(a, d) && !g.adjacent(b, d) {
                        return Some(InducedClaw {
                            center: g.label(c),
                            leaves: [g.label(a), g.label(b), g.label(d)],
                        });
                    }
                }
            }
        }
    }
    None
}

/// Lexicographically smallest induced net by `(sorted triangle, pendants)`,
/// where pendant `i` hangs off triangle vertex `i`.
pub fn find_net(g: &Graph) -> Option<InducedNet> {
    // Private neighbors of `a` with respect to the other two triangle vertices.
    let private = |a: usize, b: usize, c: usize| -> Vec<usize> {
        g.neighbors(a)
            .iter()
            .copied()
            .filter(|&x| x != b && x != c && !g.adjacent(x, b) && !g.adjacent(x, c))
            .collect()
    };
    for a in 0..g.len() {
        for &b in g.neighbors(a).iter().filter(|&&b| b > a) {
            for &c in g.neighbors(b).iter().filter(|&&c| c > b) {
                if !g.adjacent(a, c) {
                    continue;
                }
                let (pa, pb, pc) = (private(a, b, c), private(b, a, c), private(c, a, b));
                for &x in &pa {
                    for &y in pb.iter().filter(|&&y| !g.adjacent(x, y)) {
                        if let Some(&z) = pc.iter().find(|&&z| !g.adjacent(x, z) && !g.adjacent(y, z)) {
                            return Some(InducedNet {
                                triangle: [g.label(a), g.label(b), g.label(c)],
                                pendants: [g.label(x), g.label(y), g.label(z)],
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Lexicographic breadth-first search. With `prev`, ties inside the first
/// class go to the vertex appearing last in `prev` (LBFS+).
fn lbfs(g: &Graph, prev: Option<&[usize]>) -> Vec<usize> {
    let n = g.len();
    let initial: Vec<usize> = match prev {
        Some(p) => p.iter().rev().copied().collect(),
        None => (0..n).collect(),
    };
    let mut classes: Vec<Vec<usize>> = vec![initial];
    let mut order = Vec::with_capacity(n);
    let mut is_nb = vec![false; n];
    while let Some(first) = classes.first_mut() {
        // Classes keep `initial` relative order, so the front is the tie winner.
        let pivot = first.remove(0);
        if first.is_empty() {
            classes.remove(0);
        }
        order.push(pivot);
        for &w in g.neighbors(pivot) {
            is_nb[w] = true;
        }
        let mut refined = Vec::with_capacity(classes.len() * 2);
        for class in classes.drain(..) {
            let (inside, outside): (Vec<usize>, Vec<usize>) = class.into_iter().partition(|&v| is_nb[v]);
            if !inside.is_empty() {
                refined.push(inside);
            }
            if !outside.is_empty() {
                refined.push(outside);
            }
        }
        classes = refined;
        for &w in g.neighbors(pivot) {
            is_nb[w] = false;
        }
    }
    order
}

/// Hamiltonian path read off a three-sweep LBFS ordering.
///
/// On a connected unit interval graph the third sweep is an umbrella
/// ordering whose consecutive vertices are adjacent; the adjacency of every
/// consecutive pair is verified rather than assumed.
pub fn unit_interval_order(g: &Graph) -> Result<LinearOrder> {
    if g.is_empty() {
        return Ok(LinearOrder { sequence: vec![] });
    }
    let s1 = lbfs(g, None);
    let s2 = lbfs(g, Some(&s1));
    let s3 = lbfs(g, Some(&s2));
    if s3.windows(2).any(|w| !g.adjacent(w[0], w[1])) {
        return Err(Error::NoHamiltonianPath);
    }
    Ok(LinearOrder {
        sequence: s3.into_iter().map(|v| g.label(v)).collect(),
    })
}

pub const HAMILTONIAN_ORACLE_LIMIT: usize = 12;

/// Exhaustive Hamiltonian path search (bitmask dynamic programming);
/// returns the lexicographically smallest path as node ids.
pub fn hamiltonian_oracle(g: &Graph) -> Result<Option<Vec<usize>>> {
    let n = g.len();
    if n > HAMILTONIAN_ORACLE_LIMIT {
        return Err(Error::SizeLimit {
            what: "hamiltonian oracle input",
            limit: HAMILTONIAN_ORACLE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Some(vec![]));
    }
    let full = (1usize << n) - 1;
    // starts[mask] bit v: a Hamiltonian path of G[mask] starting at v exists.
    let mut starts = vec![0u16; 1 << n];
    for v in 0..n {
        starts[1 << v] |= 1 << v;
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut bits = 0u16;
        for v in 0..n {
            if mask & (1 << v) == 0 {
                continue;
            }
            let rest = mask & !(1 << v);
            if g.neighbors(v).iter().any(|&w| rest & (1 << w) != 0 && starts[rest] & (1 << w) != 0) {
                bits |= 1 << v;
            }
        }
        starts[mask] = bits;
    }
    let Some(first) = (0..n).find(|&v| starts[full] & (1 << v) != 0) else {
        return Ok(None);
    };
    let mut path = vec![first];
    let mut mask = full & !(1 << first);
    while mask != 0 {
        let cur = *path.last().unwrap();
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| mask & (1 << w) != 0 && starts[mask] & (1 << w) != 0)
            .expect("dp guarantees a continuation");
        path.push(next);
        mask &= !(1 << next);
    }
    Ok(Some(path.into_iter().map(|v| g.label(v)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claw() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn star_has_claw() {
        let c = find_claw(&claw()).unwrap();
        assert_eq!(c, InducedClaw { center: 0, leaves: [1, 2, 3] });
    }

    #[test]
    fn path_is_claw_free() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(find_claw(&p4).is_none());
    }

    #[test]
    fn net_found() {
        // Triangle a,b,c = 0,1,2 with pendants x,y,z = 3,4,5.
        let net = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]);
        let found = find_net(&net).unwrap();
        assert_eq!(found.triangle, [0, 1, 2]);
        assert_eq!(found.pendants, [3, 4, 5]);
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(find_net(&k3).is_none());
    }

    #[test]
    fn path_order() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let seq = unit_interval_order(&p).unwrap().sequence;
        assert!(seq == vec![0, 1, 2] || seq == vec![2, 1, 0]);
    }

    #[test]
    fn claw_has_no_order() {
        assert_eq!(unit_interval_order(&claw()).unwrap_err().code(), "no-hamiltonian-path");
        assert_eq!(hamiltonian_oracle(&claw()).unwrap(), None);
    }

    #[test]
    fn oracle_k3_smallest() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(hamiltonian_oracle(&k3).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn oracle_size_cap() {
        let g = Graph::from_edges(13, &[]);
        assert_eq!(hamiltonian_oracle(&g).unwrap_err().code(), "size-cap");
    }
}
