use hyperplanar_core::gadget::{build_gadget, enumerate_groupings, lift_to_3d, two_colorings, verify_equivalence, Color, Flip, FlipConfiguration, Hypergraph3U};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent proper-colouring test.
fn is_proper(h: &Hypergraph3U, c: &[Color]) -> bool {
    h.edges.iter().all(|e| !(c[e[0]] == c[e[1]] && c[e[1]] == c[e[2]]))
}

fn random_hypergraph(rng: &mut ChaCha8Rng) -> Hypergraph3U {
    let n = rng.random_range(3..=5);
    let mut triples = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    let m = rng.random_range(0..=3.min(triples.len()));
    let edges = sample(rng, triples.len(), m).into_iter().map(|i| triples[i]).collect();
    Hypergraph3U::new(n, edges).unwrap()
}

#[test]
fn fano_is_neither_colorable_nor_groupable() {
    let fano = Hypergraph3U::fano();
    assert!(two_colorings(&fano).unwrap().is_empty());
    let r = verify_equivalence(&fano, false).unwrap();
    assert!(!r.colorable && !r.groupable && r.agree);
}

#[test]
fn complete_on_four_gives_two_two_splits() {
    let k4 = Hypergraph3U::complete(4);
    let cols = two_colorings(&k4).unwrap();
    assert_eq!(cols.len(), 6);
    for c in &cols {
        assert_eq!(c.iter().filter(|&&k| k == Color::Red).count(), 2);
    }
    let r = verify_equivalence(&k4, false).unwrap();
    assert!(r.agree && r.correspondence_exact);
}

#[test]
fn colorings_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let h = random_hypergraph(&mut rng);
        let got = two_colorings(&h).unwrap();
        let mut want = 0;
        for mask in 0u32..1 << h.n_vertices {
            let c: Vec<Color> = (0..h.n_vertices).map(|x| if mask >> x & 1 == 1 { Color::Red } else { Color::Blue }).collect();
            want += is_proper(&h, &c) as usize;
        }
        assert_eq!(got.len(), want);
        assert!(got.iter().all(|c| is_proper(&h, c)));
    }
}

#[test]
fn random_sample_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let h = random_hypergraph(&mut rng);
        let r = verify_equivalence(&h, false).unwrap();
        assert!(r.agree, "{h:?}");
        assert!(r.correspondence_exact, "{h:?}");
    }
}

#[test]
fn line_counts_for_six_by_three() {
    let h = Hypergraph3U::new(6, vec![[0, 1, 2], [2, 3, 4], [1, 4, 5]]).unwrap();
    let g = build_gadget(&h).unwrap();
    let horizontal = g.hyperplanes.iter().filter(|t| t.plane.normal[0].abs() < 1e-12).count();
    assert_eq!(horizontal, 8);
    assert_eq!(g.vertex_lines.len(), 6);
    assert_eq!(g.edge_lines.len(), 3);
}

#[test]
fn vertex_line_spacing_in_open_interval() {
    let h = Hypergraph3U::new(3, vec![[0, 1, 2]]).unwrap();
    let g = build_gadget(&h).unwrap();
    let xs: Vec<f64> = g.vertex_lines.iter().map(|&i| g.hyperplanes[i].plane.offset).collect();
    for w in xs.windows(2) {
        let gap = w[1] - w[0];
        assert!(gap > 2.0 && gap < 3.0);
    }
}

#[test]
fn empty_edge_set_is_trivially_fine() {
    let h = Hypergraph3U::new(3, vec![]).unwrap();
    let r = verify_equivalence(&h, false).unwrap();
    assert!(r.colorable && r.groupable && r.agree);
}

#[test]
fn global_vertical_toggle_preserves_validity() {
    let h = Hypergraph3U::new(4, vec![[0, 1, 2], [1, 2, 3]]).unwrap();
    let g = build_gadget(&h).unwrap();
    let valid = enumerate_groupings(&g).unwrap();
    let set: std::collections::HashSet<FlipConfiguration> = valid.iter().cloned().collect();
    for c in &valid {
        let toggled = FlipConfiguration {
            flips: c.flips.iter().map(|f| Flip { vertical: !f.vertical, ..*f }).collect(),
        };
        assert!(set.contains(&toggled));
    }
}

#[test]
fn lift_structure() {
    let h = Hypergraph3U::new(3, vec![[0, 1, 2]]).unwrap();
    let g = build_gadget(&h).unwrap();
    let lifted = lift_to_3d(&g);
    let (n, e) = (g.instance.len(), g.instance.edges.len());
    assert_eq!(lifted.instance.len(), 2 * n);
    assert_eq!(lifted.instance.edges.len(), 2 * e + n);
    let adj = lifted.instance.adjacency();
    for edge in &g.instance.edges {
        assert!(adj.has_edge(edge.u, edge.v) && adj.has_edge(edge.u + n, edge.v + n));
    }
    // All-pairs scan: a node and another node's copy are never within range.
    let pos: Vec<[f64; 3]> = lifted.instance.nodes.iter().map(|r| r.true_pos.unwrap()).collect();
    for u in 0..n {
        for v in 0..n {
            let (a, b) = (pos[u], pos[v + n]);
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
            assert_eq!(d <= 1.0, u == v);
            assert_eq!(adj.has_edge(u, v + n), u == v);
        }
    }
}

#[test]
fn lift_preserves_groupability() {
    for h in [Hypergraph3U::new(3, vec![[0, 1, 2]]).unwrap(), Hypergraph3U::complete(4)] {
        let flat = enumerate_groupings(&build_gadget(&h).unwrap()).unwrap();
        let lifted = enumerate_groupings(&lift_to_3d(&build_gadget(&h).unwrap())).unwrap();
        assert_eq!(flat, lifted);
        assert!(verify_equivalence(&h, true).unwrap().agree);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn gadget_is_a_valid_instance(seed in any::<u64>()) {
        let h = random_hypergraph(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = build_gadget(&h).unwrap();
        prop_assert!(g.instance.validate().is_ok());
        // Every non-probe node lies on its reference hyperplane.
        for r in &g.instance.nodes {
            let p = r.true_pos.unwrap();
            let plane = &g.hyperplanes[r.line_group.unwrap() - 1].plane;
            prop_assert!(plane.signed_distance(&[p[0], p[1]]).abs() < 1e-9);
        }
    }
}
