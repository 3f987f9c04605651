use hyperplanar_core::building::{generate_building, random_points, BuildingConfig};
use hyperplanar_core::eval::align_isometry;
use hyperplanar_core::group::{
    compute_group_transform, fit_hyperplane, hierarchical_localize, localize_collinear_group, localize_support_vertex,
    GroupOptions,
};
use hyperplanar_core::interval::{hamiltonian_oracle, unit_interval_order, Graph};
use hyperplanar_core::model::build_udg;
use hyperplanar_core::quad::{find_seed_k4, multilaterate, place_seed, quadrilaterate};
use hyperplanar_core::{Network, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Random rotation from a normalized quaternion, optionally reflected.
fn random_isometry(rng: &mut ChaCha8Rng) -> ([[f64; 3]; 3], [f64; 3]) {
    let q: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    let mut r = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    if rng.random::<bool>() {
        r[0] = r[0].map(|v| -v);
    }
    let t = [0, 1, 2].map(|_| rng.random_range(-5.0..5.0));
    (r, t)
}

fn apply(m: &([[f64; 3]; 3], [f64; 3]), p: &[f64]) -> Vec<f64> {
    (0..3).map(|i| (0..3).map(|j| m.0[i][j] * p[j]).sum::<f64>() + m.1[i]).collect()
}

proptest! {
    #[test]
    fn udg_matches_all_pairs_scan(seed in 0u64..500) {
        let pts = random_points::<f64>(20, 2, 2.0, seed);
        let inst = build_udg(&pts, 1.0).unwrap();
        let mut want = Vec::new();
        for u in 0..20 {
            for v in u + 1..20 {
                let d = dist(&pts[u], &pts[v]);
                if d <= 1.0 {
                    want.push((u, v, d));
                }
            }
        }
        let got: Vec<(usize, usize, f64)> = inst.edges.iter().map(|e| (e.u, e.v, e.dist)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn multilateration_round_trip(seed in 0u64..500) {
        let pts = random_points::<f64>(6, 3, 2.0, seed);
        let hidden = &pts[5];
        let dists: Vec<f64> = pts[..5].iter().map(|a| dist(a, hidden)).collect();
        let got = multilaterate(&pts[..5], &dists, &tol()).unwrap();
        prop_assert!(dist(&got, hidden) < 1e-9);
    }

    #[test]
    fn support_vertex_pair_contains_hidden(seed in 0u64..500) {
        let pts = random_points::<f64>(4, 3, 2.0, seed);
        let dists: Vec<f64> = pts[..3].iter().map(|a| dist(a, &pts[3])).collect();
        let cands = localize_support_vertex(&pts[..3], &dists, &tol()).unwrap();
        prop_assert!(cands.iter().any(|c| dist(c, &pts[3]) < 1e-9));
    }

    #[test]
    fn seed_placement_is_isometric(seed in 0u64..500) {
        let pts = random_points::<f64>(4, 3, 2.0, seed);
        let mut d = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                d[i][j] = dist(&pts[i], &pts[j]);
            }
        }
        let placed = place_seed(&d, &tol()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((dist(&placed[i], &placed[j]) - d[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn transform_recovers_rigid_motion(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let local: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let motion = random_isometry(&mut rng);
        let ambient: Vec<Vec<f64>> = local.iter().map(|p| apply(&motion, &[p[0], p[1], 0.0])).collect();
        let t = compute_group_transform(&local, &ambient, &tol()).unwrap();
        prop_assert!(t.orthonormality_defect() < 1e-12);
        for (l, a) in local.iter().zip(&ambient) {
            prop_assert!(dist(&t.apply(l), a) < 1e-9);
        }
    }

    #[test]
    fn fitted_plane_contains_points(seed in 0u64..500) {
        let pts = random_points::<f64>(3, 3, 2.0, seed);
        let plane = fit_hyperplane(&pts, &tol()).unwrap();
        for p in &pts {
            prop_assert!(plane.signed_distance(p).abs() < 1e-12);
        }
    }
}

#[test]
fn dense_seed_checked_by_determinant() {
    let pts = random_points::<f64>(50, 3, 1.8, 11);
    let inst = build_udg(&pts, 1.0).unwrap();
    let seed = find_seed_k4(&inst, &tol()).expect("dense instance has a seed");
    let adj = inst.adjacency();
    let v = seed.vertices;
    for i in 0..4 {
        for j in i + 1..4 {
            assert!(adj.has_edge(v[i], v[j]));
        }
    }
    let rows = [1, 2, 3].map(|i| [0, 1, 2].map(|c| pts[v[i]][c] - pts[v[0]][c]));
    assert!(det3(rows).abs() > 1e-6);
}

#[test]
fn localizers_never_read_ground_truth() {
    let inst: Network = generate_building(&BuildingConfig::flagship()).unwrap();
    let blind = inst.strip_ground_truth();
    let opts = GroupOptions::default();
    let a = hierarchical_localize(&inst, &opts).unwrap().formation;
    let b = hierarchical_localize(&blind, &opts).unwrap().formation;
    assert_eq!(a, b);
    let dense = build_udg(&random_points::<f64>(50, 3, 1.8, 3), 1.0).unwrap();
    assert_eq!(
        quadrilaterate(&dense, &tol()).unwrap(),
        quadrilaterate(&dense.strip_ground_truth(), &tol()).unwrap()
    );
}

#[test]
fn quadrilateration_keeps_edge_distances() {
    let inst = build_udg(&random_points::<f64>(60, 3, 2.0, 8), 1.0).unwrap();
    let trace = quadrilaterate(&inst.strip_ground_truth(), &tol()).unwrap();
    assert!(trace.localized_count > 4);
    assert!(trace.formation.max_edge_residual(&inst) <= tol().eps);
}

#[test]
fn one_dimensional_deployment_matches_truth() {
    let xs = [0.0, 0.6, 1.1, 1.9];
    let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let inst = build_udg(&pts, 1.0).unwrap();
    let f = localize_collinear_group(&inst.adjacency(), &[0, 1, 2, 3], &tol()).unwrap();
    let truth = inst.truth_formation(1);
    let a = align_isometry(&f, &truth).unwrap();
    assert!(a.rmse < 1e-12);
}

#[test]
fn collinear_order_is_sorted_and_hamiltonian() {
    let pts: Vec<Vec<f64>> = [0.0, 0.4, 0.8, 1.2, 1.6].iter().map(|&x| vec![x]).collect();
    let inst = build_udg(&pts, 1.0).unwrap();
    let g = Graph::induced(&inst.adjacency(), &[0, 1, 2, 3, 4]);
    let seq = unit_interval_order(&g).unwrap().sequence;
    assert!(seq == vec![0, 1, 2, 3, 4] || seq == vec![4, 3, 2, 1, 0]);
    assert!(hamiltonian_oracle(&g).unwrap().is_some());
}

#[test]
fn single_floor_single_corridor_is_canonical() {
    let cfg = BuildingConfig {
        floors: 1,
        corridors_per_floor: [1, 0],
        corridor_length: 4.5,
        connector_columns: vec![],
        ..BuildingConfig::default()
    };
    let inst: Network = generate_building(&cfg).unwrap();
    let out = hierarchical_localize(&inst.strip_ground_truth(), &GroupOptions::default()).unwrap();
    assert_eq!(out.formation.localized_count(), inst.len());
    for id in out.formation.localized_ids() {
        let p = out.formation.get(id).unwrap();
        assert_eq!(&p[1..], &[0.0, 0.0]);
    }
    let a = align_isometry(&out.formation, &inst.truth_formation(3)).unwrap();
    assert!(a.rmse < 1e-12);
}

#[test]
fn floor_with_too_few_supports_is_not_localizable() {
    // Above ~0.935 radius only the stairwell crossing node sees three nodes
    // on the floor below.
    let cfg = BuildingConfig {
        floors: 2,
        floor_spacing: 0.95,
        ..BuildingConfig::default()
    };
    let inst: Network = generate_building(&cfg).unwrap();
    let err = hierarchical_localize(&inst.strip_ground_truth(), &GroupOptions::default()).unwrap_err();
    assert_eq!(err.code(), "not-localizable");
}

#[test]
fn hierarchical_transforms_preserve_group_distances() {
    let inst: Network = generate_building(&BuildingConfig::flagship()).unwrap();
    let out = hierarchical_localize(&inst.strip_ground_truth(), &GroupOptions::default()).unwrap();
    for loc in out.floor_placements.values().chain([&out.building]) {
        for g in &loc.groups {
            assert!(g.transform.as_ref().unwrap().orthonormality_defect() < 1e-12);
        }
    }
    let truth = inst.truth_formation(3);
    let ids = truth.localized_ids();
    for &u in &ids {
        for &v in &ids {
            let want = dist(truth.get(u).unwrap(), truth.get(v).unwrap());
            let got = dist(out.formation.get(u).unwrap(), out.formation.get(v).unwrap());
            assert!((want - got).abs() < 1e-9);
        }
    }
}
