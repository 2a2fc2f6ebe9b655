use std::collections::VecDeque;

use antpath_core::roadmap::{
    compute_features, format_roadmap, generate_roadmap, load_roadmap, parse_roadmap, save_roadmap,
    RoadmapGraph,
};
use proptest::prelude::*;

/// Breadth-first reachability from city 0, independent of the library's
/// union-find.
fn bfs_connected(g: &RoadmapGraph) -> bool {
    let n = g.num_cities();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn check_structure(g: &RoadmapGraph) {
    let n = g.num_cities();
    for (i, c) in g.cities().iter().enumerate() {
        assert_eq!(c.id, i);
    }
    let mut pairs = std::collections::HashSet::new();
    for e in g.edges() {
        assert!(e.a < e.b && e.b < n);
        assert!(pairs.insert((e.a, e.b)), "duplicate edge");
        let d = g.cities()[e.a].distance(&g.cities()[e.b]);
        assert!((e.weight - d).abs() <= 1e-9 * d);
    }
    assert_ne!(g.source(), g.destination());
    assert!(g.source() < n && g.destination() < n);
}

#[test]
fn sparse_radius_still_yields_connected_graph() {
    let g = generate_roadmap(100, 100.0, 100.0, 5.0, 3).unwrap();
    assert!(bfs_connected(&g));
    check_structure(&g);
}

#[test]
fn generation_is_deterministic() {
    let a = generate_roadmap(250, 200.0, 200.0, 25.0, 7).unwrap();
    let b = generate_roadmap(250, 200.0, 200.0, 25.0, 7).unwrap();
    assert_eq!(a.edges(), b.edges());
    assert_eq!(a, b);
    let c = generate_roadmap(250, 200.0, 200.0, 25.0, 8).unwrap();
    assert_ne!(a.cities(), c.cities());
}

#[test]
fn endpoints_are_the_extreme_corners() {
    let g = generate_roadmap(80, 100.0, 50.0, 12.0, 11).unwrap();
    let dist = |i: usize, (x, y): (f64, f64)| (g.cities()[i].x - x).hypot(g.cities()[i].y - y);
    let nearest = |p: (f64, f64)| {
        (0..g.num_cities())
            .min_by(|&i, &j| dist(i, p).total_cmp(&dist(j, p)).then(i.cmp(&j)))
            .unwrap()
    };
    assert_eq!(g.source(), nearest((0.0, 0.0)));
    assert_eq!(g.destination(), nearest((100.0, 50.0)));
}

#[test]
fn large_graph_round_trips_field_by_field() {
    let g = generate_roadmap(250, 200.0, 200.0, 25.0, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.txt");
    save_roadmap(&g, &path).unwrap();
    let back = load_roadmap(&path).unwrap();
    assert_eq!(back.num_cities(), g.num_cities());
    assert_eq!(back.num_edges(), g.num_edges());
    for (a, b) in g.cities().iter().zip(back.cities()) {
        assert_eq!(a.x.to_bits(), b.x.to_bits());
        assert_eq!(a.y.to_bits(), b.y.to_bits());
    }
    for (a, b) in g.edges().iter().zip(back.edges()) {
        assert_eq!((a.a, a.b), (b.a, b.b));
        assert_eq!(a.weight.to_bits(), b.weight.to_bits());
    }
    assert_eq!(
        (back.source(), back.destination()),
        (g.source(), g.destination())
    );
    assert_eq!((back.width(), back.height()), (g.width(), g.height()));
    assert_eq!(back, g);
    assert_eq!(format_roadmap(&back), format_roadmap(&g));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "roadmap v1 2 1 10 10 0 1\n0 0 0\n1 3 4\n0 x\n";
    let err = parse_roadmap(text).unwrap_err().to_string();
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn stddev_of_collinear_triple() {
    let g = RoadmapGraph::new(
        &[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)],
        &[(0, 1), (1, 2)],
        3.0,
        1.0,
        0,
        2,
    )
    .unwrap();
    let f = compute_features(&g).unwrap();
    assert!((f.min_arc_stddev - (2.0f64 / 9.0).sqrt()).abs() < 1e-12);
}

fn relabel(g: &RoadmapGraph, perm: &[usize]) -> RoadmapGraph {
    let mut coords = vec![(0.0, 0.0); g.num_cities()];
    for c in g.cities() {
        coords[perm[c.id]] = (c.x, c.y);
    }
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|e| (perm[e.a], perm[e.b])).collect();
    RoadmapGraph::new(
        &coords,
        &pairs,
        g.width(),
        g.height(),
        perm[g.source()],
        perm[g.destination()],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_graphs_are_valid(
        n in 2usize..60,
        w in 5.0f64..200.0,
        h in 5.0f64..200.0,
        r in 0.5f64..40.0,
        seed in any::<u64>(),
    ) {
        let g = generate_roadmap(n, w, h, r, seed).unwrap();
        prop_assert!(bfs_connected(&g));
        prop_assert!(g.is_connected());
        check_structure(&g);
        for c in g.cities() {
            prop_assert!((0.0..=w).contains(&c.x) && (0.0..=h).contains(&c.y));
        }
        let f = compute_features(&g).unwrap();
        prop_assert!(f.node_density > 0.0 && f.min_arc_stddev >= 0.0);
    }

    #[test]
    fn features_ignore_city_labels(
        n in 3usize..40,
        seed in any::<u64>(),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::{seq::SliceRandom, SeedableRng};
        let g = generate_roadmap(n, 50.0, 50.0, 12.0, seed).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let h = relabel(&g, &perm);
        let (a, b) = (compute_features(&g).unwrap(), compute_features(&h).unwrap());
        prop_assert_eq!(a.node_density, b.node_density);
        prop_assert!((a.min_arc_stddev - b.min_arc_stddev).abs() <= 1e-12 * a.min_arc_stddev.max(1.0));
    }
}
