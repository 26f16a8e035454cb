mod common;

use std::collections::BTreeSet;

use common::{adjacency_power, arb_digraph, dfs_walks};
use entromag::graph::{
    bernoulli_edge_subsample, count_walks, erdos_renyi, is_acyclic, largest_weak_component,
    parse_digraph, shortest_path_matrix, weak_components, write_edge_list, Digraph, Format,
    GraphError,
};
use num_bigint::BigUint;
use proptest::prelude::*;

proptest! {
    #[test]
    fn reverse_is_an_involution(d in arb_digraph(8, true)) {
        prop_assert_eq!(d.reverse().reverse(), d);
    }

    #[test]
    fn walk_counts_match_dfs(d in arb_digraph(6, true), len in 0usize..=8) {
        let brute: u64 = (0..d.vertex_count()).map(|v| dfs_walks(&d, v, len)).sum();
        prop_assert_eq!(count_walks(&d, len), BigUint::from(brute));
    }

    #[test]
    fn distances_satisfy_triangle_inequality(d in arb_digraph(7, true)) {
        let m = shortest_path_matrix(&d);
        let n = d.vertex_count();
        for j in 0..n {
            prop_assert_eq!(m.get(j, j), Some(0));
            for k in 0..n {
                for l in 0..n {
                    if let (Some(a), Some(b)) = (m.get(j, k), m.get(k, l)) {
                        let c = m.get(j, l);
                        prop_assert!(c.is_some_and(|c| c <= a + b), "{j}->{k}->{l}");
                    }
                }
            }
        }
        for (u, v) in d.edges() {
            prop_assert!(m.get(u, v).is_some_and(|x| x <= 1));
        }
    }

    #[test]
    fn largest_weak_component_is_connected_and_largest(d in arb_digraph(9, false)) {
        let lwc = largest_weak_component(&d);
        prop_assert_eq!(weak_components(&lwc).len(), 1);
        let biggest = weak_components(&d).iter().map(Vec::len).max().unwrap();
        prop_assert_eq!(lwc.vertex_count(), biggest);
    }

    #[test]
    fn acyclic_iff_adjacency_nilpotent(d in arb_digraph(6, true)) {
        let n = d.vertex_count();
        let zero = adjacency_power(&d, n).iter().flatten().all(|x| *x == BigUint::ZERO);
        prop_assert_eq!(is_acyclic(&d), zero);
    }

    #[test]
    fn edge_list_round_trip(d in arb_digraph(8, true)) {
        let mut buf = Vec::new();
        write_edge_list(&d, &mut buf).unwrap();
        let back = parse_digraph(std::str::from_utf8(&buf).unwrap(), Format::EdgeList).unwrap();
        prop_assert_eq!(back.duplicates, 0);
        prop_assert_eq!(back.graph, d);
    }

    #[test]
    fn random_generators_are_pure(n in 1usize..40, q in 0.0f64..1.0, seed: u64, p in 0.0f64..=1.0) {
        let g = erdos_renyi(n, q, seed);
        prop_assert_eq!(&g, &erdos_renyi(n, q, seed));
        prop_assert!(!g.has_loops());
        let s = bernoulli_edge_subsample(&g, p, seed);
        prop_assert_eq!(&s, &bernoulli_edge_subsample(&g, p, seed));
        prop_assert_eq!(s.vertex_count(), g.vertex_count());
        prop_assert!(s.edges().all(|(u, v)| g.has_edge(u, v)));
    }
}

#[test]
fn subsample_extremes() {
    let g = erdos_renyi(30, 0.2, 11);
    assert_eq!(bernoulli_edge_subsample(&g, 0.0, 3), g);
    assert_eq!(bernoulli_edge_subsample(&g, 1.0, 3).edge_count(), 0);
}

#[test]
fn er_edge_density_is_plausible() {
    // 9900 ordered pairs at q = 0.04: mean 396, sd about 19.5
    let e = erdos_renyi(100, 0.04, 20240601).edge_count() as f64;
    assert!((e - 396.0).abs() < 6.0 * 19.5, "{e}");
}

#[test]
fn formats_agree() {
    let edges = "a b\nb c\nc a\nd\n";
    let dot = "digraph G {\n  a -> b [weight=2];\n  b -> c; c -> a;\n  d;\n}\n";
    let flare = r#"[
        {"name": "a", "imports": ["b"]},
        {"name": "b", "imports": ["c"]},
        {"name": "c", "imports": ["a"]},
        {"name": "d", "imports": []}
    ]"#;
    let e = parse_digraph(edges, Format::EdgeList).unwrap().graph;
    let set = |g: &Digraph| {
        (
            g.labelled_edges(),
            g.labels().iter().cloned().collect::<BTreeSet<_>>(),
        )
    };
    assert_eq!(
        set(&e),
        set(&parse_digraph(dot, Format::Dot).unwrap().graph)
    );
    assert_eq!(
        set(&e),
        set(&parse_digraph(flare, Format::FlareJson).unwrap().graph)
    );
    assert_eq!(e.vertex_count(), 4);
}

#[test]
fn duplicates_are_counted() {
    let l = parse_digraph("a b\na b\nb a\n", Format::EdgeList).unwrap();
    assert_eq!(l.duplicates, 1);
    assert_eq!(l.graph.edge_count(), 2);
}

#[test]
fn malformed_inputs_are_parse_errors() {
    assert!(matches!(
        parse_digraph("a b\na b c\n", Format::EdgeList),
        Err(GraphError::Parse { line: 2, .. })
    ));
    assert!(parse_digraph("[{\"name\": 3}]", Format::FlareJson).is_err());
    assert!(parse_digraph("digraph { a -> ; }", Format::Dot).is_err());
}

#[test]
fn flare_fixture_loads() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/flare-sample.json"
    );
    let text = std::fs::read_to_string(path).unwrap();
    let g = parse_digraph(&text, Format::FlareJson).unwrap().graph;
    assert_eq!(g.vertex_count(), 10);
    assert!(!g.has_loops());
}
