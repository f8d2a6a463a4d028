//! Randomized structural properties over small graphs.

use proptest::prelude::*;
use recon_core::canon::canonical_form;
use recon_core::deck::deck;
use recon_core::graph::Graph;

fn small_graph_and_perm() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (1usize..=7).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            prop::collection::vec(any::<bool>(), pairs),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(bits, perm)| {
                let mut edges = Vec::new();
                let mut idx = 0usize;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[idx] {
                            edges.push((u, v));
                        }
                        idx += 1;
                    }
                }
                (Graph::new(n, edges).expect("generated edges are valid"), perm)
            })
    })
}

proptest! {
    #[test]
    fn canonical_form_ignores_vertex_order((g, perm) in small_graph_and_perm()) {
        let relabeled = g.permuted(&perm).unwrap();
        prop_assert_eq!(
            canonical_form(&g).unwrap(),
            canonical_form(&relabeled).unwrap()
        );
    }

    #[test]
    fn decks_ignore_vertex_order((g, perm) in small_graph_and_perm()) {
        let relabeled = g.permuted(&perm).unwrap();
        let k = (g.n() + 1) / 2;
        prop_assert_eq!(deck(&g, k).unwrap(), deck(&relabeled, k).unwrap());
    }

    #[test]
    fn graph_json_round_trips((g, _) in small_graph_and_perm()) {
        let json = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(g.edges(), back.edges());
        prop_assert_eq!(g.n(), back.n());
    }
}
