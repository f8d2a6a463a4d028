//! Canonical-form correctness against brute-force isomorphism, plus the
//! graph primitives the canonizer relies on.

use recon_core::canon::{canonical_form, canonical_form_with_cap};
use recon_core::enumerate::enumerate_graphs;
use recon_core::generators::{cycle_graph, path_graph, petersen_graph};
use recon_core::graph::Graph;
use recon_core::rng::stream;
use recon_core::Error;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Isomorphism by trying all vertex bijections.
fn brute_force_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let n = a.n();
    let mut perm: Vec<usize> = (0..n).collect();
    permute_all(&mut perm, 0, &mut |p| {
        a.edges().iter().all(|&(u, v)| b.has_edge(p[u], p[v]))
    })
}

fn permute_all(perm: &mut Vec<usize>, at: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if at == perm.len() {
        return check(perm);
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        if permute_all(perm, at + 1, check) {
            perm.swap(at, i);
            return true;
        }
        perm.swap(at, i);
    }
    false
}

#[test]
fn induced_subgraph_of_cycle_is_path() {
    let c4 = cycle_graph(4).unwrap();
    let sub = c4.induced_subgraph(&[0, 1, 2]).unwrap();
    assert_eq!(sub.n(), 3);
    assert_eq!(sub.edges(), &[(0, 1), (1, 2)]);
    assert_eq!(
        canonical_form(&sub).unwrap(),
        canonical_form(&path_graph(3).unwrap()).unwrap()
    );
}

#[test]
fn induced_subgraph_on_all_vertices_is_identity() {
    let g = petersen_graph();
    let all: Vec<usize> = (0..10).collect();
    let sub = g.induced_subgraph(&all).unwrap();
    assert_eq!(sub.edges(), g.edges());
}

#[test]
fn induced_subgraph_edges_match_membership_oracle() {
    let g = petersen_graph();
    let mut rng = stream(11, "induced-oracle");
    for _ in 0..50 {
        let mut verts: Vec<usize> = (0..10).collect();
        verts.shuffle(&mut rng);
        let mut s: Vec<usize> = verts[..6].to_vec();
        s.sort_unstable();
        let sub = g.induced_subgraph(&s).unwrap();
        let expected = s
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| s.iter().enumerate().skip(i + 1).map(move |(j, &v)| (i, j, u, v)))
            .filter(|&(_, _, u, v)| g.has_edge(u, v))
            .count();
        assert_eq!(sub.m(), expected);
        for (i, &u) in s.iter().enumerate() {
            for (j, &v) in s.iter().enumerate().skip(i + 1) {
                assert_eq!(sub.has_edge(i, j), g.has_edge(u, v));
            }
        }
    }
}

#[test]
fn permuted_cycle_has_equal_form() {
    let c5 = cycle_graph(5).unwrap();
    let mut rng = stream(3, "perm-c5");
    for _ in 0..20 {
        let p = random_permutation(5, &mut rng);
        let h = c5.permuted(&p).unwrap();
        assert_eq!(canonical_form(&c5).unwrap(), canonical_form(&h).unwrap());
    }
}

#[test]
fn six_cycle_and_two_triangles_have_different_forms() {
    let c6 = cycle_graph(6).unwrap();
    let c3 = cycle_graph(3).unwrap();
    let two_c3 = c3.disjoint_union(&c3);
    assert_ne!(canonical_form(&c6).unwrap(), canonical_form(&two_c3).unwrap());
}

#[test]
fn four_vertex_forms_match_brute_force_classes() {
    let mut reps: Vec<Graph> = Vec::new();
    for mask in 0u32..64 {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(4, edges).unwrap();
        if !reps.iter().any(|r| brute_force_isomorphic(r, &g)) {
            reps.push(g);
        }
    }
    assert_eq!(reps.len(), 11);
    let mut forms: Vec<_> = reps.iter().map(|g| canonical_form(g).unwrap()).collect();
    forms.sort();
    forms.dedup();
    assert_eq!(forms.len(), 11);
}

#[test]
fn forms_agree_with_brute_force_on_all_five_vertex_pairs() {
    let classes = enumerate_graphs(5).unwrap();
    assert_eq!(classes.len(), 34);
    for i in 0..classes.len() {
        for j in i..classes.len() {
            let iso = brute_force_isomorphic(&classes[i], &classes[j]);
            let same_form =
                canonical_form(&classes[i]).unwrap() == canonical_form(&classes[j]).unwrap();
            assert_eq!(iso, same_form, "classes {i} and {j} disagree with the oracle");
        }
    }
}

#[test]
fn forms_are_permutation_invariant_across_sizes() {
    let mut rng = stream(17, "perm-invariance");
    for n in 1..=6 {
        for g in enumerate_graphs(n).unwrap() {
            let form = canonical_form(&g).unwrap();
            for _ in 0..100 {
                let p = random_permutation(n, &mut rng);
                assert_eq!(form, canonical_form(&g.permuted(&p).unwrap()).unwrap());
            }
        }
    }
    for n in [7usize, 8] {
        let classes = enumerate_graphs(n).unwrap();
        for _ in 0..100 {
            let g = &classes[rng.gen_range(0..classes.len())];
            let form = canonical_form(g).unwrap();
            for _ in 0..25 {
                let p = random_permutation(n, &mut rng);
                assert_eq!(form, canonical_form(&g.permuted(&p).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn attributes_split_isomorphism_classes() {
    let c6 = cycle_graph(6).unwrap();
    let all_same = c6
        .clone()
        .with_vertex_attrs(vec![vec![7]; 6])
        .unwrap();
    let alternating = c6
        .clone()
        .with_vertex_attrs((0..6).map(|v| vec![(v % 2) as i64]).collect())
        .unwrap();
    let plain_form = canonical_form(&c6).unwrap();
    let same_form = canonical_form(&all_same).unwrap();
    let alt_form = canonical_form(&alternating).unwrap();
    assert_ne!(plain_form, same_form);
    assert_ne!(same_form, alt_form);

    let mut rng = stream(23, "perm-attrs");
    for _ in 0..25 {
        let p = random_permutation(6, &mut rng);
        let permuted = alternating.permuted(&p).unwrap();
        assert_eq!(alt_form, canonical_form(&permuted).unwrap());
    }

    let rotated = c6
        .with_vertex_attrs((0..6).map(|v| vec![((v + 1) % 2) as i64]).collect())
        .unwrap();
    assert_eq!(alt_form, canonical_form(&rotated).unwrap());
}

#[test]
fn cap_is_enforced_and_raisable() {
    let p17 = path_graph(17).unwrap();
    assert!(matches!(canonical_form(&p17), Err(Error::UnsupportedSize(_))));
    let mut rng = stream(29, "cap-raise");
    let p = random_permutation(17, &mut rng);
    let permuted = p17.permuted(&p).unwrap();
    assert_eq!(
        canonical_form_with_cap(&p17, 20).unwrap(),
        canonical_form_with_cap(&permuted, 20).unwrap()
    );
}

#[test]
fn form_hex_round_trips() {
    let form = canonical_form(&petersen_graph()).unwrap();
    let hex = form.to_hex();
    let back = recon_core::canon::CanonicalForm::from_hex(&hex).unwrap();
    assert_eq!(form, back);
    let json = serde_json::to_string(&form).unwrap();
    let reparsed: recon_core::canon::CanonicalForm = serde_json::from_str(&json).unwrap();
    assert_eq!(form, reparsed);
}

#[test]
fn form_decodes_to_a_graph_with_the_same_form() {
    for n in 1..=6 {
        for g in enumerate_graphs(n).unwrap() {
            let form = canonical_form(&g).unwrap();
            let decoded = form.to_graph().unwrap();
            assert_eq!(decoded.n(), g.n());
            assert_eq!(decoded.m(), g.m());
            assert_eq!(canonical_form(&decoded).unwrap(), form);
        }
    }
    let attributed = cycle_graph(4)
        .unwrap()
        .with_vertex_attrs(vec![vec![1]; 4])
        .unwrap();
    let form = canonical_form(&attributed).unwrap();
    assert!(form.to_graph().is_err());
}

#[test]
fn graph_json_matches_documented_shape() {
    let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    let json = serde_json::to_value(&g).unwrap();
    assert_eq!(json, serde_json::json!({"n": 3, "edges": [[0, 1], [1, 2]]}));
    let attributed = g.with_vertex_attrs(vec![vec![1], vec![2], vec![3]]).unwrap();
    let json = serde_json::to_value(&attributed).unwrap();
    assert_eq!(
        json,
        serde_json::json!({"n": 3, "edges": [[0, 1], [1, 2]], "vertex_attrs": [[1], [2], [3]]})
    );
    let back: Graph = serde_json::from_value(json).unwrap();
    assert_eq!(back.vertex_attrs().unwrap()[2], vec![3]);
}

#[test]
fn edge_list_text_round_trips() {
    let g = petersen_graph();
    let text = g.to_edge_list_text();
    let back = Graph::from_edge_list_text(&text).unwrap();
    assert_eq!(g.edges(), back.edges());
    assert!(Graph::from_edge_list_text("2 1\n0 1\n0 1").is_err());
}
