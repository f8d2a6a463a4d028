//! Deck-equality analyses: audits, Kelly counts, deck-level WL power, the
//! subgraph-lattice fingerprint, and the cycle-recognition size conditions.

use recon_core::canon::canonical_form;
use recon_core::deck::{deck, Deck};
use recon_core::enumerate::enumerate_graphs;
use recon_core::generators::{complete_graph, csl_graph, cycle_graph, petersen_graph, spider_graph, srg_pair};
use recon_core::recon::{
    audit_k_reconstructibility, cycle_theorem_conditions, deck_wl_distinguishes,
    full_reconstruction_fingerprint, kelly_count, same_deck, Family,
};
use recon_core::wl::{wl_distinguishes, WlArity};
use recon_core::{Error, Graph};
use std::collections::BTreeMap;

#[test]
fn same_deck_accepts_permuted_cycle() {
    let c5 = cycle_graph(5).unwrap();
    let perm = [3usize, 1, 4, 0, 2];
    let h = c5.permuted(&perm).unwrap();
    assert!(same_deck(&c5, &h, 4).unwrap());
}

#[test]
fn same_deck_separates_six_cycle_from_triangles() {
    let c6 = cycle_graph(6).unwrap();
    let c3 = cycle_graph(3).unwrap();
    let two_c3 = c3.disjoint_union(&c3);
    assert!(!same_deck(&c6, &two_c3, 5).unwrap());
    assert!(matches!(
        same_deck(&c6, &cycle_graph(5).unwrap(), 4),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn known_spider_pair_shares_half_deck() {
    let a = spider_graph(&[3, 1, 1]).unwrap();
    let b = spider_graph(&[2, 2, 1]).unwrap();
    assert_ne!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    assert!(wl_distinguishes(&a, &b, WlArity::One).unwrap());
    assert!(same_deck(&a, &b, 3).unwrap());
    assert!(!same_deck(&a, &b, 4).unwrap());
}

#[test]
fn decks_match_per_vertex_deletion_oracle() {
    for g in enumerate_graphs(5).unwrap() {
        let d = deck(&g, 4).unwrap();
        let mut expected: BTreeMap<_, u64> = BTreeMap::new();
        for v in 0..5 {
            let keep: Vec<usize> = (0..5).filter(|&u| u != v).collect();
            let card = g.induced_subgraph(&keep).unwrap();
            *expected.entry(canonical_form(&card).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(d.cards(), &expected);
    }
}

#[test]
fn kelly_edge_identity_holds_on_six_vertices() {
    for g in enumerate_graphs(6).unwrap() {
        let d = deck(&g, 5).unwrap();
        let edge_sum: u64 = d
            .cards()
            .iter()
            .map(|(form, mult)| {
                let edges = form_edge_count(form);
                edges * mult
            })
            .sum();
        assert_eq!(edge_sum, g.m() as u64 * 4);
    }
}

fn form_edge_count(form: &recon_core::canon::CanonicalForm) -> u64 {
    let bytes = form.bytes();
    let n = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
    let bits = &bytes[3..];
    let mut count = 0u64;
    for idx in 0..n * (n - 1) / 2 {
        if bits[idx / 8] >> (7 - idx % 8) & 1 == 1 {
            count += 1;
        }
    }
    count
}

#[test]
fn kelly_count_recovers_small_pattern_counts() {
    let k3 = complete_graph(3).unwrap();
    let k2 = complete_graph(2).unwrap();
    assert_eq!(kelly_count(&deck(&k3, 2).unwrap(), &k2).unwrap(), 3);

    let c5 = cycle_graph(5).unwrap();
    assert_eq!(kelly_count(&deck(&c5, 4).unwrap(), &k2).unwrap(), 5);

    let petersen = petersen_graph();
    let c5_pattern = cycle_graph(5).unwrap();
    let from_deck = kelly_count(&deck(&petersen, 9).unwrap(), &c5_pattern).unwrap();
    let direct = direct_induced_count(&petersen, &c5_pattern);
    assert_eq!(from_deck, direct);
    assert_eq!(from_deck, 12);
}

fn direct_induced_count(g: &Graph, h: &Graph) -> u128 {
    let target = canonical_form(h).unwrap();
    let mut count = 0u128;
    recon_core::combin::for_each_subset(g.n(), h.n(), |s| {
        let sub = g.induced_subgraph(s).unwrap();
        if canonical_form(&sub).unwrap() == target {
            count += 1;
        }
    });
    count
}

#[test]
fn tampered_deck_fails_divisibility() {
    let p4 = recon_core::generators::path_graph(4).unwrap();
    let honest = deck(&p4, 3).unwrap();
    let mut json = serde_json::to_value(&honest).unwrap();
    let cards = json["cards"].as_object_mut().unwrap();
    let odd_key = cards
        .keys()
        .find(|key| {
            let form = recon_core::canon::CanonicalForm::from_hex(key).unwrap();
            form_edge_count(&form) % 2 == 1
        })
        .expect("deleting an end of the path leaves a card with one edge")
        .clone();
    cards.insert(odd_key, serde_json::json!(3));
    let tampered: Deck = serde_json::from_value(json).unwrap();
    let k2 = complete_graph(2).unwrap();
    assert!(matches!(
        kelly_count(&tampered, &k2),
        Err(Error::CorruptedDeck(_))
    ));
}

#[test]
fn classical_deck_audit_is_clean_on_small_sizes() {
    for n in 3..=6 {
        let report = audit_k_reconstructibility(n, n - 1, Family::All).unwrap();
        assert!(report.reconstructible, "collision at n = {n}");
        assert!(report.collision_groups.is_empty());
    }
}

#[test]
fn whole_graph_deck_audit_is_trivially_clean() {
    let report = audit_k_reconstructibility(3, 3, Family::All).unwrap();
    assert_eq!(report.class_count, 4);
    assert!(report.reconstructible);
}

#[test]
fn three_deck_of_six_vertex_graphs_collides() {
    let report = audit_k_reconstructibility(6, 3, Family::All).unwrap();
    assert!(!report.reconstructible);
    let golden_path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/audit_n6_k3.json");
    let serialized = serde_json::to_string_pretty(&report).unwrap();
    if std::env::var("BLESS").is_ok() {
        std::fs::write(golden_path, &serialized).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path).unwrap();
    assert_eq!(serialized.trim(), golden.trim());
}

#[test]
fn report_json_omits_timing() {
    let report = audit_k_reconstructibility(4, 3, Family::All).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert!(json.get("elapsed_seconds").is_none());
}

#[test]
fn deck_hierarchy_holds_exhaustively_on_six_vertices() {
    let classes = enumerate_graphs(6).unwrap();
    let decks: Vec<Vec<Deck>> = classes
        .iter()
        .map(|g| (3..=5).map(|k| deck(g, k).unwrap()).collect())
        .collect();
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            for k in [5usize, 4] {
                if decks[i][k - 3] == decks[j][k - 3] {
                    assert_eq!(
                        decks[i][k - 4],
                        decks[j][k - 4],
                        "same {k}-deck but different {}-deck for classes {i}, {j}",
                        k - 1
                    );
                }
            }
        }
    }
}

#[test]
fn deck_wl_separates_csl_pair_that_blinds_whole_graph_wl() {
    let a = csl_graph(13, 2).unwrap();
    let b = csl_graph(13, 3).unwrap();
    assert!(!wl_distinguishes(&a, &b, WlArity::One).unwrap());
    assert!(deck_wl_distinguishes(&a, &b, 12).unwrap());
}

#[test]
fn deck_wl_separates_srg_pair_at_fourteen() {
    let (rook, shrikhande) = srg_pair();
    assert!(deck_wl_distinguishes(&rook, &shrikhande, 14).unwrap());
}

#[test]
fn deck_wl_never_separates_isomorphic_graphs() {
    let g = petersen_graph();
    let perm = [5usize, 2, 8, 0, 9, 1, 7, 3, 6, 4];
    let h = g.permuted(&perm).unwrap();
    for k in [5usize, 8, 9] {
        assert!(!deck_wl_distinguishes(&g, &h, k).unwrap());
    }
}

#[test]
fn fingerprint_is_permutation_invariant_and_injective_on_small_sizes() {
    let c6 = cycle_graph(6).unwrap();
    let perm = [4usize, 0, 5, 2, 1, 3];
    assert_eq!(
        full_reconstruction_fingerprint(&c6).unwrap(),
        full_reconstruction_fingerprint(&c6.permuted(&perm).unwrap()).unwrap()
    );

    let mut seen = std::collections::BTreeSet::new();
    let mut total = 0usize;
    for n in 1..=6 {
        for g in enumerate_graphs(n).unwrap() {
            seen.insert(full_reconstruction_fingerprint(&g).unwrap());
            total += 1;
        }
    }
    assert_eq!(seen.len(), total);

    let c3 = cycle_graph(3).unwrap();
    let two_c3 = c3.disjoint_union(&c3);
    assert_ne!(
        full_reconstruction_fingerprint(&c6).unwrap(),
        full_reconstruction_fingerprint(&two_c3).unwrap()
    );

    assert!(matches!(
        full_reconstruction_fingerprint(&cycle_graph(9).unwrap()),
        Err(Error::UnsupportedSize(_))
    ));
}

#[test]
fn attribute_classes_enter_the_fingerprint() {
    let p3 = recon_core::generators::path_graph(3).unwrap();
    let ends_marked = p3
        .clone()
        .with_vertex_attrs(vec![vec![1], vec![0], vec![1]])
        .unwrap();
    let mid_marked = p3
        .clone()
        .with_vertex_attrs(vec![vec![0], vec![1], vec![0]])
        .unwrap();
    assert_ne!(
        full_reconstruction_fingerprint(&ends_marked).unwrap(),
        full_reconstruction_fingerprint(&mid_marked).unwrap()
    );
    assert_ne!(
        full_reconstruction_fingerprint(&p3).unwrap(),
        full_reconstruction_fingerprint(&ends_marked).unwrap()
    );
}

#[test]
fn cycle_conditions_match_direct_evaluation() {
    assert!(cycle_theorem_conditions(50, 1).unwrap().holds);
    assert!(cycle_theorem_conditions(4, 1).unwrap().holds);
    let tight = cycle_theorem_conditions(6, 3).unwrap();
    assert!(!tight.removal_ok);
    assert!(!tight.holds);
    assert!(tight.removal_margin < 0.0);
    assert!(cycle_theorem_conditions(3, 1).is_err());
    assert!(cycle_theorem_conditions(10, 8).is_err());
    assert!(cycle_theorem_conditions(10, 0).is_err());
}
