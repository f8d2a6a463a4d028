//! Structural invariants of the card-pooling models: permutation
//! invariance, deck-determinedness, sampling consistency, the match
//! between representation separation and the deck WL test, the convexity
//! upper bound of the sampled risk, and end-to-end separation of the
//! skip-cycle pair after training.

use rand::seq::SliceRandom;
use recon_core::dataset::{Item, Splits, Target};
use recon_core::generators::{csl_graph, er_graph, spider_graph, srg_pair};
use recon_core::recon::deck_wl_distinguishes_with_budget;
use recon_core::rng::{item_stream, stream};
use recon_core::{canonical_form, Graph};
use recon_nn::gradcheck::permutation_deviation;
use recon_nn::head::{DeepSetsHead, Mlp, Pooling};
use recon_nn::train::{empirical_risk, RiskMode};
use recon_nn::{
    build_model, evaluate, train, ConvKind, GnnModel, KRule, LossKind, Metric, ModelConfig,
    Readout, ReconModel, TrainConfig,
};

const TOL: f64 = 1e-9;

fn small_config() -> ModelConfig {
    ModelConfig {
        conv: ConvKind::Gin,
        layers: 2,
        hidden: 8,
        readout: Readout::Sum,
        jumping_knowledge: false,
        standardize: false,
        k_rule: KRule::NMinus { ell: 1 },
        train_samples: 1,
        eval_samples: 1,
        concat_original: false,
        head_hidden: 8,
        pooling: Pooling::Sum,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "outputs must have equal width");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn exact_forward_is_invariant_under_100_vertex_relabelings() {
    let cfg = ModelConfig {
        k_rule: KRule::HalfCeil,
        standardize: true,
        ..small_config()
    };
    let model = build_model(&cfg, 3, 5).unwrap();
    let mut rng = stream(5, "invariance-graph");
    let g = er_graph(8, 0.5, &mut rng);
    let deviation = permutation_deviation(&model, &g, 100, 11).unwrap();
    assert!(
        deviation <= TOL,
        "exact forward moved by {deviation:.3e} under relabeling"
    );
}

#[test]
fn gin_sum_readout_separates_star_from_path_with_random_weights() {
    let star = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
    let path = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
    let mut separated = 0usize;
    for seed in 0..20u64 {
        let mut rng = stream(seed, "star-path-init");
        let model =
            GnnModel::new(ConvKind::Gin, 1, 8, 2, Readout::Sum, false, false, &mut rng).unwrap();
        let a = model.forward(&star).unwrap();
        let b = model.forward(&path).unwrap();
        if max_abs_diff(a.data(), b.data()) > TOL {
            separated += 1;
        }
    }
    assert!(
        separated >= 19,
        "random-weight separation succeeded on only {separated}/20 seeds"
    );
}

#[test]
fn exact_forward_agrees_on_graphs_with_equal_half_decks() {
    let a = spider_graph(&[3, 1, 1]).unwrap();
    let b = spider_graph(&[2, 2, 1]).unwrap();
    assert_ne!(
        canonical_form(&a).unwrap(),
        canonical_form(&b).unwrap(),
        "the spider pair must be non-isomorphic for this check to mean anything"
    );

    let cfg = ModelConfig {
        k_rule: KRule::HalfCeil,
        standardize: true,
        ..small_config()
    };
    let model = build_model(&cfg, 2, 17).unwrap();
    let out_a = model.forward_exact(&a).unwrap();
    let out_b = model.forward_exact(&b).unwrap();
    assert!(
        max_abs_diff(&out_a, &out_b) <= TOL,
        "equal 3-decks must produce equal card-pooled representations"
    );

    let concat_cfg = ModelConfig {
        concat_original: true,
        ..cfg
    };
    let concat_model = build_model(&concat_cfg, 2, 17).unwrap();
    let cat_a = concat_model.forward_exact(&a).unwrap();
    let cat_b = concat_model.forward_exact(&b).unwrap();
    assert!(
        max_abs_diff(&cat_a, &cat_b) > TOL,
        "appending the whole-graph representation must re-separate this 1-WL-distinguishable pair"
    );
}

#[test]
fn sampling_deviation_shrinks_toward_the_exact_forward() {
    let cfg = ModelConfig {
        k_rule: KRule::Absolute { k: 4 },
        ..small_config()
    };
    let mut model = build_model(&cfg, 3, 24).unwrap();
    let mut rng = stream(24, "sampling-consistency-graph");
    let g = er_graph(10, 0.4, &mut rng);
    let exact = model.forward_exact(&g).unwrap();

    let total = 210usize;
    let sizes = [1, total / 4, total / 2, total];
    let mut max_devs = Vec::new();
    for (si, &size) in sizes.iter().enumerate() {
        model.train_samples = size;
        let mut worst = 0.0f64;
        for draw in 0..30u64 {
            let mut draw_rng = item_stream(29, "sampling-consistency-draw", si as u64 * 100 + draw);
            let sampled = model.forward_sampled_rng(&g, &mut draw_rng).unwrap();
            worst = worst.max(max_abs_diff(&sampled, &exact));
        }
        max_devs.push(worst);
    }

    assert!(max_devs[0] > 0.0, "single-card samples must deviate");
    for w in max_devs.windows(2) {
        assert!(
            w[1] <= w[0],
            "worst deviation must shrink with sample size, got {max_devs:?}"
        );
    }
    assert_eq!(
        max_devs[3], 0.0,
        "the full sample must reproduce the exact forward bitwise"
    );
}

#[test]
fn representation_separation_tracks_the_deck_wl_test() {
    let deep_config = |k_rule| ModelConfig {
        layers: 6,
        standardize: true,
        k_rule,
        ..small_config()
    };
    let (rook, shrikhande) = srg_pair();
    let pairs: [(&Graph, &Graph, usize); 2] =
        [(&rook, &shrikhande, 14), (&rook, &shrikhande, 15)];
    for (a, b, k) in pairs {
        let model = build_model(&deep_config(KRule::Absolute { k }), 3, 31).unwrap();
        let out_a = model.forward_exact_with_budget(a, 4096).unwrap();
        let out_b = model.forward_exact_with_budget(b, 4096).unwrap();
        let gap = max_abs_diff(&out_a, &out_b);
        let wl_separates = deck_wl_distinguishes_with_budget(a, b, k, 4096).unwrap();
        if wl_separates {
            assert!(gap > 1e-7, "deck WL separates at k = {k} but the model gap is {gap:.3e}");
        } else {
            assert!(gap <= TOL, "deck WL is blind at k = {k} but the model gap is {gap:.3e}");
        }
    }

    let near = csl_graph(11, 2).unwrap();
    let far = csl_graph(11, 3).unwrap();
    let model = build_model(&deep_config(KRule::NMinus { ell: 1 }), 3, 37).unwrap();
    assert!(deck_wl_distinguishes_with_budget(&near, &far, 10, 64).unwrap());
    let gap = max_abs_diff(
        &model.forward_exact(&near).unwrap(),
        &model.forward_exact(&far).unwrap(),
    );
    assert!(gap > 1e-7, "skip-cycle pair gap was only {gap:.3e}");

    let iso_a = csl_graph(9, 2).unwrap();
    let iso_b = csl_graph(9, 4).unwrap();
    assert_eq!(
        canonical_form(&iso_a).unwrap(),
        canonical_form(&iso_b).unwrap(),
        "the skips 2 and 4 give isomorphic 9-vertex skip cycles"
    );
    assert!(!deck_wl_distinguishes_with_budget(&iso_a, &iso_b, 8, 64).unwrap());
    let iso_gap = max_abs_diff(
        &model.forward_exact(&iso_a).unwrap(),
        &model.forward_exact(&iso_b).unwrap(),
    );
    assert!(iso_gap <= TOL, "isomorphic pair gap was {iso_gap:.3e}");
}

#[test]
fn sampled_risk_expectation_upper_bounds_the_exact_risk() {
    let mut rng = stream(41, "risk-model");
    let base = GnnModel::new(ConvKind::Gin, 1, 8, 2, Readout::Mean, false, false, &mut rng).unwrap();
    let phi = Mlp::new(&[base.output_dim(), 3], &mut rng);
    let model = ReconModel::new(
        base,
        DeepSetsHead {
            phi,
            rho: Mlp::identity(),
            pooling: Pooling::Mean,
        },
        KRule::NMinus { ell: 1 },
        2,
        2,
        false,
    )
    .unwrap();

    let mut graph_rng = stream(41, "risk-items");
    let items: Vec<Item> = (0..12)
        .map(|_| Item {
            graph: er_graph(10, 0.4, &mut graph_rng),
            target: Target::Values(vec![0.3, -0.4, 0.1]),
        })
        .collect();
    let indices: Vec<usize> = (0..items.len()).collect();

    let exact = empirical_risk(&model, &items, &indices, LossKind::SquaredError, RiskMode::Exact, 0)
        .unwrap()
        .value;
    let draws = 400u64;
    let mean_sampled = (0..draws)
        .map(|s| {
            empirical_risk(
                &model,
                &items,
                &indices,
                LossKind::SquaredError,
                RiskMode::SampledSurrogate,
                1000 + s,
            )
            .unwrap()
            .value
        })
        .sum::<f64>()
        / draws as f64;
    assert!(
        mean_sampled > exact,
        "squared loss through an identity output map is convex, so the sampled surrogate \
         ({mean_sampled:.6}) must upper-bound the exact risk ({exact:.6})"
    );
}

#[test]
fn trained_model_assigns_distinct_classes_to_skip_cycle_pair() {
    let near = csl_graph(11, 2).unwrap();
    let far = csl_graph(11, 3).unwrap();

    let copies = 30usize;
    let mut items = Vec::with_capacity(2 * copies);
    for c in 0..copies {
        for (class, g) in [(0usize, &near), (1usize, &far)] {
            let mut perm: Vec<usize> = (0..g.n()).collect();
            let mut perm_rng = item_stream(43, "skip-cycle-copy", (c * 2 + class) as u64);
            perm.shuffle(&mut perm_rng);
            items.push(Item {
                graph: g.permuted(&perm).unwrap(),
                target: Target::Class(class),
            });
        }
    }
    let splits = Splits {
        train: (0..40).collect(),
        val: (40..50).collect(),
        test: (50..60).collect(),
    };

    let cfg = ModelConfig {
        conv: ConvKind::Gcn,
        layers: 3,
        hidden: 16,
        standardize: true,
        k_rule: KRule::NMinus { ell: 1 },
        train_samples: 5,
        eval_samples: 200,
        head_hidden: 16,
        pooling: Pooling::Mean,
        ..small_config()
    };
    let model = build_model(&cfg, 2, 47).unwrap();
    let outcome = train(
        model,
        &items,
        &splits,
        &TrainConfig {
            epochs: 30,
            batch_size: 8,
            lr: 2e-3,
            loss: LossKind::CrossEntropy,
            seed: 47,
        },
    )
    .unwrap();

    let argmax = |v: &[f64]| -> usize {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0
    };
    let class_near = argmax(&outcome.model.forward_exact(&near).unwrap());
    let class_far = argmax(&outcome.model.forward_exact(&far).unwrap());
    assert_ne!(
        class_near, class_far,
        "training on permuted copies must leave the two skip cycles in different classes"
    );
}

#[test]
fn half_card_skip_cycle_accuracy_does_not_exceed_vertex_deleted() {
    let ds = recon_core::dataset::build_dataset(&recon_core::dataset::DatasetSpec::new(
        recon_core::dataset::DatasetKind::Csl,
        7,
    ))
    .unwrap();
    let fold = &ds.stratified_folds(5).unwrap()[0];
    let classes = ds.class_count().unwrap();

    let mut accs = Vec::new();
    for k_rule in [KRule::NMinus { ell: 1 }, KRule::HalfCeil] {
        let cfg = ModelConfig {
            conv: ConvKind::Gcn,
            layers: 4,
            hidden: 16,
            standardize: true,
            k_rule,
            train_samples: 10,
            eval_samples: 50,
            head_hidden: 32,
            pooling: Pooling::Mean,
            ..small_config()
        };
        let model = build_model(&cfg, classes, 53).unwrap();
        let outcome = train(
            model,
            ds.items(),
            fold,
            &TrainConfig {
                epochs: 25,
                batch_size: 16,
                lr: 1e-3,
                loss: LossKind::CrossEntropy,
                seed: 53,
            },
        )
        .unwrap();
        accs.push(evaluate(&outcome.model, ds.items(), &fold.test, Metric::Accuracy, 53).unwrap());
    }
    assert!(
        accs[1] <= accs[0],
        "half-size cards scored {:.3} but vertex-deleted cards scored {:.3}",
        accs[1],
        accs[0]
    );
}
