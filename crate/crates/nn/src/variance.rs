//! Bootstrap comparison of three empirical-risk estimators on a task whose
//! label survives vertex deletion (a δ-hereditary task).
//!
//! With fixed model weights, identity ρ and squared loss, each item yields
//! three per-item losses:
//!
//! * whole-graph: loss of φ applied to the full-graph representation,
//! * per-card average: mean over all k-cards of the loss of each card's
//!   mapped representation,
//! * pooled-card: loss of the mean over all k-cards of the mapped
//!   representations.
//!
//! Bootstrapping the dataset then gives the variance of each estimator's
//! mean; the pooled-card estimator is the least variable and the
//! whole-graph estimator the most.

use crate::error::{Error, Result};
use crate::head::Pooling;
use crate::loss::mse;
use crate::model::{target_values, KRule, ReconModel};
use rand::Rng;
use rayon::prelude::*;
use recon_core::combin::all_subsets;
use recon_core::dataset::Item;
use recon_core::graph::Graph;
use recon_core::rng::stream;
use serde::{Deserialize, Serialize};

/// Per-item label oracle used to validate that a task really is hereditary:
/// it must produce the item's target on the item's graph and on every card
/// the estimators will see.
pub type LabelOracle = dyn Fn(&Graph) -> Vec<f64> + Sync;

/// Connectivity as a real-valued label (1.0 when connected).
pub fn connectivity_label(g: &Graph) -> Vec<f64> {
    vec![if g.is_connected() { 1.0 } else { 0.0 }]
}

/// Result of the three-estimator bootstrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub var_gnn: f64,
    pub var_aug: f64,
    pub var_recon: f64,
    /// Bootstrap confidence that var_recon ≤ var_aug ≤ var_gnn.
    pub confidence: f64,
    pub trials: usize,
    pub item_count: usize,
    pub ell: usize,
}

impl VarianceReport {
    pub fn ordering_holds(&self) -> bool {
        self.var_recon <= self.var_aug && self.var_aug <= self.var_gnn
    }
}

/// Runs the three-estimator bootstrap with `trials` resamples.
///
/// Preconditions: the model's k-rule must be `n − ℓ`, ρ must be the identity
/// and pooling must be `mean` (so the pooled-card estimator is exactly the
/// mean of the per-card representations and squared loss composed with ρ is
/// convex). Every card the estimators see is checked against `label`: a
/// mismatch anywhere makes the task non-hereditary at this card size and the
/// experiment refuses to run.
pub fn variance_experiment(
    items: &[Item],
    model: &ReconModel,
    trials: usize,
    seed: u64,
    label: &LabelOracle,
) -> Result<VarianceReport> {
    if items.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument(
            "variance experiment needs items and at least one trial".into(),
        ));
    }
    let ell = match model.k_rule {
        KRule::NMinus { ell } => ell,
        _ => {
            return Err(Error::InvalidArgument(
                "variance experiment needs an n−ℓ card-size rule".into(),
            ))
        }
    };
    if !model.head.rho.is_identity() {
        return Err(Error::InvalidArgument(
            "variance experiment needs an identity output map so that squared loss \
             stays convex in the pooled representation"
            .into(),
        ));
    }
    if model.head.pooling != Pooling::Mean {
        return Err(Error::InvalidArgument(
            "variance experiment needs mean pooling".into(),
        ));
    }

    let triples: Vec<(f64, f64, f64)> = items
        .par_iter()
        .enumerate()
        .map(|(idx, item)| item_losses(idx, item, model, label))
        .collect::<Result<_>>()?;

    let mut rng = stream(seed, "variance-bootstrap");
    let n = triples.len();
    let mut means = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut sums = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let pick = triples[rng.gen_range(0..n)];
            sums.0 += pick.0;
            sums.1 += pick.1;
            sums.2 += pick.2;
        }
        let count = n as f64;
        means.push((sums.0 / count, sums.1 / count, sums.2 / count));
    }
    let (var_gnn, var_aug, var_recon) = variances(&means);

    let mut conf_rng = stream(seed, "variance-confidence");
    let mut holds = 0usize;
    for _ in 0..trials {
        let resample: Vec<(f64, f64, f64)> = (0..means.len())
            .map(|_| means[conf_rng.gen_range(0..means.len())])
            .collect();
        let (a, b, c) = variances(&resample);
        if c <= b && b <= a {
            holds += 1;
        }
    }

    Ok(VarianceReport {
        var_gnn,
        var_aug,
        var_recon,
        confidence: holds as f64 / trials as f64,
        trials,
        item_count: items.len(),
        ell,
    })
}

/// The three per-item losses, computed over all cards exactly.
fn item_losses(
    idx: usize,
    item: &Item,
    model: &ReconModel,
    label: &LabelOracle,
) -> Result<(f64, f64, f64)> {
    let g = &item.graph;
    let target = target_values(&item.target);
    if label(g) != target {
        return Err(Error::InvalidDataset(format!(
            "item {idx}: label oracle disagrees with the stored target"
        )));
    }
    let k = model.resolve_k(g.n());

    let whole_rep = model.head.phi.forward(&model.base.forward(g)?)?;
    let a = mse(whole_rep.data(), &target)?.0;

    let mut per_card_loss = 0.0;
    let mut pooled = vec![0.0; whole_rep.cols()];
    let subsets = all_subsets(g.n(), k);
    for s in &subsets {
        let card = g.induced_subgraph(s)?;
        if label(&card) != target {
            return Err(Error::InvalidDataset(format!(
                "item {idx}: a {k}-vertex card changes the label, so the task is \
                 not hereditary at this card size"
            )));
        }
        let rep = model.head.phi.forward(&model.base.forward(&card)?)?;
        per_card_loss += mse(rep.data(), &target)?.0;
        for (p, r) in pooled.iter_mut().zip(rep.data()) {
            *p += r;
        }
    }
    let count = subsets.len() as f64;
    let b = per_card_loss / count;
    pooled.iter_mut().for_each(|v| *v /= count);
    let c = mse(&pooled, &target)?.0;
    Ok((a, b, c))
}

fn variances(samples: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mut mean = (0.0, 0.0, 0.0);
    for s in samples {
        mean.0 += s.0;
        mean.1 += s.1;
        mean.2 += s.2;
    }
    mean.0 /= n;
    mean.1 /= n;
    mean.2 /= n;
    let mut var = (0.0, 0.0, 0.0);
    for s in samples {
        var.0 += (s.0 - mean.0) * (s.0 - mean.0);
        var.1 += (s.1 - mean.1) * (s.1 - mean.1);
        var.2 += (s.2 - mean.2) * (s.2 - mean.2);
    }
    (var.0 / n, var.1 / n, var.2 / n)
}
