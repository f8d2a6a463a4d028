//! Minibatch training over sampled card forward passes, evaluation metrics,
//! and empirical-risk reports.
//!
//! Parallelism note: items inside a batch run their forward/backward passes
//! on the rayon pool, each drawing from its own named RNG stream keyed by
//! (epoch, position), and the per-item gradient sets are reduced in item
//! order afterwards. Training trajectories are therefore bit-identical
//! across thread counts.

use crate::error::{Error, Result};
use crate::layers::GradSet;
use crate::loss::LossKind;
use crate::model::{output_loss, target_values, ReconModel};
use crate::optim::Adam;
use rand::Rng;
use rayon::prelude::*;
use recon_core::combin::binomial;
use recon_core::dataset::{Item, Splits, Target};
use recon_core::rng::{item_stream, stream};
use serde::{Deserialize, Serialize};

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            epochs: 50,
            batch_size: 32,
            lr: 1e-3,
            loss: LossKind::CrossEntropy,
            seed: 0,
        }
    }
}

/// Evaluation metric over a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Accuracy,
    Mse,
    /// log₁₀ of the per-task MSEs averaged across tasks.
    Log10Mse,
}

impl Metric {
    /// Whether larger metric values are better.
    pub fn maximize(&self) -> bool {
        matches!(self, Metric::Accuracy)
    }

    /// The natural validation metric for a loss.
    pub fn for_loss(loss: LossKind) -> Metric {
        match loss {
            LossKind::CrossEntropy => Metric::Accuracy,
            LossKind::SquaredError => Metric::Mse,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Mse => "mse",
            Metric::Log10Mse => "log10-mse",
        }
    }
}

/// One row of the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_metric: f64,
}

/// A finished training run: the best-validation checkpoint and the curve.
#[derive(Debug)]
pub struct TrainOutcome {
    pub model: ReconModel,
    pub history: Vec<EpochRow>,
    pub best_epoch: usize,
    pub best_val: f64,
    pub val_metric: Metric,
}

/// Renders a training curve as CSV.
pub fn history_to_csv(history: &[EpochRow], metric: Metric) -> String {
    let mut out = format!("epoch,train_loss,val_{}\n", metric.name());
    for row in history {
        out.push_str(&format!(
            "{},{},{}\n",
            row.epoch, row.train_loss, row.val_metric
        ));
    }
    out
}

/// Trains with minibatch Adam over sampled card passes; returns the model
/// state from the epoch with the best validation metric.
pub fn train(
    mut model: ReconModel,
    items: &[Item],
    splits: &Splits,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    if splits.train.is_empty() || splits.val.is_empty() {
        return Err(Error::InvalidArgument(
            "training needs non-empty train and val splits".into(),
        ));
    }
    let metric = Metric::for_loss(cfg.loss);
    let shapes = model.param_shapes();
    let mut adam = Adam::new(cfg.lr, &shapes);
    let mut shuffle_rng = stream(cfg.seed, "train-shuffle");

    let mut best: Option<(usize, f64, ReconModel)> = None;
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut order = splits.train.clone();
        fisher_yates(&mut order, &mut shuffle_rng);

        let mut loss_sum = 0.0;
        for (batch_index, batch) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let passes: Vec<Result<(f64, GradSet)>> = batch
                .par_iter()
                .enumerate()
                .map(|(pos, &idx)| {
                    let item = &items[idx];
                    let stream_index =
                        (epoch * items.len() + batch_index * cfg.batch_size + pos) as u64;
                    let mut rng = item_stream(cfg.seed, "train-sample", stream_index);
                    model.training_pass(&item.graph, &item.target, cfg.loss, &mut rng)
                })
                .collect();

            let mut batch_grads = GradSet::for_shapes(&shapes);
            let mut batch_loss = 0.0;
            for pass in passes {
                let (loss, grads) = pass?;
                batch_loss += loss;
                batch_grads.merge(&grads);
            }
            if !batch_loss.is_finite() {
                return Err(Error::Divergence(format!(
                    "non-finite loss in epoch {epoch}, batch {batch_index}"
                )));
            }
            batch_grads.scale(1.0 / batch.len() as f64);
            loss_sum += batch_loss;
            adam.step(&mut model.params_mut(), &batch_grads)?;
        }
        let train_loss = loss_sum / splits.train.len() as f64;

        let val_metric = evaluate(&model, items, &splits.val, metric, cfg.seed)?;
        history.push(EpochRow {
            epoch,
            train_loss,
            val_metric,
        });
        let improves = match &best {
            None => true,
            Some((_, best_val, _)) => {
                if metric.maximize() {
                    val_metric > *best_val
                } else {
                    val_metric < *best_val
                }
            }
        };
        if improves {
            best = Some((epoch, val_metric, model.clone()));
        }
    }
    let (best_epoch, best_val, model) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
        best_val,
        val_metric: metric,
    })
}

fn fisher_yates<R: Rng>(xs: &mut [usize], rng: &mut R) {
    for i in (1..xs.len()).rev() {
        let j = rng.gen_range(0..=i);
        xs.swap(i, j);
    }
}

/// Model outputs over the given items, using `eval_samples` cards per graph
/// (exact whenever a graph has at most that many cards). Deterministic in
/// `seed` and independent of evaluation order.
pub fn predictions(
    model: &ReconModel,
    items: &[Item],
    indices: &[usize],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    indices
        .par_iter()
        .map(|&idx| {
            let mut rng = item_stream(seed, "eval-sample", idx as u64);
            model.predict(&items[idx].graph, model.eval_samples, &mut rng)
        })
        .collect()
}

/// Metric of the model over a list of item indices.
pub fn evaluate(
    model: &ReconModel,
    items: &[Item],
    indices: &[usize],
    metric: Metric,
    seed: u64,
) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty split".into()));
    }
    let outputs = predictions(model, items, indices, seed)?;
    match metric {
        Metric::Accuracy => {
            let mut hits = 0usize;
            for (out, &idx) in outputs.iter().zip(indices) {
                let predicted = argmax(out);
                let actual = match items[idx].target {
                    Target::Class(c) => c,
                    Target::Values(_) => {
                        return Err(Error::InvalidArgument(
                            "accuracy needs class targets".into(),
                        ))
                    }
                };
                if predicted == actual {
                    hits += 1;
                }
            }
            Ok(hits as f64 / indices.len() as f64)
        }
        Metric::Mse => {
            let mut total = 0.0;
            for (out, &idx) in outputs.iter().zip(indices) {
                let target = target_values(&items[idx].target);
                total += crate::loss::mse(out, &target)?.0;
            }
            Ok(total / indices.len() as f64)
        }
        Metric::Log10Mse => {
            let arity = target_values(&items[indices[0]].target).len();
            let mut per_task = vec![0.0; arity];
            for (out, &idx) in outputs.iter().zip(indices) {
                let target = target_values(&items[idx].target);
                if out.len() != arity || target.len() != arity {
                    return Err(Error::Shape(
                        "outputs and targets must share the task arity".into(),
                    ));
                }
                for t in 0..arity {
                    let diff = out[t] - target[t];
                    per_task[t] += diff * diff;
                }
            }
            let mean_over_tasks: f64 =
                per_task.iter().map(|s| s / indices.len() as f64).sum::<f64>() / arity as f64;
            Ok(mean_over_tasks.log10())
        }
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Which of the three risk estimators a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Gnn,
    DataAugmentation,
    Reconstruction,
}

/// How the risk was computed: over all cards, or over a card sample (the
/// sampled value is a surrogate — an upper bound of the exact risk in
/// expectation when loss ∘ ρ is convex).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskMode {
    Exact,
    SampledSurrogate,
}

/// Mean loss over a split, with the per-item losses that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub kind: EstimatorKind,
    pub mode: RiskMode,
    pub value: f64,
    pub per_graph: Vec<f64>,
}

/// Empirical risk of the model on the given items.
pub fn empirical_risk(
    model: &ReconModel,
    items: &[Item],
    indices: &[usize],
    loss: LossKind,
    mode: RiskMode,
    seed: u64,
) -> Result<RiskEstimate> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument(
            "risk needs a non-empty split".into(),
        ));
    }
    let per_graph: Vec<f64> = indices
        .par_iter()
        .map(|&idx| -> Result<f64> {
            let item = &items[idx];
            let output = match mode {
                RiskMode::Exact => {
                    let k = model.resolve_k(item.graph.n());
                    let count = binomial(item.graph.n(), k);
                    model.forward_exact_with_budget(&item.graph, count)?
                }
                RiskMode::SampledSurrogate => {
                    let mut rng = item_stream(seed, "risk-sample", idx as u64);
                    model.forward_sampled_rng(&item.graph, &mut rng)?
                }
            };
            Ok(output_loss(&output, &item.target, loss)?.0)
        })
        .collect::<Result<_>>()?;
    let value = per_graph.iter().sum::<f64>() / per_graph.len() as f64;
    Ok(RiskEstimate {
        kind: EstimatorKind::Reconstruction,
        mode,
        value,
        per_graph,
    })
}
