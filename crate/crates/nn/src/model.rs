//! Graph models: a message-passing base network and the subgraph-pooling
//! model built on top of it.
//!
//! The subgraph-pooling model represents a graph by mapping every k-vertex
//! induced subgraph ("card") through the base network and a per-element map
//! φ, pooling the results, and finishing with an output map ρ. Exact mode
//! enumerates all `C(n, k)` cards; sampled mode draws a uniform subset of
//! them without replacement and, under sum pooling, rescales by
//! `C(n, k) / B` so the pooled vector stays an unbiased estimate of the
//! exact one.

use crate::error::{Error, Result};
use crate::head::{DeepSetsHead, MlpTrace, Pooling};
use crate::layers::{
    readout_backward, readout_forward, ConvCache, ConvKind, ConvLayer, GradSet, Readout,
};
use crate::loss::{cross_entropy, mse, LossKind};
use crate::tensor::{add_scaled, Tensor};
use rand::Rng;
use recon_core::combin::{all_subsets, binomial, sample_subsets};
use recon_core::dataset::Target;
use recon_core::graph::Graph;
use recon_core::rng::stream;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Default cap on exact card enumeration per graph.
pub const DEFAULT_SUBGRAPH_BUDGET: u128 = 4096;

/// Version tag written into every checkpoint file.
pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Message-passing network over one graph: stacked conv layers and a
/// readout producing a fixed-width row vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnModel {
    pub conv_kind: ConvKind,
    pub convs: Vec<ConvLayer>,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub readout: Readout,
    pub uses_jumping_knowledge: bool,
}

/// Forward intermediates of one [`GnnModel`] pass over one graph.
#[derive(Debug, Clone)]
pub struct GnnTrace {
    caches: Vec<ConvCache>,
}

impl GnnModel {
    pub fn new<R: Rng>(
        conv_kind: ConvKind,
        input_dim: usize,
        hidden_dim: usize,
        layer_count: usize,
        readout: Readout,
        uses_jumping_knowledge: bool,
        standardize: bool,
        rng: &mut R,
    ) -> Result<GnnModel> {
        if layer_count == 0 || input_dim == 0 || hidden_dim == 0 {
            return Err(Error::InvalidArgument(
                "model needs at least one layer and positive dimensions".into(),
            ));
        }
        let mut convs = Vec::with_capacity(layer_count);
        for l in 0..layer_count {
            let in_dim = if l == 0 { input_dim } else { hidden_dim };
            convs.push(ConvLayer::new(conv_kind, in_dim, hidden_dim, standardize, rng));
        }
        Ok(GnnModel {
            conv_kind,
            convs,
            input_dim,
            hidden_dim,
            readout,
            uses_jumping_knowledge,
        })
    }

    /// Width of the graph-level representation.
    pub fn output_dim(&self) -> usize {
        if self.uses_jumping_knowledge {
            self.hidden_dim * self.convs.len()
        } else {
            self.hidden_dim
        }
    }

    pub fn param_count(&self) -> usize {
        self.convs.len() * ConvLayer::PARAM_COUNT
    }

    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::new();
        for conv in &self.convs {
            shapes.push((conv.dense.w.rows(), conv.dense.w.cols()));
            shapes.push((1, conv.dense.b.cols()));
        }
        shapes
    }

    /// Constant input features: datasets carry no vertex features, so every
    /// vertex starts from the same all-ones row and all structure the model
    /// sees comes from message passing.
    fn input_features(&self, g: &Graph) -> Tensor {
        Tensor::from_data(g.n(), self.input_dim, vec![1.0; g.n() * self.input_dim])
            .expect("shape matches by construction")
    }

    pub fn forward(&self, g: &Graph) -> Result<Tensor> {
        Ok(self.forward_traced(g)?.0)
    }

    pub fn forward_traced(&self, g: &Graph) -> Result<(Tensor, GnnTrace)> {
        if g.n() == 0 {
            return Err(Error::InvalidArgument(
                "cannot represent the empty graph".into(),
            ));
        }
        let mut h = self.input_features(g);
        let mut caches = Vec::with_capacity(self.convs.len());
        for conv in &self.convs {
            let (out, cache) = conv.forward(g, &h)?;
            h = out;
            caches.push(cache);
        }
        let rep = if self.uses_jumping_knowledge {
            let mut data = Vec::with_capacity(self.output_dim());
            for cache in &caches {
                data.extend_from_slice(readout_forward(self.readout, cache.output()).data());
            }
            Tensor::row_vector(data)
        } else {
            readout_forward(self.readout, caches.last().expect("≥1 layer").output())
        };
        Ok((rep, GnnTrace { caches }))
    }

    /// Backpropagates a gradient w.r.t. the graph-level representation,
    /// accumulating parameter gradients into slots `slot0..`.
    pub fn backward(
        &self,
        g: &Graph,
        trace: &GnnTrace,
        dvec: &[f64],
        grads: &mut GradSet,
        slot0: usize,
    ) -> Result<()> {
        if dvec.len() != self.output_dim() {
            return Err(Error::Shape(format!(
                "gradient of width {} for a representation of width {}",
                dvec.len(),
                self.output_dim()
            )));
        }
        let layer_count = self.convs.len();
        let mut dh: Option<Tensor> = None;
        for l in (0..layer_count).rev() {
            let mut dout = match dh.take() {
                Some(t) => t,
                None => Tensor::zeros(g.n(), self.hidden_dim),
            };
            if self.uses_jumping_knowledge {
                let seg = &dvec[l * self.hidden_dim..(l + 1) * self.hidden_dim];
                let back = readout_backward(self.readout, g.n(), seg);
                for i in 0..g.n() {
                    add_scaled(dout.row_mut(i), back.row(i), 1.0);
                }
            } else if l == layer_count - 1 {
                dout = readout_backward(self.readout, g.n(), dvec);
            }
            let slot = slot0 + l * ConvLayer::PARAM_COUNT;
            dh = Some(self.convs[l].backward(g, &trace.caches[l], &dout, grads, slot)?);
        }
        Ok(())
    }
}

/// Rule resolving the card size k from a graph's vertex count. Resolved
/// values are clamped to at least 3 (smaller cards carry no edge structure
/// worth pooling); graphs too small for an `n − ℓ` rule fall back to the
/// whole graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum KRule {
    /// k = n: the single card is the graph itself.
    Whole,
    /// k = n − ℓ, falling back to k = n when n ≤ ℓ + 3.
    NMinus { ell: usize },
    /// k = ⌈n/2⌉, clamped into [3, n].
    HalfCeil,
    /// A fixed k, clamped into [3, n].
    Absolute { k: usize },
}

impl KRule {
    pub fn resolve(&self, n: usize) -> usize {
        match self {
            KRule::Whole => n,
            KRule::NMinus { ell } => {
                if n <= ell + 3 {
                    n
                } else {
                    n - ell
                }
            }
            KRule::HalfCeil => ((n + 1) / 2).max(3).min(n),
            KRule::Absolute { k } => (*k).max(3).min(n),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KRule::Whole => "whole".into(),
            KRule::NMinus { ell } => format!("n-{ell}"),
            KRule::HalfCeil => "half-ceil".into(),
            KRule::Absolute { k } => format!("k{k}"),
        }
    }
}

/// The subgraph-pooling model: base network, per-card map φ, pooling, and
/// output map ρ, with a card-size rule and sampling budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconModel {
    pub base: GnnModel,
    pub head: DeepSetsHead,
    pub k_rule: KRule,
    pub train_samples: usize,
    pub eval_samples: usize,
    pub concat_original: bool,
}

/// Everything one training item's forward pass keeps around for backward.
struct CardPass {
    card: Graph,
    base_trace: GnnTrace,
    phi_trace: MlpTrace,
}

impl ReconModel {
    pub fn new(
        base: GnnModel,
        head: DeepSetsHead,
        k_rule: KRule,
        train_samples: usize,
        eval_samples: usize,
        concat_original: bool,
    ) -> Result<ReconModel> {
        if train_samples == 0 || eval_samples == 0 {
            return Err(Error::InvalidArgument(
                "train_samples and eval_samples must be at least 1".into(),
            ));
        }
        if let Some(phi_in) = head.phi.in_dim() {
            if phi_in != base.output_dim() {
                return Err(Error::Shape(format!(
                    "phi expects width {phi_in} but the base network produces {}",
                    base.output_dim()
                )));
            }
        }
        let model = ReconModel {
            base,
            head,
            k_rule,
            train_samples,
            eval_samples,
            concat_original,
        };
        if let Some(rho_in) = model.head.rho.in_dim() {
            let expected = model.pooled_dim();
            if rho_in != expected {
                return Err(Error::Shape(format!(
                    "rho expects width {rho_in} but the pooled representation has width {expected}"
                )));
            }
        }
        Ok(model)
    }

    /// Width of φ's output (φ = identity passes the base width through).
    fn phi_dim(&self) -> usize {
        self.head.phi.out_dim().unwrap_or(self.base.output_dim())
    }

    /// Width of the vector handed to ρ: pooled φ outputs, plus the
    /// whole-graph representation when `concat_original` is set.
    pub fn pooled_dim(&self) -> usize {
        self.phi_dim()
            + if self.concat_original {
                self.base.output_dim()
            } else {
                0
            }
    }

    pub fn output_dim(&self) -> usize {
        self.head.rho.out_dim().unwrap_or_else(|| self.pooled_dim())
    }

    pub fn resolve_k(&self, n: usize) -> usize {
        self.k_rule.resolve(n)
    }

    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = self.base.param_shapes();
        shapes.extend(self.head.param_shapes());
        shapes
    }

    pub fn param_count(&self) -> usize {
        self.base.param_count() + self.head.param_count()
    }

    /// Slot offsets of (base, phi, rho) inside the flat parameter list.
    fn slot_offsets(&self) -> (usize, usize, usize) {
        let base = 0;
        let phi = self.base.param_count();
        let rho = phi + self.head.phi.param_count();
        (base, phi, rho)
    }

    /// Mutable references to every parameter tensor, in slot order.
    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::with_capacity(self.param_count());
        for conv in &mut self.base.convs {
            out.push(&mut conv.dense.w);
            out.push(&mut conv.dense.b);
        }
        for layer in &mut self.head.phi.layers {
            out.push(&mut layer.w);
            out.push(&mut layer.b);
        }
        for layer in &mut self.head.rho.layers {
            out.push(&mut layer.w);
            out.push(&mut layer.b);
        }
        out
    }

    /// Pooled pre-ρ vector over an explicit list of card vertex sets.
    fn pooled_over(&self, g: &Graph, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
        if subsets.is_empty() {
            return Err(Error::InvalidArgument(
                "card pooling needs at least one subset".into(),
            ));
        }
        let k = subsets[0].len();
        let total = binomial(g.n(), k) as f64;
        let drawn = subsets.len() as f64;
        let mut pooled = vec![0.0; self.phi_dim()];
        for s in subsets {
            let card = g.induced_subgraph(s)?;
            let rep = self.base.forward(&card)?;
            let mapped = self.head.phi.forward(&rep)?;
            add_scaled(&mut pooled, mapped.data(), 1.0);
        }
        let scale = match self.head.pooling {
            Pooling::Sum => total / drawn,
            Pooling::Mean => 1.0 / drawn,
        };
        pooled.iter_mut().for_each(|v| *v *= scale);
        if self.concat_original {
            pooled.extend_from_slice(self.base.forward(g)?.data());
        }
        Ok(pooled)
    }

    /// Pre-ρ pooled vector over all `C(n, k)` cards.
    pub fn pooled_exact_with_budget(&self, g: &Graph, budget: u128) -> Result<Vec<f64>> {
        let k = self.resolve_k(g.n());
        let count = binomial(g.n(), k);
        if count > budget {
            return Err(Error::BudgetExceeded(format!(
                "exact pooling would enumerate {count} cards (budget {budget}); \
                 use forward_sampled instead"
            )));
        }
        self.pooled_over(g, &all_subsets(g.n(), k))
    }

    pub fn pooled_exact(&self, g: &Graph) -> Result<Vec<f64>> {
        self.pooled_exact_with_budget(g, DEFAULT_SUBGRAPH_BUDGET)
    }

    /// Representation pooled over all cards.
    pub fn forward_exact(&self, g: &Graph) -> Result<Vec<f64>> {
        self.forward_exact_with_budget(g, DEFAULT_SUBGRAPH_BUDGET)
    }

    pub fn forward_exact_with_budget(&self, g: &Graph, budget: u128) -> Result<Vec<f64>> {
        let pooled = self.pooled_exact_with_budget(g, budget)?;
        Ok(self.head.rho.forward(&Tensor::row_vector(pooled))?.data().to_vec())
    }

    /// Pre-ρ pooled vector over `train_samples` cards drawn uniformly
    /// without replacement (clamped to the number of distinct cards, so the
    /// full-budget case reproduces the exact enumeration bit for bit).
    pub fn pooled_sampled<R: Rng>(&self, g: &Graph, rng: &mut R) -> Result<Vec<f64>> {
        let subsets = self.draw_subsets(g, self.train_samples, rng)?;
        self.pooled_over(g, &subsets)
    }

    /// Representation pooled over a seeded card sample.
    pub fn forward_sampled(&self, g: &Graph, seed: u64) -> Result<Vec<f64>> {
        let mut rng = stream(seed, "forward-sampled");
        self.forward_sampled_rng(g, &mut rng)
    }

    pub fn forward_sampled_rng<R: Rng>(&self, g: &Graph, rng: &mut R) -> Result<Vec<f64>> {
        let pooled = self.pooled_sampled(g, rng)?;
        Ok(self.head.rho.forward(&Tensor::row_vector(pooled))?.data().to_vec())
    }

    /// Model output pooled over `samples` cards (exact whenever the card
    /// count is within `samples`); the evaluation path.
    pub fn predict<R: Rng>(&self, g: &Graph, samples: usize, rng: &mut R) -> Result<Vec<f64>> {
        let subsets = self.draw_subsets(g, samples, rng)?;
        let pooled = self.pooled_over(g, &subsets)?;
        Ok(self.head.rho.forward(&Tensor::row_vector(pooled))?.data().to_vec())
    }

    fn draw_subsets<R: Rng>(
        &self,
        g: &Graph,
        samples: usize,
        rng: &mut R,
    ) -> Result<Vec<Vec<usize>>> {
        if g.n() == 0 {
            return Err(Error::InvalidArgument("cannot pool over the empty graph".into()));
        }
        let k = self.resolve_k(g.n());
        let total = binomial(g.n(), k);
        let budget = (samples as u128).min(total) as usize;
        Ok(sample_subsets(g.n(), k, budget, rng)?)
    }

    /// One training item: sampled forward pass, loss against the target,
    /// and a full backward pass into a fresh gradient set.
    pub fn training_pass<R: Rng>(
        &self,
        g: &Graph,
        target: &Target,
        loss: LossKind,
        rng: &mut R,
    ) -> Result<(f64, GradSet)> {
        let subsets = self.draw_subsets(g, self.train_samples, rng)?;
        let k = subsets[0].len();
        let total = binomial(g.n(), k) as f64;
        let drawn = subsets.len() as f64;
        let card_scale = match self.head.pooling {
            Pooling::Sum => total / drawn,
            Pooling::Mean => 1.0 / drawn,
        };

        let mut passes = Vec::with_capacity(subsets.len());
        let mut pooled = vec![0.0; self.phi_dim()];
        for s in &subsets {
            let card = g.induced_subgraph(s)?;
            let (rep, base_trace) = self.base.forward_traced(&card)?;
            let phi_trace = self.head.phi.forward_traced(&rep)?;
            add_scaled(&mut pooled, phi_trace.output().data(), 1.0);
            passes.push(CardPass {
                card,
                base_trace,
                phi_trace,
            });
        }
        pooled.iter_mut().for_each(|v| *v *= card_scale);

        let mut whole_pass = None;
        if self.concat_original {
            let (rep, trace) = self.base.forward_traced(g)?;
            pooled.extend_from_slice(rep.data());
            whole_pass = Some(trace);
        }

        let rho_trace = self.head.rho.forward_traced(&Tensor::row_vector(pooled))?;
        let output = rho_trace.output().data().to_vec();
        let (loss_value, dout) = output_loss(&output, target, loss)?;

        let mut grads = GradSet::for_shapes(&self.param_shapes());
        let (base_slot, phi_slot, rho_slot) = self.slot_offsets();
        let dpooled = self
            .head
            .rho
            .backward(&rho_trace, &Tensor::row_vector(dout), &mut grads, rho_slot)?;
        let phi_dim = self.phi_dim();
        let dpool = &dpooled.data()[..phi_dim];

        let mut dphi_out = vec![0.0; phi_dim];
        for pass in &passes {
            dphi_out.copy_from_slice(dpool);
            dphi_out.iter_mut().for_each(|v| *v *= card_scale);
            let drep = self.head.phi.backward(
                &pass.phi_trace,
                &Tensor::row_vector(dphi_out.clone()),
                &mut grads,
                phi_slot,
            )?;
            self.base
                .backward(&pass.card, &pass.base_trace, drep.data(), &mut grads, base_slot)?;
        }
        if let Some(trace) = whole_pass {
            let dwhole = &dpooled.data()[phi_dim..];
            self.base.backward(g, &trace, dwhole, &mut grads, base_slot)?;
        }
        Ok((loss_value, grads))
    }

    pub fn save_checkpoint(&self, path: &Path, config_sha256: Option<&str>) -> Result<()> {
        let checkpoint = Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            shapes: self.param_shapes(),
            config_sha256: config_sha256.map(str::to_string),
            model: self.clone(),
        };
        let json = serde_json::to_string_pretty(&checkpoint)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load_checkpoint(path: &Path) -> Result<ReconModel> {
        let json = std::fs::read_to_string(path)?;
        let checkpoint: Checkpoint = serde_json::from_str(&json)?;
        if checkpoint.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "checkpoint schema version {} is not supported (expected {})",
                checkpoint.schema_version, CHECKPOINT_SCHEMA_VERSION
            )));
        }
        if checkpoint.shapes != checkpoint.model.param_shapes() {
            return Err(Error::Shape(
                "checkpoint shape manifest does not match its weights".into(),
            ));
        }
        Ok(checkpoint.model)
    }
}

/// Loss of one output vector against one target.
pub fn output_loss(
    output: &[f64],
    target: &Target,
    loss: LossKind,
) -> Result<(f64, Vec<f64>)> {
    match loss {
        LossKind::CrossEntropy => match target {
            Target::Class(c) => cross_entropy(output, *c),
            Target::Values(_) => Err(Error::InvalidArgument(
                "cross-entropy needs a class target".into(),
            )),
        },
        LossKind::SquaredError => {
            let values = target_values(target);
            mse(output, &values)
        }
    }
}

/// Target as a real vector: classes become their numeric value.
pub fn target_values(target: &Target) -> Vec<f64> {
    match target {
        Target::Class(c) => vec![*c as f64],
        Target::Values(v) => v.clone(),
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    shapes: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_sha256: Option<String>,
    model: ReconModel,
}

/// Spec of a full model, buildable from CLI key-value settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub conv: ConvKind,
    pub layers: usize,
    pub hidden: usize,
    pub readout: Readout,
    pub jumping_knowledge: bool,
    pub standardize: bool,
    pub k_rule: KRule,
    pub train_samples: usize,
    pub eval_samples: usize,
    pub concat_original: bool,
    pub head_hidden: usize,
    pub pooling: Pooling,
}

impl Default for ModelConfig {
    fn default() -> ModelConfig {
        ModelConfig {
            conv: ConvKind::Gin,
            layers: 4,
            hidden: 64,
            readout: Readout::Sum,
            jumping_knowledge: false,
            standardize: false,
            k_rule: KRule::NMinus { ell: 1 },
            train_samples: 10,
            eval_samples: 200,
            concat_original: false,
            head_hidden: 64,
            pooling: Pooling::Mean,
        }
    }
}

/// Builds a seeded model producing `output_dim` values per graph.
pub fn build_model(cfg: &ModelConfig, output_dim: usize, seed: u64) -> Result<ReconModel> {
    use crate::head::Mlp;
    let mut rng = stream(seed, "model-init");
    let base = GnnModel::new(
        cfg.conv,
        1,
        cfg.hidden,
        cfg.layers,
        cfg.readout,
        cfg.jumping_knowledge,
        cfg.standardize,
        &mut rng,
    )?;
    let base_out = base.output_dim();
    let phi = Mlp::new(&[base_out, cfg.head_hidden, cfg.head_hidden], &mut rng);
    let rho_in = cfg.head_hidden + if cfg.concat_original { base_out } else { 0 };
    let rho = Mlp::new(&[rho_in, cfg.head_hidden, output_dim], &mut rng);
    ReconModel::new(
        base,
        DeepSetsHead {
            phi,
            rho,
            pooling: cfg.pooling,
        },
        cfg.k_rule,
        cfg.train_samples,
        cfg.eval_samples,
        cfg.concat_original,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use recon_core::generators::{cycle_graph, petersen_graph};

    fn small_model(k_rule: KRule, pooling: Pooling) -> ReconModel {
        let cfg = ModelConfig {
            layers: 2,
            hidden: 5,
            head_hidden: 4,
            k_rule,
            pooling,
            train_samples: 4,
            eval_samples: 50,
            ..ModelConfig::default()
        };
        build_model(&cfg, 3, 11).unwrap()
    }

    #[test]
    fn k_rules_resolve_with_clamping() {
        assert_eq!(KRule::Whole.resolve(9), 9);
        assert_eq!(KRule::NMinus { ell: 1 }.resolve(9), 8);
        assert_eq!(KRule::NMinus { ell: 1 }.resolve(4), 4);
        assert_eq!(KRule::NMinus { ell: 0 }.resolve(3), 3);
        assert_eq!(KRule::NMinus { ell: 0 }.resolve(8), 8);
        assert_eq!(KRule::HalfCeil.resolve(12), 6);
        assert_eq!(KRule::HalfCeil.resolve(5), 3);
        assert_eq!(KRule::HalfCeil.resolve(2), 2);
        assert_eq!(KRule::Absolute { k: 7 }.resolve(5), 5);
        assert_eq!(KRule::Absolute { k: 2 }.resolve(9), 3);
    }

    #[test]
    fn full_budget_sample_is_bitwise_exact() {
        let g = cycle_graph(7).unwrap();
        for pooling in [Pooling::Sum, Pooling::Mean] {
            let mut m = small_model(KRule::NMinus { ell: 1 }, pooling);
            m.train_samples = 7;
            let exact = m.forward_exact(&g).unwrap();
            let sampled = m.forward_sampled(&g, 999).unwrap();
            assert_eq!(exact, sampled);
        }
    }

    #[test]
    fn whole_graph_rule_reduces_to_base_plus_head() {
        let m = small_model(KRule::Whole, Pooling::Mean);
        let g = petersen_graph();
        let direct = {
            let rep = m.base.forward(&g).unwrap();
            let phi = m.head.phi.forward(&rep).unwrap();
            m.head.rho.forward(&phi).unwrap().data().to_vec()
        };
        let sampled = m.forward_sampled(&g, 5).unwrap();
        assert_eq!(direct, sampled);
        let exact = m.forward_exact(&g).unwrap();
        assert_eq!(direct, exact);
    }

    #[test]
    fn identical_cards_pool_to_a_single_card_image() {
        // Vertex-transitive graph at k = n−1: all cards are isomorphic, so
        // with mean pooling the pooled vector is φ of any one card image.
        let m = small_model(KRule::NMinus { ell: 1 }, Pooling::Mean);
        let g = cycle_graph(6).unwrap();
        let pooled = m.pooled_exact(&g).unwrap();
        let card = g.induced_subgraph(&[0, 1, 2, 3, 4]).unwrap();
        let one = m
            .head
            .phi
            .forward(&m.base.forward(&card).unwrap())
            .unwrap();
        for (p, o) in pooled.iter().zip(one.data()) {
            assert!((p - o).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_forward_respects_the_enumeration_budget() {
        let m = small_model(KRule::HalfCeil, Pooling::Mean);
        let g = petersen_graph();
        let err = m.forward_exact_with_budget(&g, 10).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("forward_sampled"), "{msg}");
    }

    #[test]
    fn checkpoints_round_trip_and_validate_shapes() {
        let m = small_model(KRule::HalfCeil, Pooling::Sum);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        m.save_checkpoint(&path, Some("cafe")).unwrap();
        let back = ReconModel::load_checkpoint(&path).unwrap();
        assert_eq!(m, back);

        let mangled = std::fs::read_to_string(&path)
            .unwrap()
            .replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
        std::fs::write(&path, mangled).unwrap();
        assert!(ReconModel::load_checkpoint(&path).is_err());
    }

    #[test]
    fn construction_rejects_mismatched_head_widths() {
        use crate::head::{DeepSetsHead, Mlp};
        let mut rng = stream(0, "bad");
        let base = GnnModel::new(
            ConvKind::Gin,
            1,
            4,
            2,
            Readout::Sum,
            false,
            false,
            &mut rng,
        )
        .unwrap();
        let head = DeepSetsHead {
            phi: Mlp::new(&[5, 3], &mut rng),
            rho: Mlp::new(&[3, 2], &mut rng),
            pooling: Pooling::Mean,
        };
        assert!(ReconModel::new(base, head, KRule::Whole, 1, 1, false).is_err());
    }
}
