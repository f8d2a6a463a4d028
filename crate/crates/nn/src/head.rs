//! Sum-decomposition head: a per-element feed-forward map φ, a pooling step,
//! and an output feed-forward map ρ. The composition ρ(pool(φ(x))) is
//! invariant to the order of the pooled multiset.

use crate::error::{Error, Result};
use crate::layers::{relu, relu_backward, Dense, GradSet};
use crate::tensor::{add_scaled, Tensor};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Feed-forward network with ReLU between layers and a linear final layer.
/// An `Mlp` with no layers is the identity map (used for the variance
/// experiment, which requires ρ = id so that loss ∘ ρ stays convex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Forward activations of one `Mlp` pass: `acts[0]` is the input, `acts[i]`
/// the output of layer `i-1` (post-ReLU except after the final layer).
#[derive(Debug, Clone)]
pub struct MlpTrace {
    acts: Vec<Tensor>,
}

impl MlpTrace {
    pub fn output(&self) -> &Tensor {
        self.acts.last().expect("trace always holds the input")
    }
}

impl Mlp {
    /// Builds layers for consecutive dimension pairs in `dims`; fewer than
    /// two entries yields the identity map.
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R) -> Mlp {
        let layers = dims
            .windows(2)
            .map(|w| Dense::new(w[0], w[1], rng))
            .collect();
        Mlp { layers }
    }

    pub fn identity() -> Mlp {
        Mlp { layers: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.layers.is_empty()
    }

    /// Input width, or `None` for the identity map (which accepts any).
    pub fn in_dim(&self) -> Option<usize> {
        self.layers.first().map(Dense::in_dim)
    }

    pub fn out_dim(&self) -> Option<usize> {
        self.layers.last().map(Dense::out_dim)
    }

    pub fn param_count(&self) -> usize {
        self.layers.len() * Dense::PARAM_COUNT
    }

    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::new();
        for layer in &self.layers {
            shapes.push((layer.w.rows(), layer.w.cols()));
            shapes.push((1, layer.b.cols()));
        }
        shapes
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_traced(x)?.output().clone())
    }

    pub fn forward_traced(&self, x: &Tensor) -> Result<MlpTrace> {
        let mut acts = vec![x.clone()];
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(acts.last().expect("non-empty"))?;
            let out = if i + 1 < self.layers.len() { relu(&z) } else { z };
            acts.push(out);
        }
        Ok(MlpTrace { acts })
    }

    /// Returns dx; parameter gradients go into slots `slot0..`.
    pub fn backward(
        &self,
        trace: &MlpTrace,
        dout: &Tensor,
        grads: &mut GradSet,
        slot0: usize,
    ) -> Result<Tensor> {
        let mut d = dout.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            if i + 1 < self.layers.len() {
                d = relu_backward(&trace.acts[i + 1], &d);
            }
            d = layer.backward(&trace.acts[i], &d, grads, slot0 + i * Dense::PARAM_COUNT)?;
        }
        Ok(d)
    }
}

/// How φ outputs collapse across the multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pooling {
    Sum,
    Mean,
}

/// The ρ ∘ pool ∘ φ sum-decomposition head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepSetsHead {
    pub phi: Mlp,
    pub rho: Mlp,
    pub pooling: Pooling,
}

impl DeepSetsHead {
    pub fn param_count(&self) -> usize {
        self.phi.param_count() + self.rho.param_count()
    }

    pub fn param_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = self.phi.param_shapes();
        shapes.extend(self.rho.param_shapes());
        shapes
    }

    /// φ output width must equal ρ input width when both are non-identity.
    pub fn validate(&self) -> Result<()> {
        if let (Some(phi_out), Some(rho_in)) = (self.phi.out_dim(), self.rho.in_dim()) {
            if phi_out != rho_in {
                return Err(Error::Shape(format!(
                    "phi produces width {phi_out} but rho expects width {rho_in}"
                )));
            }
        }
        Ok(())
    }
}

/// Applies the head to a multiset of equal-width vectors.
pub fn deepsets_apply(head: &DeepSetsHead, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument(
            "deep-sets aggregation needs a non-empty multiset".into(),
        ));
    }
    let width = xs[0].len();
    if xs.iter().any(|x| x.len() != width) {
        return Err(Error::Shape(
            "multiset elements must share one width".into(),
        ));
    }
    let mut pooled: Option<Vec<f64>> = None;
    for x in xs {
        let mapped = head.phi.forward(&Tensor::row_vector(x.clone()))?;
        match &mut pooled {
            None => pooled = Some(mapped.data().to_vec()),
            Some(acc) => add_scaled(acc, mapped.data(), 1.0),
        }
    }
    let mut pooled = pooled.expect("multiset checked non-empty");
    if head.pooling == Pooling::Mean {
        let inv = 1.0 / xs.len() as f64;
        pooled.iter_mut().for_each(|v| *v *= inv);
    }
    let out = head.rho.forward(&Tensor::row_vector(pooled))?;
    Ok(out.data().to_vec())
}
