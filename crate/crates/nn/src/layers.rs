//! Differentiable building blocks: dense layers, GIN / GCN message passing,
//! per-layer feature standardization, and graph readouts.
//!
//! Gradients are computed by hand, layer by layer. Instead of writing into
//! the parameter tensors directly, every backward pass accumulates into a
//! [`GradSet`] — a flat list of per-parameter buffers indexed by slot. Each
//! training item gets its own `GradSet`, so items can run in parallel and the
//! final reduction happens in item order, keeping runs bit-reproducible
//! regardless of thread scheduling.

use crate::error::{Error, Result};
use crate::tensor::{add_scaled, Tensor};
use rand::Rng;
use recon_core::graph::Graph;
use serde::{Deserialize, Serialize};

/// Denominator offset in feature standardization; keeps the transform and
/// its gradient finite when a feature column is constant.
pub const STD_EPS: f64 = 1e-5;

/// Below this spread a column is treated as constant: the standardized value
/// is (numerically) zero and no gradient flows through the spread itself.
const SIGMA_GUARD: f64 = 1e-12;

/// Per-item gradient buffers, one per parameter tensor, in the owning
/// model's parameter order.
#[derive(Debug, Clone)]
pub struct GradSet {
    slots: Vec<Vec<f64>>,
}

impl GradSet {
    /// Allocates zeroed buffers for parameters of the given shapes.
    pub fn for_shapes(shapes: &[(usize, usize)]) -> GradSet {
        GradSet {
            slots: shapes.iter().map(|&(r, c)| vec![0.0; r * c]).collect(),
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, i: usize) -> &[f64] {
        &self.slots[i]
    }

    pub fn add(&mut self, slot: usize, delta: &[f64]) {
        add_scaled(&mut self.slots[slot], delta, 1.0);
    }

    pub fn add_scaled(&mut self, slot: usize, delta: &[f64], s: f64) {
        add_scaled(&mut self.slots[slot], delta, s);
    }

    /// Adds every buffer of `other` into `self`.
    pub fn merge(&mut self, other: &GradSet) {
        debug_assert_eq!(self.slots.len(), other.slots.len());
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            add_scaled(a, b, 1.0);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for slot in &mut self.slots {
            slot.iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// Fully connected layer `x · w + b` with Xavier-uniform initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub w: Tensor,
    pub b: Tensor,
}

impl Dense {
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Dense {
        let bound = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let data = (0..in_dim * out_dim)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        Dense {
            w: Tensor::from_data(in_dim, out_dim, data).expect("shape matches by construction"),
            b: Tensor::zeros(1, out_dim),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let mut out = x.matmul(&self.w)?;
        for i in 0..out.rows() {
            add_scaled(out.row_mut(i), self.b.data(), 1.0);
        }
        Ok(out)
    }

    /// Accumulates dW into `slot0` and db into `slot0 + 1`, returns dx.
    pub fn backward(
        &self,
        x: &Tensor,
        dy: &Tensor,
        grads: &mut GradSet,
        slot0: usize,
    ) -> Result<Tensor> {
        let dw = x.transpose_matmul(dy)?;
        grads.add(slot0, dw.data());
        let mut db = vec![0.0; dy.cols()];
        for i in 0..dy.rows() {
            add_scaled(&mut db, dy.row(i), 1.0);
        }
        grads.add(slot0 + 1, &db);
        dy.matmul_transpose(&self.w)
    }

    pub const PARAM_COUNT: usize = 2;
}

/// ReLU applied element-wise; `y` is the forward output, used as the mask.
pub fn relu(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    out.data_mut().iter_mut().for_each(|v| {
        if *v < 0.0 {
            *v = 0.0;
        }
    });
    out
}

pub fn relu_backward(y: &Tensor, dy: &Tensor) -> Tensor {
    let mut dx = dy.clone();
    for (d, &o) in dx.data_mut().iter_mut().zip(y.data()) {
        if o <= 0.0 {
            *d = 0.0;
        }
    }
    dx
}

/// Message-passing flavor of a convolution layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvKind {
    Gin,
    Gcn,
}

impl ConvKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConvKind::Gin => "gin",
            ConvKind::Gcn => "gcn",
        }
    }
}

/// One message-passing layer: neighborhood aggregation, a dense transform,
/// optional per-column feature standardization, then ReLU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvLayer {
    pub kind: ConvKind,
    pub dense: Dense,
    pub standardize: bool,
}

/// Intermediate values one conv layer needs for its backward pass.
#[derive(Debug, Clone)]
pub struct ConvCache {
    agg: Tensor,
    std: Option<(Tensor, Vec<f64>)>,
    out: Tensor,
}

impl ConvCache {
    pub fn output(&self) -> &Tensor {
        &self.out
    }
}

/// Neighborhood aggregation. GIN sums the vertex itself with its neighbors;
/// GCN weights each term by 1/√((d_u+1)(d_v+1)), self-loops included. Both
/// operators are symmetric, so the backward pass reuses the same routine.
fn aggregate(kind: ConvKind, g: &Graph, h: &Tensor) -> Result<Tensor> {
    if h.rows() != g.n() {
        return Err(Error::Shape(format!(
            "feature matrix has {} rows for a graph on {} vertices",
            h.rows(),
            g.n()
        )));
    }
    let d = h.cols();
    let mut out = Tensor::zeros(g.n(), d);
    match kind {
        ConvKind::Gin => {
            for v in 0..g.n() {
                let dst = out.row_mut(v);
                dst.copy_from_slice(h.row(v));
            }
            for &(u, v) in g.edges() {
                let hu: Vec<f64> = h.row(u).to_vec();
                let hv: Vec<f64> = h.row(v).to_vec();
                add_scaled(out.row_mut(v), &hu, 1.0);
                add_scaled(out.row_mut(u), &hv, 1.0);
            }
        }
        ConvKind::Gcn => {
            let inv_sqrt: Vec<f64> = (0..g.n())
                .map(|v| 1.0 / ((g.degree(v) + 1) as f64).sqrt())
                .collect();
            for v in 0..g.n() {
                let c = inv_sqrt[v] * inv_sqrt[v];
                let src: Vec<f64> = h.row(v).to_vec();
                add_scaled(out.row_mut(v), &src, c);
            }
            for &(u, v) in g.edges() {
                let c = inv_sqrt[u] * inv_sqrt[v];
                let hu: Vec<f64> = h.row(u).to_vec();
                let hv: Vec<f64> = h.row(v).to_vec();
                add_scaled(out.row_mut(v), &hu, c);
                add_scaled(out.row_mut(u), &hv, c);
            }
        }
    }
    Ok(out)
}

/// Standardizes each column to mean 0 and spread 1 (denominator σ + ε).
/// Returns the standardized matrix and the per-column σ values.
fn standardize_forward(z: &Tensor) -> (Tensor, Vec<f64>) {
    let n = z.rows() as f64;
    let mut out = z.clone();
    let mut sigmas = vec![0.0; z.cols()];
    for j in 0..z.cols() {
        let mut mean = 0.0;
        for i in 0..z.rows() {
            mean += z.get(i, j);
        }
        mean /= n;
        let mut var = 0.0;
        for i in 0..z.rows() {
            let c = z.get(i, j) - mean;
            var += c * c;
        }
        let sigma = (var / n).sqrt();
        sigmas[j] = sigma;
        let d = sigma + STD_EPS;
        for i in 0..z.rows() {
            out.set(i, j, (z.get(i, j) - mean) / d);
        }
    }
    (out, sigmas)
}

/// Backward of [`standardize_forward`], given the standardized values ŷ and
/// per-column σ. Constant columns (σ below the guard) get no gradient
/// through σ, matching the forward's numerically-zero output there.
fn standardize_backward(y_hat: &Tensor, sigmas: &[f64], dy: &Tensor) -> Tensor {
    let n = y_hat.rows() as f64;
    let mut dz = dy.clone();
    for j in 0..y_hat.cols() {
        let sigma = sigmas[j];
        let d = sigma + STD_EPS;
        let mut mean_dy = 0.0;
        let mut mean_dy_y = 0.0;
        for i in 0..y_hat.rows() {
            mean_dy += dy.get(i, j);
            mean_dy_y += dy.get(i, j) * y_hat.get(i, j);
        }
        mean_dy /= n;
        mean_dy_y /= n;
        for i in 0..y_hat.rows() {
            let g = if sigma < SIGMA_GUARD {
                (dy.get(i, j) - mean_dy) / d
            } else {
                (dy.get(i, j) - mean_dy) / d - y_hat.get(i, j) * mean_dy_y / sigma
            };
            dz.set(i, j, g);
        }
    }
    dz
}

impl ConvLayer {
    pub fn new<R: Rng>(
        kind: ConvKind,
        in_dim: usize,
        out_dim: usize,
        standardize: bool,
        rng: &mut R,
    ) -> ConvLayer {
        ConvLayer {
            kind,
            dense: Dense::new(in_dim, out_dim, rng),
            standardize,
        }
    }

    pub fn forward(&self, g: &Graph, h: &Tensor) -> Result<(Tensor, ConvCache)> {
        let agg = aggregate(self.kind, g, h)?;
        let z = self.dense.forward(&agg)?;
        let (pre_relu, std) = if self.standardize {
            let (y_hat, sigmas) = standardize_forward(&z);
            (y_hat.clone(), Some((y_hat, sigmas)))
        } else {
            (z, None)
        };
        let out = relu(&pre_relu);
        Ok((out.clone(), ConvCache { agg, std, out }))
    }

    /// Returns dh given the gradient w.r.t. this layer's output.
    pub fn backward(
        &self,
        g: &Graph,
        cache: &ConvCache,
        dout: &Tensor,
        grads: &mut GradSet,
        slot0: usize,
    ) -> Result<Tensor> {
        let dy = relu_backward(&cache.out, dout);
        let dz = match &cache.std {
            Some((y_hat, sigmas)) => standardize_backward(y_hat, sigmas, &dy),
            None => dy,
        };
        let dagg = self.dense.backward(&cache.agg, &dz, grads, slot0)?;
        aggregate(self.kind, g, &dagg)
    }

    pub const PARAM_COUNT: usize = Dense::PARAM_COUNT;
}

/// How vertex features collapse into one graph-level row vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    Sum,
    Mean,
}

pub fn readout_forward(kind: Readout, h: &Tensor) -> Tensor {
    let mut out = vec![0.0; h.cols()];
    for i in 0..h.rows() {
        add_scaled(&mut out, h.row(i), 1.0);
    }
    if kind == Readout::Mean {
        let n = h.rows() as f64;
        out.iter_mut().for_each(|x| *x /= n);
    }
    Tensor::row_vector(out)
}

pub fn readout_backward(kind: Readout, rows: usize, dvec: &[f64]) -> Tensor {
    let scale = match kind {
        Readout::Sum => 1.0,
        Readout::Mean => 1.0 / rows as f64,
    };
    let mut out = Tensor::zeros(rows, dvec.len());
    for i in 0..rows {
        add_scaled(out.row_mut(i), dvec, scale);
    }
    out
}
