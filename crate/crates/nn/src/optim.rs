//! Adam optimizer over a flat list of parameter tensors.

use crate::error::{Error, Result};
use crate::layers::GradSet;
use crate::tensor::Tensor;

/// Adam with bias correction. Moment buffers are allocated per parameter
/// slot at construction and updated in slot order, so steps are
/// deterministic.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64, shapes: &[(usize, usize)]) -> Adam {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: shapes.iter().map(|&(r, c)| vec![0.0; r * c]).collect(),
            v: shapes.iter().map(|&(r, c)| vec![0.0; r * c]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// Applies one update using the gradients in `grads`; `params` must be
    /// the same tensors, in the same order, the optimizer was built for.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &GradSet) -> Result<()> {
        if params.len() != self.m.len() || grads.slot_count() != self.m.len() {
            return Err(Error::Shape(format!(
                "optimizer built for {} parameters, got {} tensors and {} gradient slots",
                self.m.len(),
                params.len(),
                grads.slot_count()
            )));
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (slot, param) in params.iter_mut().enumerate() {
            let g = grads.slot(slot);
            if g.len() != param.len() {
                return Err(Error::Shape(format!(
                    "gradient slot {slot} has {} values for a parameter of {}",
                    g.len(),
                    param.len()
                )));
            }
            let m = &mut self.m[slot];
            let v = &mut self.v[slot];
            let data = param.data_mut();
            for i in 0..g.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                data[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}
