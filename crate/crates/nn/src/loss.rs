//! Scalar losses with their gradients w.r.t. the model output.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which loss a training run minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    CrossEntropy,
    SquaredError,
}

/// Cross-entropy of a softmax over `logits` against the true `class`.
/// Returns the loss and its gradient w.r.t. the logits.
pub fn cross_entropy(logits: &[f64], class: usize) -> Result<(f64, Vec<f64>)> {
    if class >= logits.len() {
        return Err(Error::InvalidArgument(format!(
            "class {class} out of range for {} logits",
            logits.len()
        )));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let loss = total.ln() - (logits[class] - max);
    let mut grad: Vec<f64> = exps.iter().map(|e| e / total).collect();
    grad[class] -= 1.0;
    Ok((loss, grad))
}

/// Mean squared error over coordinates, with gradient w.r.t. `pred`.
pub fn mse(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() {
        return Err(Error::Shape(format!(
            "prediction has {} coordinates, target has {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("empty prediction".into()));
    }
    let n = pred.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; pred.len()];
    for (i, (&p, &t)) in pred.iter().zip(target).enumerate() {
        let diff = p - t;
        loss += diff * diff;
        grad[i] = 2.0 * diff / n;
    }
    Ok((loss / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_cost_ln_of_class_count() {
        for classes in [2usize, 5, 10] {
            let logits = vec![0.7; classes];
            let (loss, grad) = cross_entropy(&logits, 0).unwrap();
            assert!((loss - (classes as f64).ln()).abs() < 1e-12);
            assert!((grad[0] - (1.0 / classes as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_entropy_is_shift_invariant_and_stable() {
        let (a, _) = cross_entropy(&[1.0, 2.0, 3.0], 1).unwrap();
        let (b, _) = cross_entropy(&[1001.0, 1002.0, 1003.0], 1).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!(b.is_finite());
    }

    #[test]
    fn mse_of_identical_vectors_is_zero() {
        let x = vec![1.0, -2.0, 3.5];
        let (loss, grad) = mse(&x, &x).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn mse_gradient_matches_finite_differences() {
        let pred = vec![0.5, -1.0, 2.0];
        let target = vec![1.0, 1.0, 1.0];
        let (_, grad) = mse(&pred, &target).unwrap();
        let h = 1e-6;
        for i in 0..pred.len() {
            let mut plus = pred.clone();
            plus[i] += h;
            let mut minus = pred.clone();
            minus[i] -= h;
            let fd = (mse(&plus, &target).unwrap().0 - mse(&minus, &target).unwrap().0) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(cross_entropy(&[0.0, 0.0], 2).is_err());
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }
}
