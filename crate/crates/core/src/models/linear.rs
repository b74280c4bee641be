use std::cmp::Ordering;

use ndarray::{Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_training_data, TrainConfig, N_CLASSES};
use crate::error::Result;
use crate::Level;

/// Class-by-feature weights and per-class bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearParams {
    fn from_arrays(weights: &Array2<f64>, bias: &Array1<f64>) -> Self {
        LinearParams {
            weights: weights.rows().into_iter().map(|r| r.to_vec()).collect(),
            bias: bias.to_vec(),
        }
    }

    pub fn scores(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        let mut out = [0.0; N_CLASSES];
        for (k, score) in out.iter_mut().enumerate() {
            *score = self.bias[k] + self.weights[k].iter().zip(x.iter()).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }

    /// Softmax over the class scores.
    pub fn proba(&self, x: ArrayView1<'_, f64>) -> [f64; N_CLASSES] {
        softmax(&self.scores(x))
    }
}

fn softmax(scores: &[f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = scores.map(|s| (s - max).exp());
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

/// Row order that depends only on row contents, so training is invariant to
/// how the caller ordered the rows.
fn canonical_order(x: &Array2<f64>, y: &[Level]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    order.sort_by(|&a, &b| {
        y[a].cmp(&y[b]).then_with(|| {
            x.row(a)
                .iter()
                .zip(x.row(b).iter())
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    order
}

/// Mean cross-entropy plus `lambda/2 · ||W||²` (bias unpenalized), with its
/// gradient with respect to the weights and bias.
pub fn logreg_loss_and_gradient(
    weights: &Array2<f64>,
    bias: &Array1<f64>,
    x: &Array2<f64>,
    y: &[Level],
    lambda: f64,
) -> (f64, Array2<f64>, Array1<f64>) {
    let order: Vec<usize> = (0..x.nrows()).collect();
    loss_and_gradient_ordered(weights, bias, x, y, lambda, &order)
}

fn loss_and_gradient_ordered(
    weights: &Array2<f64>,
    bias: &Array1<f64>,
    x: &Array2<f64>,
    y: &[Level],
    lambda: f64,
    order: &[usize],
) -> (f64, Array2<f64>, Array1<f64>) {
    let n = order.len() as f64;
    let mut grad_w = Array2::zeros(weights.raw_dim());
    let mut grad_b = Array1::zeros(bias.raw_dim());
    let mut loss = 0.0;
    for &i in order {
        let row = x.row(i);
        let mut scores = [0.0; N_CLASSES];
        for (k, s) in scores.iter_mut().enumerate() {
            *s = bias[k] + weights.row(k).dot(&row);
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        let target = y[i].index();
        loss -= scores[target] - log_norm;
        for k in 0..N_CLASSES {
            let diff = (scores[k] - log_norm).exp() - if k == target { 1.0 } else { 0.0 };
            grad_b[k] += diff;
            grad_w.row_mut(k).scaled_add(diff, &row);
        }
    }
    loss /= n;
    grad_w /= n;
    grad_b /= n;
    loss += 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>();
    grad_w.scaled_add(lambda, weights);
    (loss, grad_w, grad_b)
}

pub(super) fn fit_logreg(x: &Array2<f64>, y: &[Level], cfg: &TrainConfig) -> Result<LinearParams> {
    check_training_data(x, y)?;
    let order = canonical_order(x, y);
    let mut weights = Array2::zeros((N_CLASSES, x.ncols()));
    let mut bias = Array1::zeros(N_CLASSES);
    for _ in 0..cfg.epochs {
        let (_, grad_w, grad_b) =
            loss_and_gradient_ordered(&weights, &bias, x, y, cfg.l2_lambda, &order);
        weights.scaled_add(-cfg.learning_rate, &grad_w);
        bias.scaled_add(-cfg.learning_rate, &grad_b);
    }
    Ok(LinearParams::from_arrays(&weights, &bias))
}

/// Step size for epoch `e`: `learning_rate / sqrt(1 + e)`.
pub(super) fn fit_svm(x: &Array2<f64>, y: &[Level], cfg: &TrainConfig) -> Result<LinearParams> {
    check_training_data(x, y)?;
    let mut order = canonical_order(x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = Array2::<f64>::zeros((N_CLASSES, x.ncols()));
    let mut bias = Array1::<f64>::zeros(N_CLASSES);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let eta = cfg.learning_rate / ((1 + epoch) as f64).sqrt();
        for &i in &order {
            let row = x.row(i);
            for k in 0..N_CLASSES {
                let sign = if y[i].index() == k { 1.0 } else { -1.0 };
                let margin = sign * (weights.row(k).dot(&row) + bias[k]);
                let mut w = weights.row_mut(k);
                w *= 1.0 - eta * cfg.l2_lambda;
                if margin < 1.0 {
                    w.scaled_add(eta * sign, &row);
                    bias[k] += eta * sign;
                }
            }
        }
    }
    Ok(LinearParams::from_arrays(&weights, &bias))
}
