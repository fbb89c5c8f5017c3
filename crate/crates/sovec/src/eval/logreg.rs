//! Multinomial l2-regularized logistic regression, fit by batch gradient
//! descent with backtracking line search. Small and self-contained; the
//! benchmark protocols only need a few thousand examples.

use crate::error::{Error, Result};
use crate::eval::features::FeatureSet;

const MAX_ITERS: usize = 2000;
const GRAD_TOL: f64 = 1e-9;

/// Default regularization grid, log-spaced over 1e-3 .. 1e2.
pub fn default_l2_grid() -> Vec<f64> {
    vec![1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]
}

/// Trained softmax classifier. Weights are row-major C x (d+1) with the
/// bias in the last column; the bias is not regularized.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    weights: Vec<f64>,
    classes: Vec<String>,
    dim: usize,
}

/// Average negative log-likelihood plus (l2/2) * ||W||^2 over the
/// non-bias weights, and its gradient. `weights` is C x (dim+1) flattened.
pub fn loss_and_gradient(
    weights: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    dim: usize,
    l2: f64,
) -> (f64, Vec<f64>) {
    let cols = dim + 1;
    debug_assert_eq!(weights.len(), n_classes * cols);
    let n = features.len() as f64;
    let mut grad = vec![0.0; weights.len()];
    let mut loss = 0.0;
    let mut scores = vec![0.0; n_classes];

    for (x, &y) in features.iter().zip(labels.iter()) {
        for (c, score) in scores.iter_mut().enumerate() {
            let row = &weights[c * cols..(c + 1) * cols];
            let mut s = row[dim]; // bias
            for (w, v) in row[..dim].iter().zip(x.iter()) {
                s += w * v;
            }
            *score = s;
        }
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        loss += (log_z - scores[y]) / n;
        for c in 0..n_classes {
            let p = (scores[c] - log_z).exp();
            let coef = (p - if c == y { 1.0 } else { 0.0 }) / n;
            let grow = &mut grad[c * cols..(c + 1) * cols];
            for (g, v) in grow[..dim].iter_mut().zip(x.iter()) {
                *g += coef * v;
            }
            grow[dim] += coef;
        }
    }

    for c in 0..n_classes {
        for j in 0..dim {
            let w = weights[c * cols + j];
            loss += 0.5 * l2 * w * w;
            grad[c * cols + j] += l2 * w;
        }
    }
    (loss, grad)
}

impl LogisticRegression {
    /// Fits from zero weights.
    pub fn fit(train: &FeatureSet, l2: f64) -> Result<Self> {
        let dim = train.dim();
        let init = vec![0.0; train.classes.len() * (dim + 1)];
        Self::fit_from(init, train, l2)
    }

    /// Fits from the given initial weights (C x (dim+1) flattened). The
    /// objective is convex, so any start reaches the same optimum.
    pub fn fit_from(mut weights: Vec<f64>, train: &FeatureSet, l2: f64) -> Result<Self> {
        let n_classes = train.classes.len();
        if n_classes < 2 {
            return Err(Error::Degenerate(
                "classification needs at least 2 classes".into(),
            ));
        }
        let distinct: std::collections::HashSet<usize> = train.labels.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(Error::Degenerate(
                "training set contains a single class".into(),
            ));
        }
        if train.is_empty() {
            return Err(Error::Degenerate("empty training set".into()));
        }
        let dim = train.dim();
        if weights.len() != n_classes * (dim + 1) {
            return Err(Error::Config(format!(
                "initial weights have {} values, expected {}",
                weights.len(),
                n_classes * (dim + 1)
            )));
        }

        let (mut loss, mut grad) = loss_and_gradient(
            &weights,
            &train.features,
            &train.labels,
            n_classes,
            dim,
            l2,
        );
        let mut step = 1.0;
        for _ in 0..MAX_ITERS {
            let grad_norm_sq: f64 = grad.iter().map(|g| g * g).sum();
            if grad_norm_sq.sqrt() <= GRAD_TOL {
                break;
            }
            // Armijo backtracking on the descent direction -grad.
            let mut accepted = false;
            for _ in 0..60 {
                let candidate: Vec<f64> = weights
                    .iter()
                    .zip(grad.iter())
                    .map(|(w, g)| w - step * g)
                    .collect();
                let (new_loss, new_grad) = loss_and_gradient(
                    &candidate,
                    &train.features,
                    &train.labels,
                    n_classes,
                    dim,
                    l2,
                );
                if new_loss <= loss - 1e-4 * step * grad_norm_sq {
                    weights = candidate;
                    loss = new_loss;
                    grad = new_grad;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break; // step underflowed; we are at numerical precision
            }
        }
        Ok(LogisticRegression {
            weights,
            classes: train.classes.clone(),
            dim,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the highest-scoring class.
    pub fn predict(&self, features: &[f64]) -> usize {
        let cols = self.dim + 1;
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..self.classes.len() {
            let row = &self.weights[c * cols..(c + 1) * cols];
            let mut s = row[self.dim];
            for (w, v) in row[..self.dim].iter().zip(features.iter()) {
                s += w * v;
            }
            if s > best_score {
                best_score = s;
                best = c;
            }
        }
        best
    }

    pub fn accuracy(&self, set: &FeatureSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let correct = set
            .features
            .iter()
            .zip(set.labels.iter())
            .filter(|(x, &y)| self.predict(x) == y)
            .count();
        correct as f64 / set.len() as f64
    }

    /// Final training loss at the fitted weights.
    pub fn loss(&self, set: &FeatureSet, l2: f64) -> f64 {
        loss_and_gradient(
            &self.weights,
            &set.features,
            &set.labels,
            self.classes.len(),
            self.dim,
            l2,
        )
        .0
    }
}

/// A grid-selected classifier.
#[derive(Debug, Clone)]
pub struct LogRegFit {
    pub model: LogisticRegression,
    pub l2: f64,
    pub dev_accuracy: f64,
}

/// Fits one model per grid value and keeps the one with the best dev
/// accuracy; ties go to the larger l2 (the stronger regularizer).
pub fn train_logreg(train: &FeatureSet, dev: &FeatureSet, l2_grid: &[f64]) -> Result<LogRegFit> {
    if l2_grid.is_empty() {
        return Err(Error::Config("empty l2 grid".into()));
    }
    if dev.dim() != train.dim() {
        return Err(Error::Config(format!(
            "dev features have dim {}, train has {}",
            dev.dim(),
            train.dim()
        )));
    }
    let mut best: Option<LogRegFit> = None;
    for &l2 in l2_grid {
        if l2 < 0.0 {
            return Err(Error::Config(format!("negative l2 value {l2}")));
        }
        let model = LogisticRegression::fit(train, l2)?;
        let dev_accuracy = model.accuracy(dev);
        let better = match &best {
            None => true,
            Some(b) => {
                dev_accuracy > b.dev_accuracy
                    || (dev_accuracy == b.dev_accuracy && l2 > b.l2)
            }
        };
        if better {
            best = Some(LogRegFit {
                model,
                l2,
                dev_accuracy,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}
