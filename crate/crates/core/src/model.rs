//! L2-regularized logistic regression, the single classifier family behind
//! both the document model and the rationale model.
//!
//! Training minimizes
//!
//! ```text
//! mean_i logloss(y_i, w·x_i + b) + (l2_lambda / 2) ‖w‖²
//! ```
//!
//! (intercept unregularized) with full-batch gradient descent. Each
//! iteration tries a Barzilai-Borwein step first and backtracks by halving
//! until the Armijo condition holds, so every accepted step lowers the loss.
//! Parameters start at zero, which makes training deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::text::{SparseVector, Vocabulary};

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DocumentModel,
    RationaleModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the gradient ∞-norm falls below this.
    pub tolerance: f64,
    /// Carried for provenance; the full-batch solver draws no random numbers.
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_lambda: 1e-4,
            max_iters: 1000,
            tolerance: 1e-6,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be > 0".into()));
        }
        if !self.l2_lambda.is_finite() || self.l2_lambda < 0.0 {
            return Err(Error::InvalidConfig("l2_lambda must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Weights and intercept of a linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl Params {
    pub fn zeros(dim: usize) -> Self {
        Params {
            weights: vec![0.0; dim],
            intercept: 0.0,
        }
    }

    fn linear(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.intercept
    }

    fn axpy(&self, step: f64, dir: &Params) -> Params {
        Params {
            weights: self
                .weights
                .iter()
                .zip(&dir.weights)
                .map(|(w, g)| w - step * g)
                .collect(),
            intercept: self.intercept - step * dir.intercept,
        }
    }

    fn dot(&self, other: &Params) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + self.intercept * other.intercept
    }

    fn sub(&self, other: &Params) -> Params {
        Params {
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a - b)
                .collect(),
            intercept: self.intercept - other.intercept,
        }
    }

    fn inf_norm(&self) -> f64 {
        self.weights
            .iter()
            .fold(self.intercept.abs(), |m, g| m.max(g.abs()))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Regularized mean logistic loss and its exact gradient at `params`.
pub fn loss_and_gradient(
    examples: &[(SparseVector, bool)],
    params: &Params,
    l2_lambda: f64,
    exec: Execution,
) -> (f64, Params) {
    let dim = params.weights.len();
    let n = examples.len().max(1) as f64;
    let (loss_sum, mut grad) = exec.chunked_sum(
        examples,
        |chunk| {
            let mut loss = 0.0;
            let mut g = Params::zeros(dim);
            for (x, y) in chunk {
                let z = params.linear(x);
                loss += if *y { softplus(-z) } else { softplus(z) };
                let r = sigmoid(z) - if *y { 1.0 } else { 0.0 };
                for &(i, v) in x.entries() {
                    g.weights[i as usize] += r * v;
                }
                g.intercept += r;
            }
            (loss, g)
        },
        (0.0, Params::zeros(dim)),
        |(la, mut ga), (lb, gb)| {
            for (a, b) in ga.weights.iter_mut().zip(&gb.weights) {
                *a += b;
            }
            ga.intercept += gb.intercept;
            (la + lb, ga)
        },
    );
    for (g, w) in grad.weights.iter_mut().zip(&params.weights) {
        *g = *g / n + l2_lambda * w;
    }
    grad.intercept /= n;
    let reg: f64 = params.weights.iter().map(|w| w * w).sum::<f64>() * l2_lambda / 2.0;
    (loss_sum / n + reg, grad)
}

/// Per-run record of the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Loss at the start and after every accepted step.
    pub losses: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub kind: ModelKind,
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub vocab_fingerprint: String,
}

impl LinearClassifier {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        if self.vocab_fingerprint != vocab.fingerprint() {
            return Err(Error::VocabularyMismatch {
                model: self.vocab_fingerprint.clone(),
                vocab: vocab.fingerprint().to_owned(),
            });
        }
        if self.dim() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: vocab.len(),
            });
        }
        Ok(())
    }

    pub fn linear_score(&self, x: &SparseVector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(x.dot(&self.weights) + self.intercept)
    }

    /// `sigmoid(w·x + b)`, kept strictly inside (0, 1).
    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64> {
        self.linear_score(x).map(probability)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: LinearClassifier = serde_json::from_str(json)?;
        if !model.intercept.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig("model contains non-finite values".into()));
        }
        Ok(model)
    }
}

/// Sigmoid clamped to the open unit interval.
pub fn probability(z: f64) -> f64 {
    const HI: f64 = 1.0 - f64::EPSILON / 2.0;
    sigmoid(z).clamp(f64::MIN_POSITIVE, HI)
}

/// Trains a classifier of `kind` over `vocab`'s feature space.
pub fn train(
    examples: &[(SparseVector, bool)],
    vocab: &Vocabulary,
    kind: ModelKind,
    config: &TrainConfig,
) -> Result<LinearClassifier> {
    train_with_trace(examples, vocab, kind, config).map(|(m, _)| m)
}

pub fn train_with_trace(
    examples: &[(SparseVector, bool)],
    vocab: &Vocabulary,
    kind: ModelKind,
    config: &TrainConfig,
) -> Result<(LinearClassifier, TrainTrace)> {
    config.validate()?;
    let dim = vocab.len();
    if let Some((x, _)) = examples.iter().find(|(x, _)| x.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.dim(),
        });
    }
    let positives = examples.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == examples.len() {
        return Err(Error::SingleClass);
    }

    let (params, trace) = minimize(examples, dim, config);
    Ok((
        LinearClassifier {
            kind,
            intercept: params.intercept,
            weights: params.weights,
            vocab_fingerprint: vocab.fingerprint().to_owned(),
        },
        trace,
    ))
}

fn minimize(examples: &[(SparseVector, bool)], dim: usize, config: &TrainConfig) -> (Params, TrainTrace) {
    let eval = |p: &Params| loss_and_gradient(examples, p, config.l2_lambda, config.execution);
    let mut params = Params::zeros(dim);
    let (mut loss, mut grad) = eval(&params);
    let mut losses = vec![loss];
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iters {
        if grad.inf_norm() < config.tolerance {
            converged = true;
            break;
        }
        let grad_sq = grad.dot(&grad);
        let mut t = step;
        let accepted = loop {
            let candidate = params.axpy(t, &grad);
            let (c_loss, c_grad) = eval(&candidate);
            if c_loss.is_finite() && c_loss <= loss - ARMIJO_C * t * grad_sq {
                break Some((candidate, c_loss, c_grad));
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        let Some((next, next_loss, next_grad)) = accepted else {
            log::debug!("line search stalled after {iterations} iterations");
            break;
        };
        let s = next.sub(&params);
        let y = next_grad.sub(&grad);
        let sy = s.dot(&y);
        step = if sy > 0.0 {
            (s.dot(&s) / sy).clamp(MIN_STEP, MAX_STEP)
        } else {
            (t * 2.0).min(MAX_STEP)
        };
        params = next;
        loss = next_loss;
        grad = next_grad;
        losses.push(loss);
        iterations += 1;
    }
    if !converged && grad.inf_norm() < config.tolerance {
        converged = true;
    }
    let final_grad_norm = grad.inf_norm();
    (
        params,
        TrainTrace {
            losses,
            iterations,
            converged,
            final_grad_norm,
        },
    )
}
