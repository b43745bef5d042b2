//! Original maximum-entropy model and feature-based softmax model.
//!
//! The original model maximizes H(Ŷ|X) subject to matching the full
//! joint; with indicator predicates over every (x, y) status the
//! constraint set admits exactly one feasible conditional, namely the
//! empirical P(Y|X). The solver still goes through the log-linear dual
//! so convergence behavior can be exercised. The feature-based softmax
//! model P(y|x) ∝ exp(b(y) + Σ_i λ_i(y) t_i(x)) is trained by
//! deterministic full-batch gradient descent on the (weighted) negative
//! log-likelihood.

use serde::{Deserialize, Serialize};

use crate::discrete_prob::{JointTable, SampleSet};
use crate::{Error, Result};

/// Dual weights ω of the original ME model, one per (x, y) indicator
/// predicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MEDualParams {
    /// `omega[x][y]`, log-odds.
    pub omega: Vec<Vec<f64>>,
}

/// Weights and biases of the feature-based softmax model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxParams {
    /// `lambda[y][i]`: weight of feature i for class y.
    pub lambda: Vec<Vec<f64>>,
    /// `bias[y]`.
    pub bias: Vec<f64>,
}

impl SoftmaxParams {
    pub fn zeros(y_size: usize, n_features: usize) -> Self {
        SoftmaxParams { lambda: vec![vec![0.0; n_features]; y_size], bias: vec![0.0; y_size] }
    }

    pub fn y_size(&self) -> usize {
        self.bias.len()
    }

    pub fn n_features(&self) -> usize {
        self.lambda.first().map_or(0, |r| r.len())
    }
}

/// Deterministic full-batch gradient descent settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop when the gradient max-norm drops below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// L2 weight-decay coefficient on the feature weights.
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 1.0, max_iters: 200_000, grad_tol: 1e-8, seed: 0, l2: 0.0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::Range {
                field: "learning_rate".into(),
                message: "must be > 0".into(),
            });
        }
        if self.max_iters == 0 {
            return Err(Error::Range { field: "max_iters".into(), message: "must be >= 1".into() });
        }
        if self.grad_tol <= 0.0 {
            return Err(Error::Range { field: "grad_tol".into(), message: "must be > 0".into() });
        }
        if self.l2 < 0.0 {
            return Err(Error::Range { field: "l2".into(), message: "must be >= 0".into() });
        }
        Ok(())
    }
}

fn softmax_inplace(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        z += *v;
    }
    for v in logits.iter_mut() {
        *v /= z;
    }
}

/// Solve the original ME model on an exact joint P(X,Y).
///
/// Returns the dual weights and the conditional P_ω(Ŷ|X). The problem
/// decomposes over x-rows (each row has its own predicates), so each
/// row runs an independent gradient-descent fit of its softmax logits
/// to the empirical conditional; rows with P(X = x) = 0 are left at
/// the uniform maximum-entropy completion.
pub fn solve_original_me(j: &JointTable, cfg: &TrainConfig) -> Result<(MEDualParams, Vec<Vec<f64>>)> {
    if j.rank() != 2 {
        return Err(Error::InvalidArgument("solve_original_me needs a rank-2 joint".into()));
    }
    cfg.validate()?;
    let (nx, ny) = (j.dims()[0], j.dims()[1]);
    let px = j.marginal(0);
    let mut omega = vec![vec![0.0; ny]; nx];
    let mut conditional = vec![vec![1.0 / ny as f64; ny]; nx];
    let mut worst_residual = 0.0f64;
    let mut converged = true;
    for x in 0..nx {
        if px[x] <= 0.0 {
            continue; // zero-mass row stays uniform, omega stays 0
        }
        let target: Vec<f64> = (0..ny).map(|y| j.get2(x, y) / px[x]).collect();
        let w = &mut omega[x];
        let mut model = vec![0.0; ny];
        let mut residual = f64::INFINITY;
        for _ in 0..cfg.max_iters {
            model.copy_from_slice(w);
            softmax_inplace(&mut model);
            residual = 0.0;
            for y in 0..ny {
                residual = residual.max((target[y] - model[y]).abs());
            }
            if residual < cfg.grad_tol {
                break;
            }
            for y in 0..ny {
                w[y] += cfg.learning_rate * (target[y] - model[y]);
            }
        }
        model.copy_from_slice(w);
        softmax_inplace(&mut model);
        conditional[x] = model;
        if residual >= cfg.grad_tol {
            converged = false;
            worst_residual = worst_residual.max(residual);
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iters: cfg.max_iters, residual: worst_residual });
    }
    Ok((MEDualParams { omega }, conditional))
}

/// Evaluate the feature-based softmax model on one feature vector.
/// Total on finite inputs; feature values need not lie in [0,1].
pub fn softmax_predict(p: &SoftmaxParams, t: &[f64]) -> Vec<f64> {
    let mut logits: Vec<f64> = p
        .lambda
        .iter()
        .zip(&p.bias)
        .map(|(row, b)| b + row.iter().zip(t).map(|(l, v)| l * v).sum::<f64>())
        .collect();
    softmax_inplace(&mut logits);
    logits
}

/// Outcome report of an iterative fit. Trainers hand back their best
/// iterate even when the gradient tolerance was not reached; callers
/// decide whether non-convergence is fatal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub converged: bool,
    pub iters: usize,
    /// Gradient max-norm at the last evaluated point.
    pub residual: f64,
}

/// One weighted training row: feature vector, label, nonnegative weight.
#[derive(Debug, Clone)]
pub struct WeightedExample {
    pub features: Vec<f64>,
    pub label: usize,
    pub weight: f64,
}

struct SoftmaxObjective<'a> {
    rows: &'a [WeightedExample],
    y_size: usize,
    n_features: usize,
    l2: f64,
    total_weight: f64,
}

impl SoftmaxObjective<'_> {
    /// Weighted mean NLL plus the L2 term.
    fn loss(&self, p: &SoftmaxParams) -> f64 {
        let mut nll = 0.0;
        for r in self.rows {
            let probs = softmax_predict(p, &r.features);
            nll -= r.weight * probs[r.label].max(f64::MIN_POSITIVE).ln();
        }
        let l2_term: f64 = p.lambda.iter().flatten().map(|v| v * v).sum::<f64>() * self.l2 / 2.0;
        nll / self.total_weight + l2_term
    }

    /// Gradient into (`dlambda`, `dbias`); returns its max-norm.
    fn gradient(&self, p: &SoftmaxParams, dlambda: &mut [Vec<f64>], dbias: &mut [f64]) -> f64 {
        for row in dlambda.iter_mut() {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        dbias.iter_mut().for_each(|v| *v = 0.0);
        for r in self.rows {
            let probs = softmax_predict(p, &r.features);
            for y in 0..self.y_size {
                let err = r.weight * (probs[y] - if y == r.label { 1.0 } else { 0.0 });
                dbias[y] += err;
                for i in 0..self.n_features {
                    dlambda[y][i] += err * r.features[i];
                }
            }
        }
        let mut max = 0.0f64;
        for y in 0..self.y_size {
            dbias[y] /= self.total_weight;
            max = max.max(dbias[y].abs());
            for i in 0..self.n_features {
                dlambda[y][i] = dlambda[y][i] / self.total_weight + self.l2 * p.lambda[y][i];
                max = max.max(dlambda[y][i].abs());
            }
        }
        max
    }
}

/// Weighted mean negative log-likelihood plus the L2 term, as minimized
/// by the trainer.
pub fn weighted_nll(rows: &[WeightedExample], y_size: usize, l2: f64, p: &SoftmaxParams) -> f64 {
    let total_weight: f64 = rows.iter().map(|r| r.weight).sum();
    let obj = SoftmaxObjective { rows, y_size, n_features: p.n_features(), l2, total_weight };
    obj.loss(p)
}

/// Analytic gradient of [`weighted_nll`]; returns (dlambda, dbias,
/// max-norm).
pub fn weighted_nll_gradient(
    rows: &[WeightedExample],
    y_size: usize,
    l2: f64,
    p: &SoftmaxParams,
) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let total_weight: f64 = rows.iter().map(|r| r.weight).sum();
    let obj = SoftmaxObjective { rows, y_size, n_features: p.n_features(), l2, total_weight };
    let mut dlambda = vec![vec![0.0; p.n_features()]; y_size];
    let mut dbias = vec![0.0; y_size];
    let norm = obj.gradient(p, &mut dlambda, &mut dbias);
    (dlambda, dbias, norm)
}

/// Train the feature-based softmax model on weighted examples by
/// full-batch gradient descent with zero initialization. A step that
/// would increase the loss is rejected and the learning rate halved, so
/// the loss is non-increasing across accepted steps. On hitting
/// `max_iters` with gradient max-norm still above `grad_tol` the best
/// iterate is returned with `converged = false` in the diagnostics.
pub fn train_weighted_softmax(
    rows: &[WeightedExample],
    y_size: usize,
    cfg: &TrainConfig,
) -> Result<(SoftmaxParams, FitDiagnostics)> {
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    cfg.validate()?;
    let n_features = rows[0].features.len();
    if rows.iter().any(|r| r.features.len() != n_features) {
        return Err(Error::DimensionMismatch("ragged feature vectors".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.label >= y_size) {
        return Err(Error::InvalidArgument(format!(
            "label {} out of range for y_size {y_size}",
            bad.label
        )));
    }
    let total_weight: f64 = rows.iter().map(|r| r.weight).sum();
    if total_weight <= 0.0 {
        return Err(Error::InvalidArgument("total example weight must be > 0".into()));
    }
    let obj = SoftmaxObjective { rows, y_size, n_features, l2: cfg.l2, total_weight };

    let mut params = SoftmaxParams::zeros(y_size, n_features);
    let mut dlambda = vec![vec![0.0; n_features]; y_size];
    let mut dbias = vec![0.0; y_size];
    let mut lr = cfg.learning_rate;
    let mut loss = obj.loss(&params);
    let mut grad_norm = f64::INFINITY;
    let mut iters = 0;
    for it in 0..cfg.max_iters {
        iters = it;
        grad_norm = obj.gradient(&params, &mut dlambda, &mut dbias);
        if grad_norm < cfg.grad_tol {
            return Ok((params, FitDiagnostics { converged: true, iters, residual: grad_norm }));
        }
        // Backtracking on the fixed base rate: reject uphill steps.
        let mut stalled = false;
        loop {
            if lr < 1e-14 {
                // Improvements fell below floating-point resolution.
                stalled = true;
                break;
            }
            let mut trial = params.clone();
            for y in 0..y_size {
                trial.bias[y] -= lr * dbias[y];
                for i in 0..n_features {
                    trial.lambda[y][i] -= lr * dlambda[y][i];
                }
            }
            let trial_loss = obj.loss(&trial);
            if trial_loss <= loss {
                params = trial;
                loss = trial_loss;
                lr = (lr * 1.1).min(cfg.learning_rate * 64.0);
                break;
            }
            lr *= 0.5;
        }
        if stalled {
            break;
        }
    }
    Ok((params, FitDiagnostics { converged: false, iters, residual: grad_norm }))
}

/// Train on an empirical sample set with uniform weights.
pub fn train_feature_softmax(
    data: &SampleSet,
    cfg: &TrainConfig,
) -> Result<(SoftmaxParams, FitDiagnostics)> {
    let w = 1.0 / data.n() as f64;
    let rows: Vec<WeightedExample> = data
        .inputs
        .iter()
        .zip(&data.labels)
        .map(|(f, &l)| WeightedExample { features: f.clone(), label: l, weight: w })
        .collect();
    train_weighted_softmax(&rows, data.y_size, cfg)
}

/// Argmax prediction with lowest-index tie-breaking.
pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best
}
