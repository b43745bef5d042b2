//! Stack of sigmoid logistic layers with a softmax head.
//!
//! Each hidden activation is read as a feature confidence
//! t_i(x) = P(T_i = 1 | X = x), so a depth-L stack realizes an L-level
//! recursive decomposition of the feature-learning problem, with the
//! head as the manageable softmax subproblem. Training runs either
//! jointly over all parameters (backprop) or as block-coordinate sweeps
//! that freeze every layer but one. The objective is mean cross-entropy
//! minus beta times the summed empirical conditional entropies
//! Ĥ(T_{l,i}|X) of the activations; beta = 0 recovers the plain
//! network loss.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete_prob::{binary_entropy, SampleSet};
use crate::maxent_core::{argmax, softmax_predict, FitDiagnostics, SoftmaxParams, TrainConfig};
use crate::{Error, Result};

/// One sigmoid layer: unit i computes sigmoid(w_i · prev + b_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `weights[i][j]`: weight from previous unit j into unit i.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

/// L sigmoid layers plus a softmax head over the top activations.
/// `widths[0]` is the input dimension; L = 0 means the head reads the
/// raw inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub widths: Vec<usize>,
    pub layers: Vec<Layer>,
    pub head: SoftmaxParams,
}

impl LayerStack {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn y_size(&self) -> usize {
        self.head.y_size()
    }

    fn validate(&self) -> Result<()> {
        if self.widths.len() != self.layers.len() + 1 {
            return Err(Error::DimensionMismatch("widths vs layer count".into()));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.weights.len() != self.widths[l + 1]
                || layer.biases.len() != self.widths[l + 1]
                || layer.weights.iter().any(|r| r.len() != self.widths[l])
            {
                return Err(Error::DimensionMismatch(format!("layer {l} shape")));
            }
        }
        if self.head.n_features() != *self.widths.last().unwrap() {
            return Err(Error::DimensionMismatch("head width".into()));
        }
        Ok(())
    }
}

/// Numerically stable sigmoid.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Which parameter block a coordinate step updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Head,
    /// Hidden layer index, 0-based from the input side.
    Layer(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    Backprop,
    Coordinate,
}

/// Training settings for the layer stack. `beta` is the shared weight
/// on the activation-entropy term (one value standing in for the
/// per-feature multipliers). Coordinate mode runs `sweeps` passes of
/// head-first top-down blocks with `inner_iters` gradient steps each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetTrainConfig {
    pub base: TrainConfig,
    pub beta: f64,
    pub mode: TrainMode,
    pub sweeps: usize,
    pub inner_iters: usize,
    /// Iteration counts at which to snapshot the stack (0 = initial).
    pub snapshot_epochs: Vec<usize>,
}

impl Default for NetTrainConfig {
    fn default() -> Self {
        NetTrainConfig {
            base: TrainConfig { learning_rate: 0.5, ..Default::default() },
            beta: 0.0,
            mode: TrainMode::Backprop,
            sweeps: 50,
            inner_iters: 50,
            snapshot_epochs: Vec::new(),
        }
    }
}

impl NetTrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.beta < 0.0 {
            return Err(Error::Range { field: "beta".into(), message: "must be >= 0".into() });
        }
        if self.mode == TrainMode::Coordinate && self.sweeps == 0 {
            return Err(Error::Range {
                field: "sweeps".into(),
                message: "must be >= 1 in coordinate mode".into(),
            });
        }
        Ok(())
    }
}

/// Per-iteration training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub loss: f64,
    pub reg_term: f64,
    pub train_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub rows: Vec<TraceRow>,
}

impl TrainTrace {
    pub const CSV_HEADER: &'static str = "iteration,loss,reg_term,train_error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.iteration, r.loss, r.reg_term, r.train_error));
        }
        out
    }
}

/// Result of a training run: final (best-loss) stack, trace, scheduled
/// snapshots and convergence diagnostics.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub stack: LayerStack,
    pub trace: TrainTrace,
    pub snapshots: Vec<(usize, LayerStack)>,
    pub diag: FitDiagnostics,
}

/// Deterministic stack initialization: weights uniform in [-0.5, 0.5]
/// from the seeded generator, biases zero. The head's feature weights
/// are drawn the same way, after all hidden layers.
pub fn init_stack(input_dim: usize, hidden: &[usize], y_size: usize, seed: u64) -> LayerStack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut widths = vec![input_dim];
    widths.extend_from_slice(hidden);
    let mut layers = Vec::with_capacity(hidden.len());
    for l in 0..hidden.len() {
        let (n_out, n_in) = (widths[l + 1], widths[l]);
        let weights =
            (0..n_out).map(|_| (0..n_in).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
        layers.push(Layer { weights, biases: vec![0.0; n_out] });
    }
    let top = *widths.last().unwrap();
    let lambda = (0..y_size).map(|_| (0..top).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
    LayerStack { widths, layers, head: SoftmaxParams { lambda, bias: vec![0.0; y_size] } }
}

/// Forward pass: per-layer sigmoid activations in (0,1) and the head's
/// output distribution.
pub fn forward(net: &LayerStack, x: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if x.len() != net.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input dim {} vs network input {}",
            x.len(),
            net.input_dim()
        )));
    }
    let mut activations = Vec::with_capacity(net.depth());
    let mut prev: Vec<f64> = x.to_vec();
    for layer in &net.layers {
        let act: Vec<f64> = layer
            .weights
            .iter()
            .zip(&layer.biases)
            .map(|(w, b)| sigmoid(b + w.iter().zip(&prev).map(|(wi, p)| wi * p).sum::<f64>()))
            .collect();
        activations.push(act.clone());
        prev = act;
    }
    let output = softmax_predict(&net.head, &prev);
    Ok((activations, output))
}

/// Loss components over a sample set: (total loss, cross-entropy,
/// activation-entropy sum Σ Ĥ(T_{l,i}|X), training error rate).
/// total = cross-entropy − beta · reg.
pub fn loss_components(net: &LayerStack, data: &SampleSet, beta: f64) -> Result<(f64, f64, f64, f64)> {
    net.validate()?;
    if data.n() == 0 {
        return Err(Error::EmptySample);
    }
    let n = data.n() as f64;
    let mut ce = 0.0;
    let mut reg = 0.0;
    let mut errors = 0usize;
    for (x, &label) in data.inputs.iter().zip(&data.labels) {
        let (acts, out) = forward(net, x)?;
        ce -= out[label].max(f64::MIN_POSITIVE).ln() / n;
        for layer_act in &acts {
            for &a in layer_act {
                reg += binary_entropy(a) / n;
            }
        }
        if argmax(&out) != label {
            errors += 1;
        }
    }
    Ok((ce - beta * reg, ce, reg, errors as f64 / n))
}

/// Total training objective in nats.
pub fn loss(net: &LayerStack, data: &SampleSet, beta: f64) -> Result<f64> {
    loss_components(net, data, beta).map(|(l, _, _, _)| l)
}

/// Zero-shaped gradient holder mirroring the stack's parameters.
fn zero_like(net: &LayerStack) -> LayerStack {
    LayerStack {
        widths: net.widths.clone(),
        layers: net
            .layers
            .iter()
            .map(|l| Layer {
                weights: l.weights.iter().map(|r| vec![0.0; r.len()]).collect(),
                biases: vec![0.0; l.biases.len()],
            })
            .collect(),
        head: SoftmaxParams::zeros(net.y_size(), net.head.n_features()),
    }
}

fn logit_clamped(a: f64) -> f64 {
    let a = a.clamp(1e-12, 1.0 - 1e-12);
    (a / (1.0 - a)).ln()
}

/// Analytic gradient of the full objective. Returns the gradient stack
/// and the max-norm over the parameters selected by `active` (None =
/// all parameters).
pub fn gradient(
    net: &LayerStack,
    data: &SampleSet,
    beta: f64,
    active: Option<Block>,
) -> Result<(LayerStack, f64)> {
    net.validate()?;
    let n = data.n() as f64;
    let depth = net.depth();
    let mut g = zero_like(net);
    for (x, &label) in data.inputs.iter().zip(&data.labels) {
        let (acts, out) = forward(net, x)?;
        let top: &[f64] = if depth > 0 { &acts[depth - 1] } else { x };
        // Head block.
        let mut dlogit: Vec<f64> = out.clone();
        dlogit[label] -= 1.0;
        dlogit.iter_mut().for_each(|v| *v /= n);
        for y in 0..net.y_size() {
            g.head.bias[y] += dlogit[y];
            for i in 0..top.len() {
                g.head.lambda[y][i] += dlogit[y] * top[i];
            }
        }
        // Backprop through the hidden layers.
        let mut d_act: Vec<f64> = (0..top.len())
            .map(|i| (0..net.y_size()).map(|y| dlogit[y] * net.head.lambda[y][i]).sum())
            .collect();
        for l in (0..depth).rev() {
            let a = &acts[l];
            let prev: &[f64] = if l > 0 { &acts[l - 1] } else { x };
            // Entropy-penalty contribution: d(-beta·h2(a))/da.
            let mut dz = vec![0.0; a.len()];
            for i in 0..a.len() {
                let da = d_act[i] + (beta / n) * logit_clamped(a[i]);
                dz[i] = da * a[i] * (1.0 - a[i]);
            }
            let layer = &net.layers[l];
            let gl = &mut g.layers[l];
            for i in 0..a.len() {
                gl.biases[i] += dz[i];
                for j in 0..prev.len() {
                    gl.weights[i][j] += dz[i] * prev[j];
                }
            }
            if l > 0 {
                d_act = (0..prev.len())
                    .map(|j| (0..a.len()).map(|i| dz[i] * layer.weights[i][j]).sum())
                    .collect();
            }
        }
    }
    let norm = active_max_norm(&g, active);
    Ok((g, norm))
}

fn active_max_norm(g: &LayerStack, active: Option<Block>) -> f64 {
    let mut max = 0.0f64;
    let head_on = matches!(active, None | Some(Block::Head));
    if head_on {
        for row in &g.head.lambda {
            for v in row {
                max = max.max(v.abs());
            }
        }
        for v in &g.head.bias {
            max = max.max(v.abs());
        }
    }
    for (l, layer) in g.layers.iter().enumerate() {
        let on = match active {
            None => true,
            Some(Block::Layer(i)) => i == l,
            Some(Block::Head) => false,
        };
        if !on {
            continue;
        }
        for row in &layer.weights {
            for v in row {
                max = max.max(v.abs());
            }
        }
        for v in &layer.biases {
            max = max.max(v.abs());
        }
    }
    max
}

/// Apply `params -= lr * grads`, restricted to one block when given.
fn apply_step(net: &mut LayerStack, g: &LayerStack, lr: f64, active: Option<Block>) {
    if matches!(active, None | Some(Block::Head)) {
        for (row, grow) in net.head.lambda.iter_mut().zip(&g.head.lambda) {
            for (v, d) in row.iter_mut().zip(grow) {
                *v -= lr * d;
            }
        }
        for (v, d) in net.head.bias.iter_mut().zip(&g.head.bias) {
            *v -= lr * d;
        }
    }
    for (l, (layer, gl)) in net.layers.iter_mut().zip(&g.layers).enumerate() {
        let on = match active {
            None => true,
            Some(Block::Layer(i)) => i == l,
            Some(Block::Head) => false,
        };
        if !on {
            continue;
        }
        for (row, grow) in layer.weights.iter_mut().zip(&gl.weights) {
            for (v, d) in row.iter_mut().zip(grow) {
                *v -= lr * d;
            }
        }
        for (v, d) in layer.biases.iter_mut().zip(&gl.biases) {
            *v -= lr * d;
        }
    }
}

/// One accepted descent step on the given block. Backtracks (halving
/// `lr`) until the loss does not increase; accepted steps grow the rate
/// slightly. Returns the new loss and gradient max-norm.
fn descend_once(
    net: &mut LayerStack,
    data: &SampleSet,
    beta: f64,
    active: Option<Block>,
    lr: &mut f64,
    lr_cap: f64,
    loss_now: &mut f64,
) -> Result<f64> {
    let (g, norm) = gradient(net, data, beta, active)?;
    loop {
        if *lr < 1e-14 {
            // Improvements fell below floating-point resolution; leave
            // the parameters untouched rather than accept an uphill step.
            return Ok(norm);
        }
        let mut trial = net.clone();
        apply_step(&mut trial, &g, *lr, active);
        let trial_loss = loss(&trial, data, beta)?;
        if trial_loss <= *loss_now {
            *net = trial;
            *loss_now = trial_loss;
            *lr = (*lr * 1.1).min(lr_cap);
            return Ok(norm);
        }
        *lr *= 0.5;
    }
}

/// Joint full-batch gradient descent over all parameters. Deterministic
/// per (net, data, cfg); snapshots are taken at the configured
/// iteration counts before the corresponding step.
pub fn train_backprop(net: &LayerStack, data: &SampleSet, cfg: &NetTrainConfig) -> Result<TrainRun> {
    if cfg.mode != TrainMode::Backprop {
        return Err(Error::InvalidArgument("train_backprop requires mode = backprop".into()));
    }
    cfg.validate()?;
    net.validate()?;
    let mut current = net.clone();
    let mut trace = TrainTrace::default();
    let mut snapshots = Vec::new();
    let mut lr = cfg.base.learning_rate;
    let lr_cap = cfg.base.learning_rate * 64.0;
    let (mut loss_now, _, _, _) = loss_components(&current, data, cfg.beta)?;
    let mut norm = f64::INFINITY;
    let mut iters = 0;
    for it in 0..cfg.base.max_iters {
        if cfg.snapshot_epochs.contains(&it) {
            snapshots.push((it, current.clone()));
        }
        norm = descend_once(&mut current, data, cfg.beta, None, &mut lr, lr_cap, &mut loss_now)?;
        let (l, _, reg, err) = loss_components(&current, data, cfg.beta)?;
        trace.rows.push(TraceRow { iteration: it + 1, loss: l, reg_term: reg, train_error: err });
        iters = it + 1;
        if norm < cfg.base.grad_tol {
            break;
        }
    }
    if cfg.snapshot_epochs.contains(&iters) || cfg.snapshot_epochs.iter().any(|&e| e >= iters) {
        snapshots.push((iters, current.clone()));
    }
    let converged = norm < cfg.base.grad_tol;
    Ok(TrainRun {
        stack: current,
        trace,
        snapshots,
        diag: FitDiagnostics { converged, iters, residual: norm },
    })
}

/// Block-coordinate training: per sweep, optimize the head first, then
/// each hidden layer from the top down, freezing everything else.
/// Frozen blocks are bit-identical before and after a block's steps.
pub fn train_coordinate(
    net: &LayerStack,
    data: &SampleSet,
    cfg: &NetTrainConfig,
) -> Result<TrainRun> {
    if cfg.mode != TrainMode::Coordinate {
        return Err(Error::InvalidArgument("train_coordinate requires mode = coordinate".into()));
    }
    cfg.validate()?;
    net.validate()?;
    let mut current = net.clone();
    let mut trace = TrainTrace::default();
    let mut blocks = vec![Block::Head];
    blocks.extend((0..net.depth()).rev().map(Block::Layer));
    let mut lrs = vec![cfg.base.learning_rate; blocks.len()];
    let lr_cap = cfg.base.learning_rate * 64.0;
    let (mut loss_now, _, _, _) = loss_components(&current, data, cfg.beta)?;
    let mut norm = f64::INFINITY;
    for sweep in 0..cfg.sweeps {
        for (bi, &block) in blocks.iter().enumerate() {
            for _ in 0..cfg.inner_iters {
                norm = descend_once(
                    &mut current,
                    data,
                    cfg.beta,
                    Some(block),
                    &mut lrs[bi],
                    lr_cap,
                    &mut loss_now,
                )?;
                if norm < cfg.base.grad_tol {
                    break;
                }
            }
        }
        let (l, _, reg, err) = loss_components(&current, data, cfg.beta)?;
        trace.rows.push(TraceRow { iteration: sweep + 1, loss: l, reg_term: reg, train_error: err });
    }
    let converged = norm < cfg.base.grad_tol;
    Ok(TrainRun {
        stack: current,
        trace,
        snapshots: Vec::new(),
        diag: FitDiagnostics { converged, iters: cfg.sweeps, residual: norm },
    })
}

/// Dispatch on the configured mode.
pub fn train(net: &LayerStack, data: &SampleSet, cfg: &NetTrainConfig) -> Result<TrainRun> {
    match cfg.mode {
        TrainMode::Backprop => train_backprop(net, data, cfg),
        TrainMode::Coordinate => train_coordinate(net, data, cfg),
    }
}

/// The canonical 4-point XOR task over two binary inputs.
pub fn xor_dataset() -> SampleSet {
    SampleSet::new(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![0, 1, 1, 0],
        2,
    )
    .unwrap()
}
