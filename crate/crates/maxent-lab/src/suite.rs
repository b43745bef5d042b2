//! Acceptance battery. Each check lives behind a common trait in a
//! named registry, emits one row per metric, and pins its own
//! thresholds; `run_suite` executes the lot and writes deterministic
//! CSV/JSON artifacts.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{cell_seed, hash_of, ExperimentConfig, RunRecord};
use crate::discrete_prob::{
    entropy, induce_feature_input_pair, induce_feature_pair_triple, induce_triple,
    mutual_information, FeatureMap, JointTable, SampleSet,
};
use crate::equivalence_lab::{
    generate_equiv_instance, generate_violating_instance, verify_equivalence_theorem,
    verify_inequality_chain, EquivalenceReport, ViolationKind, TV_TOL,
};
use crate::info_plane::{default_schedule, render_plane_svg, track, verify_ib_corollary};
use crate::maxent_core::{
    softmax_predict, solve_original_me, train_feature_softmax, weighted_nll,
    weighted_nll_gradient, SoftmaxParams, TrainConfig, WeightedExample,
};
use crate::recursive_net::{
    forward, gradient, init_stack, loss, loss_components, train_backprop, train_coordinate,
    xor_dataset, LayerStack, NetTrainConfig, TrainMode,
};
use crate::Result;

pub const SUITE_CSV_HEADER: &str = "check_id,metric,threshold,value,pass";

/// One metric of one check. `pass` encodes the check's own comparison
/// direction; `threshold` is reported for the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub check_id: String,
    pub metric: String,
    pub threshold: f64,
    pub value: f64,
    pub pass: bool,
}

impl SuiteRow {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.check_id, self.metric, self.threshold, self.value, self.pass)
    }
}

fn row(check_id: &str, metric: &str, threshold: f64, value: f64, pass: bool) -> SuiteRow {
    SuiteRow { check_id: check_id.into(), metric: metric.into(), threshold, value, pass }
}

/// Knobs for falsifiability probes; defaults reproduce the release gate.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Equivalence tv threshold used by the positive-direction check.
    pub theorem_tv_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { theorem_tv_tol: TV_TOL }
    }
}

pub struct SuiteContext<'a> {
    pub cfg: &'a ExperimentConfig,
    pub opts: SuiteOptions,
    pub out_dir: &'a Path,
}

pub trait SuiteCheck: Sync + Send {
    fn id(&self) -> &'static str;
    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>>;
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn random_joint(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> JointTable {
    // Strictly positive entries so every conditional is well defined.
    let mut probs: Vec<f64> = (0..nx * ny).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= s;
    }
    JointTable::new(vec![nx, ny], probs).expect("normalized by construction")
}

/// Draw `n` (x, y) pairs from an exact joint; inputs are feature rows.
fn sample_from_joint(
    joint: &JointTable,
    features: &FeatureMap,
    n: usize,
    seed: u64,
) -> (SampleSet, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nx, ny) = (joint.dims()[0], joint.dims()[1]);
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u = rng.gen::<f64>();
        let mut cell = (nx - 1, ny - 1);
        'scan: for x in 0..nx {
            for y in 0..ny {
                u -= joint.get2(x, y);
                if u <= 0.0 {
                    cell = (x, y);
                    break 'scan;
                }
            }
        }
        inputs.push(features.row(cell.0));
        labels.push(cell.1);
        xs.push(cell.0);
    }
    (SampleSet::new(inputs, labels, ny).expect("nonempty by construction"), xs)
}

struct MeOracle;

impl SuiteCheck for MeOracle {
    fn id(&self) -> &'static str {
        "01_me_oracle"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let cfg = TrainConfig { grad_tol: 1e-9, max_iters: 500_000, ..ctx.cfg.solver.clone() };
        let mut max_tv = 0.0f64;
        for i in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(ctx.cfg.generator.seed, i));
            let joint = random_joint(&mut rng, 8, 5);
            let (_, solved) = solve_original_me(&joint, &cfg)?;
            let oracle = joint.conditional_rows();
            for (s, o) in solved.iter().zip(&oracle) {
                max_tv = max_tv.max(tv(s, o));
            }
        }
        Ok(vec![row(self.id(), "max_row_tv", 1e-6, max_tv, max_tv <= 1e-6)])
    }
}

struct TheoremPositive;

impl SuiteCheck for TheoremPositive {
    fn id(&self) -> &'static str {
        "02_theorem_positive"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let (mut c1, mut c2, mut max_tv) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..100u64 {
            let seed = cell_seed(ctx.cfg.generator.seed, 1000 + i);
            let n = 1 + (i as usize % 6);
            let y = 2 + (i as usize % 3);
            let inst = generate_equiv_instance(seed, n, y)?;
            let rep = verify_equivalence_theorem(&inst, &ctx.cfg.solver)?;
            c1 = c1.max(rep.i_xy_given_t);
            c2 = c2.max(rep.max_pairwise_i_titj_given_y);
            max_tv = max_tv.max(rep.tv_distance);
        }
        let tol = ctx.opts.theorem_tv_tol;
        Ok(vec![
            row(self.id(), "max_condition1", 1e-9, c1, c1 <= 1e-9),
            row(self.id(), "max_condition2", 1e-9, c2, c2 <= 1e-9),
            row(self.id(), "max_tv", tol, max_tv, max_tv <= tol),
        ])
    }
}

struct NegativeControl;

impl SuiteCheck for NegativeControl {
    fn id(&self) -> &'static str {
        "03_negative_control"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let mut tvs = Vec::with_capacity(50);
        for i in 0..50u64 {
            let seed = cell_seed(ctx.cfg.generator.seed, 3000 + i);
            let inst = generate_violating_instance(seed, ViolationKind::ViolateC1)?;
            let rep = verify_equivalence_theorem(&inst, &ctx.cfg.solver)?;
            tvs.push(rep.tv_distance);
        }
        tvs.sort_by(f64::total_cmp);
        let median = 0.5 * (tvs[24] + tvs[25]);
        Ok(vec![row(self.id(), "median_tv", 0.05, median, median >= 0.05)])
    }
}

fn flatten_stack(net: &LayerStack) -> Vec<f64> {
    let mut v = Vec::new();
    for l in &net.layers {
        for r in &l.weights {
            v.extend_from_slice(r);
        }
        v.extend_from_slice(&l.biases);
    }
    for r in &net.head.lambda {
        v.extend_from_slice(r);
    }
    v.extend_from_slice(&net.head.bias);
    v
}

fn unflatten_stack(template: &LayerStack, v: &[f64]) -> LayerStack {
    let mut net = template.clone();
    let mut it = v.iter();
    for l in &mut net.layers {
        for r in &mut l.weights {
            for w in r {
                *w = *it.next().unwrap();
            }
        }
        for b in &mut l.biases {
            *b = *it.next().unwrap();
        }
    }
    for r in &mut net.head.lambda {
        for w in r {
            *w = *it.next().unwrap();
        }
    }
    for b in &mut net.head.bias {
        *b = *it.next().unwrap();
    }
    assert!(it.next().is_none());
    net
}

fn rel_err(num: f64, analytic: f64) -> f64 {
    (num - analytic).abs() / num.abs().max(analytic.abs()).max(1e-7)
}

struct GradientCheck;

impl SuiteCheck for GradientCheck {
    fn id(&self) -> &'static str {
        "04_gradient_check"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let h = 1e-5;
        let base = ctx.cfg.generator.seed;
        let mut softmax_err = 0.0f64;
        for p in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(base, 4000 + p));
            let (y_size, n_feat) = (3, 3);
            let rows: Vec<WeightedExample> = (0..12)
                .map(|_| WeightedExample {
                    features: (0..n_feat).map(|_| rng.gen::<f64>()).collect(),
                    label: rng.gen_range(0..y_size),
                    weight: rng.gen_range(0.1..1.0),
                })
                .collect();
            let params = SoftmaxParams {
                lambda: (0..y_size)
                    .map(|_| (0..n_feat).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
                bias: (0..y_size).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            };
            let (dl, db, _) = weighted_nll_gradient(&rows, y_size, 0.0, &params);
            let mut probe = |perturb: &dyn Fn(&mut SoftmaxParams, f64), analytic: f64| {
                let (mut plus, mut minus) = (params.clone(), params.clone());
                perturb(&mut plus, h);
                perturb(&mut minus, -h);
                let num = (weighted_nll(&rows, y_size, 0.0, &plus)
                    - weighted_nll(&rows, y_size, 0.0, &minus))
                    / (2.0 * h);
                softmax_err = softmax_err.max(rel_err(num, analytic));
            };
            for y in 0..y_size {
                for i in 0..n_feat {
                    probe(&|p: &mut SoftmaxParams, d: f64| p.lambda[y][i] += d, dl[y][i]);
                }
                probe(&|p: &mut SoftmaxParams, d: f64| p.bias[y] += d, db[y]);
            }
        }

        let mut rows_out =
            vec![row(self.id(), "softmax_max_rel_err", 1e-4, softmax_err, softmax_err <= 1e-4)];
        for (tag, beta) in [("stack_max_rel_err_beta0", 0.0), ("stack_max_rel_err_beta01", 0.1)] {
            let mut stack_err = 0.0f64;
            for p in 0..10u64 {
                let seed = cell_seed(base, 4100 + p);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut net = init_stack(3, &[3, 2], 2, seed);
                for b in net.layers.iter_mut().flat_map(|l| l.biases.iter_mut()) {
                    *b = rng.gen_range(-0.5..0.5);
                }
                let inputs: Vec<Vec<f64>> =
                    (0..8).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
                let labels: Vec<usize> = (0..8).map(|_| rng.gen_range(0..2)).collect();
                let data = SampleSet::new(inputs, labels, 2)?;
                let (g, _) = gradient(&net, &data, beta, None)?;
                let flat = flatten_stack(&net);
                let gflat = flatten_stack(&g);
                for (k, analytic) in gflat.iter().enumerate() {
                    let mut plus = flat.clone();
                    let mut minus = flat.clone();
                    plus[k] += h;
                    minus[k] -= h;
                    let num = (loss(&unflatten_stack(&net, &plus), &data, beta)?
                        - loss(&unflatten_stack(&net, &minus), &data, beta)?)
                        / (2.0 * h);
                    stack_err = stack_err.max(rel_err(num, *analytic));
                }
            }
            rows_out.push(row(self.id(), tag, 1e-4, stack_err, stack_err <= 1e-4));
        }
        Ok(rows_out)
    }
}

struct DataProcessing;

impl SuiteCheck for DataProcessing {
    fn id(&self) -> &'static str {
        "05_data_processing"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let mut violations = 0usize;
        for i in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(ctx.cfg.generator.seed, 5000 + i));
            let (nx, ny, nf) = (8, 3, 3);
            let joint = random_joint(&mut rng, nx, ny);
            let t: Vec<f64> = (0..nx * nf).map(|_| f64::from(rng.gen_bool(0.5))).collect();
            let features = FeatureMap::new(nx, nf, t)?;
            let triple = induce_triple(&joint, &features)?;
            let i_ty = mutual_information(&triple.marginalize_out(0)?)?;
            let i_xy = mutual_information(&joint)?;
            if i_ty > i_xy + 1e-9 {
                violations += 1;
            }
            for a in 0..nf {
                let i_tx = mutual_information(&induce_feature_input_pair(&joint, &features, a)?)?;
                for b in 0..nf {
                    if a == b {
                        continue;
                    }
                    let pair = induce_feature_pair_triple(&joint, &features, a, b)?;
                    let i_ab = mutual_information(&pair.marginalize_out(2)?)?;
                    if i_ab > i_tx + 1e-9 {
                        violations += 1;
                    }
                }
            }
        }
        let v = violations as f64;
        Ok(vec![row(self.id(), "violations", 0.0, v, violations == 0)])
    }
}

struct XorChain;

impl SuiteCheck for XorChain {
    fn id(&self) -> &'static str {
        "06_xor_chain"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let inst = generate_violating_instance(ctx.cfg.generator.seed, ViolationKind::ViolateC2)?;
        let rep = verify_inequality_chain(&inst)?;
        let cond_gap = (rep.max_i_titj_given_y - std::f64::consts::LN_2).abs();
        let claim = f64::from(rep.paper_claim_holds);
        Ok(vec![
            row(self.id(), "claim_holds", 0.0, claim, !rep.paper_claim_holds),
            row(self.id(), "cond_mi_ln2_gap", 1e-9, cond_gap, cond_gap <= 1e-9),
            row(self.id(), "marginal_mi", 1e-9, rep.max_i_titj, rep.max_i_titj <= 1e-9),
        ])
    }
}

struct NetReduction;

impl SuiteCheck for NetReduction {
    fn id(&self) -> &'static str {
        "07_net_reduction"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let base = ctx.cfg.generator.seed;
        let inst = generate_equiv_instance(cell_seed(base, 7000), 3, 3)?;
        let (data, xs) = sample_from_joint(&inst.joint, &inst.features, 2000, cell_seed(base, 7001));
        let tight = TrainConfig { grad_tol: 1e-8, max_iters: 500_000, ..ctx.cfg.solver.clone() };
        let (softmax, _) = train_feature_softmax(&data, &tight)?;
        let stack = LayerStack {
            widths: vec![3],
            layers: Vec::new(),
            head: SoftmaxParams::zeros(3, 3),
        };
        let net_cfg = NetTrainConfig {
            base: tight,
            beta: 0.0,
            mode: TrainMode::Backprop,
            ..Default::default()
        };
        let run = train_backprop(&stack, &data, &net_cfg)?;
        let mut seen: Vec<usize> = xs;
        seen.sort_unstable();
        seen.dedup();
        let mut max_tv = 0.0f64;
        // Compare only on inputs present in the sample; the shared
        // empirical objective pins predictions only on its support.
        for x in seen {
            let t = inst.features.row(x);
            let p1 = softmax_predict(&softmax, &t);
            let (_, p2) = forward(&run.stack, &t)?;
            max_tv = max_tv.max(tv(&p1, &p2));
        }
        Ok(vec![row(self.id(), "max_tv", 1e-4, max_tv, max_tv <= 1e-4)])
    }
}

struct XorModes;

impl SuiteCheck for XorModes {
    fn id(&self) -> &'static str {
        "08_xor_modes"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let data = xor_dataset();
        let base_train = TrainConfig {
            learning_rate: 0.5,
            max_iters: 20_000,
            grad_tol: 1e-8,
            ..Default::default()
        };
        let mut within = 0usize;
        let mut low_err = 0usize;
        for s in 0..10u64 {
            let net = init_stack(2, &[2, 2], 2, cell_seed(ctx.cfg.generator.seed, 8000 + s));
            let bp_cfg = NetTrainConfig {
                base: base_train.clone(),
                mode: TrainMode::Backprop,
                ..Default::default()
            };
            let bp = train_backprop(&net, &data, &bp_cfg)?;
            let (lb, _, _, err) = loss_components(&bp.stack, &data, 0.0)?;
            let co_cfg = NetTrainConfig {
                base: base_train.clone(),
                mode: TrainMode::Coordinate,
                sweeps: 400,
                inner_iters: 25,
                ..Default::default()
            };
            let co = train_coordinate(&net, &data, &co_cfg)?;
            let lc = loss(&co.stack, &data, 0.0)?;
            // The 10% ratio is ill conditioned once both optimizers sit
            // at machine-scale loss (the task optimum is 0), so grant an
            // absolute resolution floor of 1e-5 nats.
            if lc <= 1.1 * lb + 1e-5 {
                within += 1;
            }
            if err < 0.05 {
                low_err += 1;
            }
        }
        Ok(vec![
            row(self.id(), "backprop_low_error_seeds", 8.0, low_err as f64, low_err >= 8),
            row(self.id(), "coordinate_within_10pct_seeds", 8.0, within as f64, within >= 8),
        ])
    }
}

struct IbCorollary;

impl SuiteCheck for IbCorollary {
    fn id(&self) -> &'static str {
        "09_ib_corollary"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let mut max_gap = 0.0f64;
        for i in 0..100u64 {
            let seed = cell_seed(ctx.cfg.generator.seed, 9000 + i);
            let inst = generate_equiv_instance(seed, 1 + (i as usize % 6), 2 + (i as usize % 3))?;
            max_gap = max_gap.max(verify_ib_corollary(&inst)?.gap);
        }
        Ok(vec![row(self.id(), "max_gap", 1e-9, max_gap, max_gap <= 1e-9)])
    }
}

/// Seeded 12-bit task for the information-plane run: the label is the
/// majority vote of the first three bits.
fn majority_dataset(n: usize, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let bits: Vec<f64> = (0..12).map(|_| f64::from(rng.gen_bool(0.5))).collect();
        let vote = bits[0] + bits[1] + bits[2];
        labels.push(usize::from(vote >= 2.0));
        inputs.push(bits);
    }
    SampleSet::new(inputs, labels, 2).expect("nonempty by construction")
}

struct InfoPlanePipeline;

impl SuiteCheck for InfoPlanePipeline {
    fn id(&self) -> &'static str {
        "10_info_plane"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let seed = cell_seed(ctx.cfg.generator.seed, 10_000);
        let data = majority_dataset(ctx.cfg.estimator.n_samples, seed);
        let net = init_stack(12, &[8, 4], 2, seed);
        let iters = 5000;
        let cfg = NetTrainConfig {
            base: TrainConfig {
                learning_rate: 0.5,
                max_iters: iters,
                grad_tol: 1e-8,
                ..Default::default()
            },
            mode: TrainMode::Backprop,
            snapshot_epochs: default_schedule(iters),
            ..Default::default()
        };
        let run = train_backprop(&net, &data, &cfg)?;
        let traj = track(&run.snapshots, &data, ctx.cfg.estimator.bins, seed)?;
        std::fs::write(ctx.out_dir.join("infoplane.csv"), traj.to_csv())?;
        std::fs::write(ctx.out_dir.join("infoplane.svg"), render_plane_svg(&traj)?)?;

        let (_, _, _, err) = loss_components(&run.stack, &data, 0.0)?;
        let mut counts = vec![0.0; 2];
        for &l in &data.labels {
            counts[l] += 1.0 / data.n() as f64;
        }
        let h_y = entropy(&counts)?;
        let bound_excess = traj
            .points
            .iter()
            .map(|p| p.i_ty - std::f64::consts::LN_2)
            .fold(f64::NEG_INFINITY, f64::max);
        let last_epoch = traj.points.iter().map(|p| p.epoch).max().unwrap_or(0);
        let top_i_ty = traj
            .points
            .iter()
            .filter(|p| p.epoch == last_epoch && p.layer == 2)
            .map(|p| p.i_ty)
            .next()
            .unwrap_or(0.0);
        let deficit = h_y - top_i_ty;
        Ok(vec![
            row(self.id(), "i_ty_bound_excess", 1e-9, bound_excess, bound_excess <= 1e-9),
            row(self.id(), "top_layer_i_ty_deficit", 0.15, deficit, deficit <= 0.15),
            row(self.id(), "train_error", 0.05, err, err < 0.05),
        ])
    }
}

struct Determinism;

impl SuiteCheck for Determinism {
    fn id(&self) -> &'static str {
        "11_determinism"
    }

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<SuiteRow>> {
        let render = || -> Result<(String, String, String)> {
            let seed = cell_seed(ctx.cfg.generator.seed, 11_000);
            let inst = generate_equiv_instance(seed, 3, 3)?;
            let rep = verify_equivalence_theorem(&inst, &ctx.cfg.solver)?;
            let csv = format!("{}\n{}\n", EquivalenceReport::CSV_HEADER, rep.csv_row());
            let json = serde_json::to_string_pretty(&inst)?;
            let data = majority_dataset(500, seed);
            let cfg = NetTrainConfig {
                base: TrainConfig { max_iters: 50, ..Default::default() },
                mode: TrainMode::Backprop,
                snapshot_epochs: vec![0, 25, 50],
                ..Default::default()
            };
            let run = train_backprop(&init_stack(12, &[4], 2, seed), &data, &cfg)?;
            let traj = track(&run.snapshots, &data, ctx.cfg.estimator.bins, seed)?;
            Ok((csv, json, render_plane_svg(&traj)?))
        };
        let a = render()?;
        let b = render()?;
        let mismatches =
            usize::from(a.0 != b.0) + usize::from(a.1 != b.1) + usize::from(a.2 != b.2);
        let v = mismatches as f64;
        Ok(vec![row(self.id(), "mismatched_artifacts", 0.0, v, mismatches == 0)])
    }
}

fn checks() -> &'static [Box<dyn SuiteCheck>] {
    static REGISTRY: OnceLock<Vec<Box<dyn SuiteCheck>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            Box::new(MeOracle),
            Box::new(TheoremPositive),
            Box::new(NegativeControl),
            Box::new(GradientCheck),
            Box::new(DataProcessing),
            Box::new(XorChain),
            Box::new(NetReduction),
            Box::new(XorModes),
            Box::new(IbCorollary),
            Box::new(InfoPlanePipeline),
            Box::new(Determinism),
        ]
    })
}

pub fn check_ids() -> Vec<&'static str> {
    checks().iter().map(|c| c.id()).collect()
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub rows: Vec<SuiteRow>,
    pub all_pass: bool,
    pub record: RunRecord,
}

pub fn suite_csv(rows: &[SuiteRow]) -> String {
    let mut out = String::from(SUITE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Run every registered check and write `suite.csv` / `suite.json`
/// (plus per-check artifacts) under `out_dir`. The returned record
/// carries wall time and is intentionally not written to disk, so the
/// emitted artifacts are a pure function of the config.
pub fn run_suite(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    opts: SuiteOptions,
) -> Result<SuiteOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let ctx = SuiteContext { cfg, opts, out_dir };
    let mut rows = Vec::new();
    for check in checks() {
        rows.extend(check.run(&ctx)?);
    }
    rows.sort_by(|a, b| (&a.check_id, &a.metric).cmp(&(&b.check_id, &b.metric)));

    let csv_path = out_dir.join("suite.csv");
    let json_path = out_dir.join("suite.json");
    std::fs::write(&csv_path, suite_csv(&rows))?;
    std::fs::write(&json_path, serde_json::to_string_pretty(&rows)?)?;

    let passed = rows.iter().filter(|r| r.pass).count();
    let all_pass = passed == rows.len();
    let mut summary = std::collections::BTreeMap::new();
    summary.insert("rows_passed".to_string(), passed as f64);
    summary.insert("rows_total".to_string(), rows.len() as f64);
    let outputs: Vec<String> = ["suite.csv", "suite.json", "infoplane.csv", "infoplane.svg"]
        .iter()
        .map(|f| out_dir.join(f).display().to_string())
        .collect();
    let record = RunRecord {
        command: "suite".into(),
        config_hash: hash_of(cfg)?,
        seed: cfg.generator.seed,
        wall_ms: start.elapsed().as_millis(),
        outputs,
        summary,
    };
    Ok(SuiteOutcome { rows, all_pass, record })
}

pub fn outcome_path(out_dir: &Path, file: &str) -> PathBuf {
    out_dir.join(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_all_checks_in_order() {
        let ids = check_ids();
        assert_eq!(ids.len(), 11);
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn csv_header_matches_row_shape() {
        let r = row("00_x", "m", 1.0, 0.5, true);
        assert_eq!(SUITE_CSV_HEADER.split(',').count(), r.csv_row().split(',').count());
    }

    #[test]
    fn sample_from_joint_matches_marginals_roughly() {
        let joint = JointTable::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let f = FeatureMap::new(2, 1, vec![0.0, 1.0]).unwrap();
        let (data, xs) = sample_from_joint(&joint, &f, 20_000, 3);
        let frac_x1 = xs.iter().filter(|&&x| x == 1).count() as f64 / 20_000.0;
        assert!((frac_x1 - 0.5).abs() < 0.02);
        let frac_y1 = data.labels.iter().filter(|&&y| y == 1).count() as f64 / 20_000.0;
        assert!((frac_y1 - 0.5).abs() < 0.02);
    }

    #[test]
    fn fast_checks_pass_with_default_config() {
        let cfg = ExperimentConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let ctx =
            SuiteContext { cfg: &cfg, opts: SuiteOptions::default(), out_dir: dir.path() };
        for check in [&XorChain as &dyn SuiteCheck, &Determinism] {
            for r in check.run(&ctx).unwrap() {
                assert!(r.pass, "{} {} = {}", r.check_id, r.metric, r.value);
            }
        }
    }

    #[test]
    fn theorem_check_is_falsifiable_by_zero_tolerance() {
        let cfg = ExperimentConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let ctx = SuiteContext {
            cfg: &cfg,
            opts: SuiteOptions { theorem_tv_tol: 0.0 },
            out_dir: dir.path(),
        };
        let rows = TheoremPositive.run(&ctx).unwrap();
        let tv_row = rows.iter().find(|r| r.metric == "max_tv").unwrap();
        assert_eq!(tv_row.check_id, "02_theorem_positive");
        assert!(!tv_row.pass, "optimizer residual is never exactly zero");
    }

    #[test]
    fn flatten_round_trips() {
        let net = init_stack(3, &[4, 2], 3, 5);
        let flat = flatten_stack(&net);
        assert_eq!(unflatten_stack(&net, &flat), net);
    }
}
