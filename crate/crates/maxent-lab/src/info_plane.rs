//! Information-plane tracking: per-layer (I(X;T_l), I(T_l;Y)) samples
//! over training snapshots, plus the exact-table check that on
//! instances where the feature conditions hold, I(T;Y) = I(X;Y).
//!
//! Binned estimates are emitted and bound-checked but never asserted to
//! show a compression phase; only exact discrete instances carry hard
//! equalities.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discrete_prob::{
    binned_mi, binned_mi_labels, induce_triple, mutual_information, SampleSet,
};
use crate::equivalence_lab::Instance;
use crate::recursive_net::{forward, LayerStack};
use crate::Result;

/// One information-plane sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoPlanePoint {
    pub epoch: usize,
    /// 1-based layer index.
    pub layer: usize,
    pub i_xt: f64,
    pub i_ty: f64,
}

/// Estimator settings recorded alongside the points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorInfo {
    pub bins: usize,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<InfoPlanePoint>,
    pub estimator: EstimatorInfo,
}

impl Trajectory {
    pub const CSV_HEADER: &'static str = "epoch,layer,i_xt_nats,i_ty_nats,bins,n_samples,seed";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.epoch,
                p.layer,
                p.i_xt,
                p.i_ty,
                self.estimator.bins,
                self.estimator.n_samples,
                self.estimator.seed
            ));
        }
        out
    }
}

/// Default tracking schedule: 0, 1, 2, 5, 10, 20, 50, 100, ... capped
/// at `max_epoch` (inclusive).
pub fn default_schedule(max_epoch: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut decade = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let e = m * decade;
            if e > max_epoch {
                break 'outer;
            }
            out.push(e);
        }
        decade *= 10;
    }
    if *out.last().unwrap() != max_epoch {
        out.push(max_epoch);
    }
    out
}

/// Compute the information-plane trajectory over stack snapshots.
/// Inputs and activations are binned; the discrete labels are not.
pub fn track(
    snapshots: &[(usize, LayerStack)],
    data: &SampleSet,
    bins: usize,
    seed: u64,
) -> Result<Trajectory> {
    let mut points = Vec::new();
    for (epoch, stack) in snapshots {
        // Per-layer activation matrices for the whole sample set.
        let depth = stack.depth();
        let mut layer_acts: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(data.n()); depth];
        for x in &data.inputs {
            let (acts, _) = forward(stack, x)?;
            for (l, a) in acts.into_iter().enumerate() {
                layer_acts[l].push(a);
            }
        }
        for (l, acts) in layer_acts.iter().enumerate() {
            points.push(InfoPlanePoint {
                epoch: *epoch,
                layer: l + 1,
                i_xt: binned_mi(&data.inputs, acts, bins)?,
                i_ty: binned_mi_labels(acts, &data.labels, bins)?,
            });
        }
    }
    points.sort_by_key(|p| (p.epoch, p.layer));
    Ok(Trajectory { points, estimator: EstimatorInfo { bins, n_samples: data.n(), seed } })
}

/// Exact-table sufficiency report for one instance: how far I(T;Y) sits
/// from I(X;Y), plus the compression coordinate I(X;T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbReport {
    pub i_ty: f64,
    pub i_xy: f64,
    /// |I(T;Y) − I(X;Y)|; at most 1e-9 when condition 1 holds.
    pub gap: f64,
    pub i_xt: f64,
}

/// Verify the sufficiency side of the bottleneck claim on the exact
/// induced triple P(X, T, Y).
pub fn verify_ib_corollary(inst: &Instance) -> Result<IbReport> {
    let triple = induce_triple(&inst.joint, &inst.features)?;
    let i_ty = mutual_information(&triple.marginalize_out(0)?)?;
    let i_xt = mutual_information(&triple.marginalize_out(2)?)?;
    let i_xy = mutual_information(&inst.joint)?;
    Ok(IbReport { i_ty, i_xy, gap: (i_ty - i_xy).abs(), i_xt })
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 56.0;

fn color_ramp(frac: f64) -> String {
    // Blue (early epochs) to red (late epochs).
    let r = (255.0 * frac).round() as u8;
    let b = (255.0 * (1.0 - frac)).round() as u8;
    format!("#{r:02x}40{b:02x}")
}

/// Render a trajectory as a self-contained SVG: x-axis I(X;T), y-axis
/// I(T;Y), one polyline per layer, marker color encoding the epoch.
/// Output bytes are a pure function of the trajectory.
pub fn emit_plane_svg(traj: &Trajectory, path: &Path) -> Result<()> {
    let svg = render_plane_svg(traj)?;
    std::fs::write(path, svg)?;
    Ok(())
}

pub fn render_plane_svg(traj: &Trajectory) -> Result<String> {
    if traj.points.is_empty() {
        return Err(crate::Error::EmptySample);
    }
    let (mut x_max, mut y_max) = (0.0f64, 0.0f64);
    for p in &traj.points {
        x_max = x_max.max(p.i_xt);
        y_max = y_max.max(p.i_ty);
    }
    x_max = x_max.max(1e-9);
    y_max = y_max.max(1e-9);
    let sx = |v: f64| MARGIN + (SVG_W - 2.0 * MARGIN) * v / x_max;
    let sy = |v: f64| SVG_H - MARGIN - (SVG_H - 2.0 * MARGIN) * v / y_max;

    let mut epochs: Vec<usize> = traj.points.iter().map(|p| p.epoch).collect();
    epochs.sort_unstable();
    epochs.dedup();
    let mut layers: Vec<usize> = traj.points.iter().map(|p| p.layer).collect();
    layers.sort_unstable();
    layers.dedup();

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n  <line x1=\"{m}\" \
         y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n  <line x1=\"{m}\" y1=\"{m}\" \
         x2=\"{m}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        m = MARGIN,
        y0 = SVG_H - MARGIN,
        x1 = SVG_W - MARGIN,
    ));
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">I(X;T) \
         [nats]</text>\n",
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0
    ));
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 {:.2} {:.2})\">I(T;Y) [nats]</text>\n",
        MARGIN / 3.0,
        SVG_H / 2.0,
        MARGIN / 3.0,
        SVG_H / 2.0
    ));
    // One polyline per layer, vertices ordered by epoch.
    for &layer in &layers {
        let mut pts: Vec<&InfoPlanePoint> =
            traj.points.iter().filter(|p| p.layer == layer).collect();
        pts.sort_by_key(|p| p.epoch);
        let path: Vec<String> =
            pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.i_xt), sy(p.i_ty))).collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" points=\"{}\"/>\n",
            path.join(" ")
        ));
    }
    // Epoch-colored markers.
    let denom = (epochs.len().max(2) - 1) as f64;
    for p in &traj.points {
        let rank = epochs.iter().position(|&e| e == p.epoch).unwrap();
        out.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
            sx(p.i_xt),
            sy(p.i_ty),
            color_ramp(rank as f64 / denom)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete_prob::{entropy, FeatureMap};
    use crate::equivalence_lab::{generate_equiv_instance, ConditionStatus, InstanceMeta};
    use crate::recursive_net::init_stack;

    fn toy_data(n: usize, seed: u64) -> SampleSet {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<Vec<f64>> =
            (0..n).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let labels: Vec<usize> = inputs.iter().map(|x| usize::from(x[0] > 0.5)).collect();
        SampleSet::new(inputs, labels, 2).unwrap()
    }

    #[test]
    fn track_is_deterministic() {
        let data = toy_data(200, 1);
        let snaps = vec![(0usize, init_stack(3, &[4, 2], 2, 7)), (5, init_stack(3, &[4, 2], 2, 8))];
        let a = track(&snaps, &data, 10, 0).unwrap();
        let b = track(&snaps, &data, 10, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn track_i_ty_bounded_by_label_entropy() {
        let data = toy_data(300, 2);
        let mut py = vec![0.0; 2];
        for &l in &data.labels {
            py[l] += 1.0 / 300.0;
        }
        let hy = entropy(&py).unwrap();
        let snaps = vec![(0usize, init_stack(3, &[4], 2, 3))];
        let traj = track(&snaps, &data, 30, 0).unwrap();
        for p in &traj.points {
            assert!(p.i_ty <= hy + 1e-9);
        }
    }

    #[test]
    fn track_zero_net_gives_zero_information() {
        // All activations constant 0.5: T carries nothing.
        let data = toy_data(100, 3);
        let mut stack = init_stack(3, &[4], 2, 0);
        stack.layers[0].weights.iter_mut().flatten().for_each(|v| *v = 0.0);
        let traj = track(&[(0, stack)], &data, 30, 0).unwrap();
        for p in &traj.points {
            assert_eq!(p.i_xt, 0.0);
            assert_eq!(p.i_ty, 0.0);
        }
    }

    #[test]
    fn estimator_consistency_identity_map() {
        // Identity map on a 1-D input: binned i_xt equals the entropy
        // of the binned input distribution, computed here from raw bin
        // counts as an independent oracle.
        let data = toy_data(500, 4);
        let bins = 12;
        let one_d: Vec<Vec<f64>> = data.inputs.iter().map(|r| vec![r[0]]).collect();
        let mi = binned_mi(&one_d, &one_d, bins).unwrap();
        let mut counts = vec![0usize; bins];
        for r in &one_d {
            let s = r[0] * bins as f64;
            let b = if s <= 0.0 { 0 } else { (s.ceil() as usize - 1).min(bins - 1) };
            counts[b] += 1;
        }
        let h: f64 = counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / 500.0;
                -p * p.ln()
            })
            .sum();
        assert!((mi - h).abs() <= 1e-9);
    }

    #[test]
    fn ib_gap_small_on_equiv_instances() {
        for seed in 0..20 {
            let inst = generate_equiv_instance(seed, 2 + (seed as usize % 4), 2).unwrap();
            let rep = verify_ib_corollary(&inst).unwrap();
            assert!(rep.gap <= 1e-9, "gap {} at seed {seed}", rep.gap);
        }
    }

    #[test]
    fn ib_gap_large_for_constant_features() {
        let joint = crate::discrete_prob::JointTable::from_rows(&[
            vec![0.4, 0.1],
            vec![0.1, 0.4],
        ])
        .unwrap();
        let i_xy = mutual_information(&joint).unwrap();
        let inst = Instance {
            features: FeatureMap::new(2, 1, vec![1.0, 1.0]).unwrap(),
            joint,
            meta: InstanceMeta {
                generator: "test".into(),
                seed: 0,
                condition1: ConditionStatus::Violated,
                condition2: ConditionStatus::Satisfied,
            },
        };
        let rep = verify_ib_corollary(&inst).unwrap();
        assert!((rep.gap - i_xy).abs() < 1e-12);
        assert!(rep.gap > 0.0);
    }

    #[test]
    fn ib_identity_features() {
        // One-hot identity features: gap vanishes and I(X;T) = H(X).
        let joint = crate::discrete_prob::JointTable::from_rows(&[
            vec![0.4, 0.1],
            vec![0.1, 0.4],
        ])
        .unwrap();
        let hx = entropy(&joint.marginal(0)).unwrap();
        let inst = Instance {
            features: FeatureMap::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap(),
            joint,
            meta: InstanceMeta {
                generator: "test".into(),
                seed: 0,
                condition1: ConditionStatus::Satisfied,
                condition2: ConditionStatus::Violated,
            },
        };
        let rep = verify_ib_corollary(&inst).unwrap();
        assert!(rep.gap <= 1e-12);
        assert!((rep.i_xt - hx).abs() <= 1e-12);
    }

    #[test]
    fn svg_single_point_single_marker() {
        let traj = Trajectory {
            points: vec![InfoPlanePoint { epoch: 0, layer: 1, i_xt: 0.5, i_ty: 0.2 }],
            estimator: EstimatorInfo { bins: 30, n_samples: 10, seed: 0 },
        };
        let svg = render_plane_svg(&traj).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn svg_deterministic_bytes() {
        let traj = Trajectory {
            points: vec![
                InfoPlanePoint { epoch: 0, layer: 1, i_xt: 0.1, i_ty: 0.2 },
                InfoPlanePoint { epoch: 5, layer: 1, i_xt: 0.3, i_ty: 0.4 },
            ],
            estimator: EstimatorInfo { bins: 30, n_samples: 10, seed: 0 },
        };
        assert_eq!(render_plane_svg(&traj).unwrap(), render_plane_svg(&traj).unwrap());
    }

    #[test]
    fn svg_polyline_and_vertex_counts() {
        let mut points = Vec::new();
        for layer in 1..=3 {
            for (i, epoch) in [0usize, 1, 2, 5, 10].iter().enumerate() {
                points.push(InfoPlanePoint {
                    epoch: *epoch,
                    layer,
                    i_xt: 0.1 * (i + layer) as f64,
                    i_ty: 0.05 * (i + 1) as f64,
                });
            }
        }
        let traj = Trajectory {
            points,
            estimator: EstimatorInfo { bins: 30, n_samples: 10, seed: 0 },
        };
        let svg = render_plane_svg(&traj).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        for line in svg.lines().filter(|l| l.contains("<polyline")) {
            let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
            assert_eq!(pts.split(' ').count(), 5);
        }
        assert_eq!(svg.matches("<circle").count(), 15);
    }

    #[test]
    fn schedule_shape() {
        assert_eq!(default_schedule(100), vec![0, 1, 2, 5, 10, 20, 50, 100]);
        assert_eq!(default_schedule(7), vec![0, 1, 2, 5, 7]);
    }
}
