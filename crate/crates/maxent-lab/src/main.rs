//! Command-line front end. Every subcommand is deterministic given
//! (config, seed) and writes only under the chosen output directory.
//! Exit codes: 0 ok, 1 validation error, 2 numerical non-convergence,
//! 3 I/O error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use maxent_lab::config::{hash_of, load_config, ExperimentConfig, RunRecord};
use maxent_lab::discrete_prob::JointTable;
use maxent_lab::equivalence_lab::{verify_equivalence_theorem, EquivalenceReport};
use maxent_lab::info_plane::{default_schedule, emit_plane_svg, track, verify_ib_corollary};
use maxent_lab::maxent_core::solve_original_me;
use maxent_lab::recursive_net::{init_stack, xor_dataset, TrainMode};
use maxent_lab::registry::{lookup_generator, lookup_trainer, GenParams};
use maxent_lab::suite::{run_suite, SuiteOptions};
use maxent_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "maxent-lab", version, disable_help_subcommand = true)]
/// Discrete maximum-entropy laboratory: exact instances, softmax and
/// layer-stack training, equivalence checks and information-plane
/// tracking.
struct Cli {
    /// Output directory; the MAXENT_LAB_OUT environment variable takes
    /// precedence over this flag.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Optional JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance (joint table + feature map) as JSON.
    Gen {
        /// Generator name from the registry.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of binary features.
        #[arg(long)]
        n: Option<usize>,
        /// Label alphabet size.
        #[arg(long)]
        y: Option<usize>,
    },
    /// Solve the original maximum-entropy problem on a joint table.
    SolveMe {
        /// JSON file holding a rank-2 joint table.
        #[arg(long)]
        joint: PathBuf,
    },
    /// Train a layer stack on the built-in XOR task and emit the
    /// initial stack, trained stack and trace.
    Train {
        /// Trainer name from the registry (backprop | coordinate).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Hidden layer widths, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        widths: Vec<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        sweeps: Option<usize>,
        #[arg(long)]
        inner_iters: Option<usize>,
    },
    /// Generate an instance, run the equivalence check and the
    /// sufficiency gap, and emit the report CSV.
    Verify {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        y: Option<usize>,
    },
    /// Train on XOR while tracking the information plane; emit the
    /// trajectory CSV and SVG.
    Infoplane {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        widths: Vec<usize>,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Run the full acceptance battery and emit the pass/fail table.
    Suite,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{e}");
            return 1;
        }
        Err(e) => {
            // Help and version requests land here.
            print!("{e}");
            return 0;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence { .. } => 2,
                Error::Io(_) => 3,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let out_dir = match std::env::var_os("MAXENT_LAB_OUT") {
        Some(dir) => PathBuf::from(dir),
        None => cli.out.clone(),
    };
    std::fs::create_dir_all(&out_dir)?;
    let start = Instant::now();
    let mut outputs: Vec<PathBuf> = Vec::new();
    let mut summary = BTreeMap::new();
    let command;

    match cli.cmd {
        Cmd::Gen { kind, seed, n, y } => {
            command = "gen";
            let kind = kind.unwrap_or_else(|| cfg.generator.kind.clone());
            let seed = seed.unwrap_or(cfg.generator.seed);
            let params = GenParams {
                n_features: n.unwrap_or(cfg.generator.n_features),
                y_size: y.unwrap_or(cfg.generator.y_size),
            };
            let inst = lookup_generator(&kind)?.generate(seed, &params)?;
            let path = out_dir.join("instance.json");
            std::fs::write(&path, serde_json::to_string_pretty(&inst)?)?;
            outputs.push(path);
            summary.insert("x_size".into(), inst.x_size() as f64);
            summary.insert("y_size".into(), inst.y_size() as f64);
        }
        Cmd::SolveMe { joint } => {
            command = "solve-me";
            let raw: JointTable = serde_json::from_str(&std::fs::read_to_string(&joint)?)?;
            // Re-run construction so hand-written files are validated.
            let table = JointTable::new(raw.dims().to_vec(), raw.probs().to_vec())?;
            let (params, conditional) = solve_original_me(&table, &cfg.solver)?;
            let path = out_dir.join("me_solution.json");
            let doc = serde_json::json!({ "omega": params.omega, "conditional": conditional });
            std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
            outputs.push(path);
        }
        Cmd::Train { mode, seed, widths, beta, iters, sweeps, inner_iters } => {
            command = "train";
            let mut net_cfg = cfg.net.clone();
            if let Some(b) = beta {
                net_cfg.beta = b;
            }
            if let Some(i) = iters {
                net_cfg.base.max_iters = i;
            }
            if let Some(s) = sweeps {
                net_cfg.sweeps = s;
            }
            if let Some(i) = inner_iters {
                net_cfg.inner_iters = i;
            }
            let mode = mode.unwrap_or_else(|| match net_cfg.mode {
                TrainMode::Backprop => "backprop".into(),
                TrainMode::Coordinate => "coordinate".into(),
            });
            net_cfg.mode = match mode.as_str() {
                "backprop" => TrainMode::Backprop,
                "coordinate" => TrainMode::Coordinate,
                _ => net_cfg.mode,
            };
            net_cfg.validate()?;
            let data = xor_dataset();
            let seed = seed.unwrap_or(cfg.generator.seed);
            let net = init_stack(data.dim(), &widths, data.y_size, seed);
            let run = lookup_trainer(&mode)?.train(&net, &data, &net_cfg)?;
            for (name, text) in [
                ("train_init.json", serde_json::to_string_pretty(&net)?),
                ("train_stack.json", serde_json::to_string_pretty(&run.stack)?),
                ("train_trace.csv", run.trace.to_csv()),
            ] {
                let path = out_dir.join(name);
                std::fs::write(&path, text)?;
                outputs.push(path);
            }
            if let Some(last) = run.trace.rows.last() {
                summary.insert("final_loss".into(), last.loss);
                summary.insert("final_train_error".into(), last.train_error);
            }
        }
        Cmd::Verify { kind, seed, n, y } => {
            command = "verify";
            let kind = kind.unwrap_or_else(|| cfg.generator.kind.clone());
            let seed = seed.unwrap_or(cfg.generator.seed);
            let params = GenParams {
                n_features: n.unwrap_or(cfg.generator.n_features),
                y_size: y.unwrap_or(cfg.generator.y_size),
            };
            let inst = lookup_generator(&kind)?.generate(seed, &params)?;
            let rep = verify_equivalence_theorem(&inst, &cfg.solver)?;
            let ib = verify_ib_corollary(&inst)?;
            let csv_path = out_dir.join("equivalence.csv");
            std::fs::write(
                &csv_path,
                format!("{}\n{}\n", EquivalenceReport::CSV_HEADER, rep.csv_row()),
            )?;
            let ib_path = out_dir.join("ib_report.json");
            std::fs::write(&ib_path, serde_json::to_string_pretty(&ib)?)?;
            outputs.push(csv_path);
            outputs.push(ib_path);
            summary.insert("tv".into(), rep.tv_distance);
            summary.insert("ib_gap".into(), ib.gap);
            summary.insert("pass".into(), f64::from(rep.pass));
        }
        Cmd::Infoplane { seed, widths, iters } => {
            command = "infoplane";
            let data = xor_dataset();
            let seed = seed.unwrap_or(cfg.generator.seed);
            let iters = iters.unwrap_or(cfg.net.base.max_iters.min(2000));
            let mut net_cfg = cfg.net.clone();
            net_cfg.mode = TrainMode::Backprop;
            net_cfg.base.max_iters = iters;
            net_cfg.snapshot_epochs = default_schedule(iters);
            let net = init_stack(data.dim(), &widths, data.y_size, seed);
            let run = lookup_trainer("backprop")?.train(&net, &data, &net_cfg)?;
            let traj = track(&run.snapshots, &data, cfg.estimator.bins, seed)?;
            let csv_path = out_dir.join("infoplane.csv");
            std::fs::write(&csv_path, traj.to_csv())?;
            let svg_path = out_dir.join("infoplane.svg");
            emit_plane_svg(&traj, &svg_path)?;
            outputs.push(csv_path);
            outputs.push(svg_path);
            summary.insert("points".into(), traj.points.len() as f64);
        }
        Cmd::Suite => {
            let outcome = run_suite(&cfg, &out_dir, SuiteOptions::default())?;
            println!("{}", serde_json::to_string_pretty(&outcome.record)?);
            if !outcome.all_pass {
                let failing: Vec<&str> = outcome
                    .rows
                    .iter()
                    .filter(|r| !r.pass)
                    .map(|r| r.check_id.as_str())
                    .collect();
                return Err(Error::InvalidArgument(format!(
                    "acceptance checks failed: {}",
                    failing.join(", ")
                )));
            }
            return Ok(());
        }
    }

    let record = RunRecord {
        command: command.into(),
        config_hash: hash_of(&cfg)?,
        seed: cfg.generator.seed,
        wall_ms: start.elapsed().as_millis(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        summary,
    };
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}
