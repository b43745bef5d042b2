//! End-to-end checks of the binary: exit codes, artifact schemas and
//! determinism of emitted files.

use std::path::Path;
use std::process::{Command, Output};

use maxent_lab::discrete_prob::JointTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxent-lab"))
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    bin().env("MAXENT_LAB_OUT", out).args(args).output().expect("binary runs")
}

#[test]
fn unknown_flag_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gen", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_equiv_instance_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--seed", "7", "--n", "4", "--y", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("equivalence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "seed,n,y_size,i_xy_given_t,max_i_titj_given_y,tv,pass");
    let row = lines.next().unwrap();
    assert!(row.starts_with("7,4,3,"));
    assert!(row.ends_with(",true"));
}

#[test]
fn verify_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_in(dir.path(), &["verify", "--seed", "11", "--n", "3", "--y", "2"]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["equivalence.csv", "ib_report.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs between identical runs"
        );
    }
}

#[test]
fn train_coordinate_zero_inner_iters_is_noop() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["train", "--mode", "coordinate", "--inner-iters", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let init = std::fs::read(dir.path().join("train_init.json")).unwrap();
    let trained = std::fs::read(dir.path().join("train_stack.json")).unwrap();
    assert_eq!(init, trained);
}

#[test]
fn gen_emits_parseable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gen", "--kind", "violate_c2", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("instance.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["meta"]["generator"], "violate_c2");
}

#[test]
fn gen_unknown_kind_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gen", "--kind", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn solve_me_recovers_empirical_conditional() {
    let dir = tempfile::tempdir().unwrap();
    let joint = JointTable::from_rows(&[vec![0.3, 0.1], vec![0.2, 0.4]]).unwrap();
    let path = dir.path().join("joint.json");
    std::fs::write(&path, serde_json::to_string(&joint).unwrap()).unwrap();
    let out = run_in(dir.path(), &["solve-me", "--joint", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("me_solution.json")).unwrap())
            .unwrap();
    let c00 = doc["conditional"][0][0].as_f64().unwrap();
    assert!((c00 - 0.75).abs() < 1e-6, "P(y=0|x=0) should be 0.3/0.4, got {c00}");
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, r#"{"estimator": {"bins": 1}}"#).unwrap();
    let out = run_in(
        dir.path(),
        &["--config", cfg_path.to_str().unwrap(), "gen"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bins"));
}

#[test]
fn infoplane_emits_trajectory_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["infoplane", "--seed", "4", "--iters", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("infoplane.csv")).unwrap();
    assert!(csv.starts_with("epoch,layer,i_xt_nats,i_ty_nats,bins,n_samples,seed"));
    let svg = std::fs::read_to_string(dir.path().join("infoplane.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}
