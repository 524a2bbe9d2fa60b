//! Exit-code, output and determinism contracts of the `hsenergy` binary.

use std::path::Path;
use std::process::{Command, Output};

fn hsenergy(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsenergy")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn converge_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsenergy(&["converge", "--scenario", "standing", "--grids", "128,256,512", "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r/report.json")).unwrap()).unwrap();
    let order = report["results"]["order"].as_f64().unwrap();
    assert!((1.9..=2.1).contains(&order));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["scenario_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("r/converge.csv").is_file());
}

#[test]
fn identical_runs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = hsenergy(&["verify", "--identities", "decomp", "--seed", "11", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a/report.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_config_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"experiment":"converge","scenario":{"name":"standing"},"grids":[64]}"#).unwrap();
    let o = hsenergy(&["run", "--config", "bad.json", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("out").exists());

    std::fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    assert_eq!(hsenergy(&["run", "--config", "junk.json", "--out", "out"], dir.path()).status.code(), Some(1));
    assert_eq!(hsenergy(&["converge", "--scenario", "no-such-scenario"], dir.path()).status.code(), Some(1));
    assert_eq!(hsenergy(&["converge", "--tol.not_a_tolerance=1"], dir.path()).status.code(), Some(1));
    assert_eq!(hsenergy(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn failing_check_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsenergy(&["converge", "--grids", "64,128,256", "--tol.solver_order_min=2.5", "--tol.solver_order_max=3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("solver_order"), "{}", stderr(&o));
}

#[test]
fn run_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"schema_version":1,"experiment":"tau-sweep","scenario":{"name":"zero","foliation":{"kind":"tau"}},"grids":[32],"tau_grid":4}"#,
    )
    .unwrap();
    let o = hsenergy(&["run", "--config", "cfg.json", "--out", "t"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("t/tau_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "tau,partial_energy,member_energy,horizontal_energy,conservation_deviation");
    for line in lines {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{line}");
    }
}

#[test]
fn foliation_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let falling = r#"{"kind":"sum","parts":[{"kind":"constant","value":1.0},{"kind":"scaled","factor":-1.0,"base":{"kind":"tau"}}]}"#;
    let o = hsenergy(&["tau-sweep", "--grids", "32", "--foliation", falling], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("foliation"));
}

#[test]
fn solve_then_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsenergy(&["solve", "--scenario", "standing", "--grids", "64", "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = hsenergy(&["energy", "--solve-dir", "s", "--surface", r#"{"kind":"constant","value":0.5}"#, "--out", "e"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("e/report.json")).unwrap()).unwrap();
    let e = report["results"]["report"]["e_surface"].as_f64().unwrap();
    let exact = std::f64::consts::PI.powi(2) / 2.0;
    assert!((e - exact).abs() / exact < 1e-2, "{e}");
}

#[test]
fn single_acceptance_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsenergy(&["acceptance", "--criterion", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
    assert_eq!(hsenergy(&["acceptance", "--criterion", "11"], dir.path()).status.code(), Some(1));
}
