use std::path::Path;
use std::process::{Command, Output};

use monad_hym::verify::SuiteReport;

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monad-hym"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn verify_adhm_reports_the_charge() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["verify", "adhm", "--seed", "7", "--out", "r"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r: SuiteReport = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r/adhm.json")).unwrap()).unwrap();
    let q = r.checks.iter().find(|c| c.name == "charge_unit").unwrap();
    assert!((q.measured - 1.0).abs() <= 0.02 && r.pass);
}

#[test]
fn verify_cone_passes_and_unknown_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["verify", "cone"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS cone.cone_mean_curvature"));
    assert_eq!(code(&cli(&["verify", "bogus"], dir.path())), 2);
    assert_eq!(code(&cli(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&cli(&["verify", "cone", "--tol", "oops"], dir.path())), 2);
    assert_eq!(code(&cli(&["verify", "cone", "--tol", "flat_control=10"], dir.path())), 1);
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        assert_eq!(code(&cli(&["verify", "growth", "--seed", "3", "--out", out], dir.path())), 0);
    }
    let read = |d: &str| std::fs::read(dir.path().join(d).join("growth.json")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn report_merges_and_rejects_corrupt_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&cli(&["verify", "growth", "--out", "r"], d)), 0);
    assert_eq!(code(&cli(&["verify", "cone", "--out", "r"], d)), 0);
    assert_eq!(code(&cli(&["report", "r/growth.json", "r/cone.json", "--out", "m"], d)), 0);
    let growth = std::fs::read_to_string(d.join("m/growth.csv")).unwrap();
    assert!(growth.starts_with("suite,section,d0,d_inf"));
    assert!(growth.lines().any(|l| l.starts_with("growth,t3,")));
    let checks = std::fs::read_to_string(d.join("m/checks.csv")).unwrap();
    assert!(checks.lines().any(|l| l.starts_with("cone,cone_mean_curvature,")));

    assert_eq!(code(&cli(&["report", "--out", "empty"], d)), 0);
    let empty = std::fs::read_to_string(d.join("empty/checks.csv")).unwrap();
    assert_eq!(empty.lines().count(), 1);

    std::fs::write(d.join("bad.json"), "{\"suite\": ").unwrap();
    assert_eq!(code(&cli(&["report", "bad.json"], d)), 2);
    assert_eq!(code(&cli(&["report", "missing.json"], d)), 2);
}

#[test]
fn flow_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&cli(&["flow", "missing.json"], d)), 2);
    std::fs::write(d.join("typo.json"), r#"{"step": 10}"#).unwrap();
    assert_eq!(code(&cli(&["flow", "typo.json"], d)), 2);
    std::fs::write(d.join("fast.json"), r#"{"resolution": 5, "dt": 0.01, "steps": 10, "g_samples": 50}"#).unwrap();
    let o = cli(&["flow", "fast.json"], d);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stability bound"));
}

#[test]
fn default_flow_halves_the_mean_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("default.json"), "{}").unwrap();
    let o = cli(&["flow", "default.json", "--out", "run"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("run/flow_report.json")).unwrap()).unwrap();
    assert_eq!(report["steps"], 2000);
    assert!(report["ratio"].as_f64().unwrap() <= 0.5);
    let history = std::fs::read_to_string(d.join("run/history.csv")).unwrap();
    assert!(history.starts_with("step,time,sup_mean_curvature,energy"));
    let (meta, h) = monad_hym::flow::read_checkpoint(&d.join("run/checkpoint.bin")).unwrap();
    assert_eq!((meta.step, h.len()), (2000, 7usize.pow(6)));
}
