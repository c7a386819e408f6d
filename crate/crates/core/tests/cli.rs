use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jqf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jqf")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn decay_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    let o = jqf(&["decay", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "time_s,p1,p2,purity,p1_free");
    let table = rows(&csv);
    assert_eq!(table.len(), 2001);
    let last = &table[2000];
    let mantissa = last[1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 12);
    let p1: f64 = last[1].parse().unwrap();
    assert!((p1 - 0.99996).abs() < 1e-5);
}

#[test]
fn hz_and_angular_configs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let tau = std::f64::consts::TAU;
    let hz = write(
        dir.path(),
        "hz.json",
        r#"{"system": {"omega1": "5GHz", "omega2": "5.01GHz", "gamma1": "2kHz", "gamma2": "100MHz", "l2": "7mm"},
            "scenario": {"kind": "decay", "t_end": "50ns", "samples": 100}}"#,
    );
    let rad = write(
        dir.path(),
        "rad.json",
        &format!(
            r#"{{"system": {{"omega1": "{} rad/s", "omega2": "{} rad/s", "gamma1": "{} rad/s", "gamma2": "{} rad/s", "l2": "0.007m"}},
                "scenario": {{"kind": "decay", "t_end": "5e-8s", "samples": 100}}}}"#,
            tau * 5e9,
            tau * 5.01e9,
            tau * 2e3,
            tau * 100e6
        ),
    );
    let a = jqf(&["decay", "--config", &hz]);
    let b = jqf(&["decay", "--config", &rad]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn resolved_config_reproduces_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"system": {"l2": "0.4lambda"}, "scenario": {"kind": "pi-pulse", "t_end": "100ns", "samples": 50}}"#,
    );
    let first = jqf(&["pi-pulse", "--config", &cfg]);
    let json = jqf(&["pi-pulse", "--config", &cfg, "--format", "json"]);
    assert!(first.status.success() && json.status.success());
    let doc: Value = serde_json::from_slice(&json.stdout).unwrap();
    let resolved = write(dir.path(), "resolved.json", &doc["report"]["resolved"].to_string());
    let again = jqf(&["pi-pulse", "--config", &resolved, "--format", "csv"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(doc["report"]["scenario"], "pi-pulse");
    assert!(doc["table"]["rows"].as_array().unwrap().len() == 51);
}

#[test]
fn no_jqf_flag_gives_the_free_baseline() {
    let o = jqf(&["decay", "--no-jqf"]);
    assert!(o.status.success());
    for row in rows(&String::from_utf8(o.stdout).unwrap()) {
        assert_eq!(row[1], row[4]);
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", r#"{"scenario": {"kind": "detuning-sweep", "points": 9}}"#);
    let one = jqf(&["sweep", "--config", &cfg, "--jobs", "1"]);
    let four = jqf(&["sweep", "--config", &cfg, "--jobs", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let csv = String::from_utf8(one.stdout).unwrap();
    assert!(csv.starts_with("detuning_hz,rate_fitted,rate_formula\n"));

    let pos = jqf(&["sweep", "--kind", "position", "--jobs", "2"]);
    assert!(pos.status.success());
    assert!(String::from_utf8(pos.stdout).unwrap().starts_with("l2_over_lambda,p1,rate_formula\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.json", r#"{"system": {"gamma_1": "2kHz"}}"#);
    assert_eq!(jqf(&["decay", "--config", &unknown]).status.code(), Some(1));

    let bare = write(dir.path(), "b.json", r#"{"system": {"gamma1": 2000}}"#);
    let o = jqf(&["decay", "--config", &bare]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unit suffix"));

    let other = write(dir.path(), "o.json", r#"{"scenario": {"kind": "rabi"}}"#);
    assert_eq!(jqf(&["decay", "--config", &other]).status.code(), Some(1));
    assert_eq!(jqf(&["decay", "--config", "/nonexistent/cfg.json"]).status.code(), Some(1));

    let dark = write(dir.path(), "d.json", r#"{"system": {"gamma1": "0Hz"}, "scenario": {"kind": "pi-pulse"}}"#);
    let o = jqf(&["pi-pulse", "--config", &dark]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("driven-dynamics: "));
}

#[test]
fn regress_exit_code_matches_its_report() {
    let o = jqf(&["regress"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("criterion ")).count(), 9);
    let expect = if text.contains("[FAIL]") { 3 } else { 0 };
    assert_eq!(o.status.code(), Some(expect));
}
