use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nanoqed(args: &[&str], dir: &Path, config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nanoqed"));
    cmd.args(args).arg("--out").arg(dir).arg("--threads").arg("1");
    if let Some(text) = config {
        let path = dir.with_extension("json");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().expect("binary runs")
}

fn body(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_cell_sweep_writes_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = r#"{"sweep": {"flux_points": 1, "probe_points": 1}}"#;
    let o = nanoqed(&["sweep"], &out, Some(cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = body(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("flux_Phi0,probe_freq_Hz,"));
    let meta = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(meta.starts_with("# nanoqed-version: "));
    let side = report(&out.join("sweep.json"));
    assert_eq!(side["report"]["cells_over_tolerance"], 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"linewidth": {"trials": 4}, "seed": 11,
                  "sweep": {"flux_points": 2, "probe_points": 2}}"#;
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for d in &dirs {
        for cmd in ["linewidth", "sweep", "estimate", "admittance", "transmon-spectrum"] {
            let o = nanoqed(&[cmd], d, Some(cfg));
            assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in names.iter().filter(|n| *n != "run.json") {
        let a = fs::read(dirs[0].join(name)).unwrap();
        let b = fs::read(dirs[1].join(name)).unwrap();
        assert!(a == b, "{name:?} differs between runs");
    }
}

#[test]
fn bundled_linewidth_data_gives_paper_coupling() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("lw");
    let o = nanoqed(&["linewidth"], &out, None);
    assert!(o.status.success());
    let r = report(&out.join("linewidth.json"));
    let lambda = r["report"]["fit"]["lambda_over_h_Hz"].as_f64().unwrap();
    assert!((lambda / 1.3e6 - 1.0).abs() < 0.05, "{lambda}");
    let q = r["report"]["fit"]["quality_factor"].as_f64().unwrap();
    assert!((q / 150.0 - 1.0).abs() < 0.1, "{q}");
}

#[test]
fn resolved_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let cfg = r#"{"steady": {"flux": 0.31}, "device": {"t1_s": 12e-6}}"#;
    assert!(nanoqed(&["estimate"], &first, Some(cfg)).status.success());
    let resolved = fs::read_to_string(first.join("config.resolved.json")).unwrap();
    let second = tmp.path().join("second");
    assert!(nanoqed(&["estimate"], &second, Some(&resolved)).status.success());
    assert_eq!(
        fs::read(first.join("config.resolved.json")).unwrap(),
        fs::read(second.join("config.resolved.json")).unwrap()
    );
    let h1 = report(&first.join("estimate.json"))["metadata"]["config_sha256"].clone();
    let h2 = report(&second.join("estimate.json"))["metadata"]["config_sha256"].clone();
    assert_eq!(h1, h2);
}

#[test]
fn invalid_config_reports_field_and_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    let o = nanoqed(&["steady"], &out, Some(r#"{"device": {"charging_energy_hz": -1}}"#));
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("charging_energy"));
    assert!(out.join("error.json").exists());

    let o = nanoqed(&["steady"], &out, Some(r#"{"sweep": {"bogus": 1}}"#));
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("bogus"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("missing");
    let o = Command::new(env!("CARGO_BIN_EXE_nanoqed"))
        .args(["estimate", "--config"])
        .arg(tmp.path().join("nope.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}
