//! End-to-end tests of the `fransim` binary: exit codes, file contracts,
//! determinism, and JSON summary content.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fransim"))
}

fn write_cfg(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("coincidence-scan"));
}

#[test]
fn missing_config_file_is_a_validation_failure() {
    let out = bin()
        .args(["chsh", "--config", "/definitely/not/here.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read config"));
}

#[test]
fn unknown_key_reports_key_and_line_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "zeta = 0\nzata = 1\n");
    let out_path = dir.path().join("x.csv");
    let out = bin()
        .args(["chsh", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(
        msg.contains("line 2") && msg.contains("zata"),
        "stderr: {msg}"
    );
    assert!(
        !out_path.exists(),
        "no output may be written on validation failure"
    );
}

#[test]
fn malformed_number_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "\nphi = three\n");
    let out = bin().args(["chsh", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn heterodyne_violation_fails_validation_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "delta_f = 1e8\nresolving_time = 2e-8\n");
    let out_path = dir.path().join("mc.csv");
    let out = bin()
        .args(["montecarlo", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_path)
        .args(["--trials", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_path.exists());
}

#[test]
fn unwritable_output_exits_one_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let out = bin()
        .args(["chsh", "--config"])
        .arg(&cfg)
        .args(["--output", "/nonexistent-dir/deep/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot write output"));
}

#[test]
fn degenerate_montecarlo_distribution_is_a_runtime_failure() {
    // Both of the first party's detectors dark in strict mode: the joint
    // click distribution has no mass, which only surfaces at run time.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "mode = strict\nzeta = pi/4\neta_p = 3pi/4\nphi = 0\n",
    );
    let out = bin()
        .args(["montecarlo", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(dir.path().join("mc.csv"))
        .args(["--trials", "1000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "");
    let out = bin()
        .args(["selftest", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("ok chsh_canonical"));
    assert!(text.contains("ok sampler_determinism"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn montecarlo_is_byte_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "trials = 20000\n");
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args(["montecarlo", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&path)
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        fs::read(&path).unwrap()
    };
    let a = run("a.csv", "11");
    let b = run("b.csv", "11");
    let c = run("c.csv", "12");
    assert_eq!(a, b, "same seed must give byte-identical output");
    assert_ne!(a, c, "different seed should move the estimates");
}

#[test]
fn chsh_json_summary_reports_the_quantum_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "grid_step = pi/16\n");
    let out = bin()
        .args(["chsh", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(dir.path().join("chsh.csv"))
        .args(["--format", "json-summary"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let s = json["s"].as_f64().unwrap();
    assert!((s - 2.8284271247461903).abs() < 1e-6, "S = {s}");
    assert_eq!(json["bell_violating"], serde_json::Value::Bool(true));
}

#[test]
fn flag_overrides_beat_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "mode = paper\ngrid_step = pi/16\n");
    let out = bin()
        .args(["chsh", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(dir.path().join("chsh.csv"))
        .args(["--mode", "strict", "--format", "json-summary"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["mode"], "strict");
    let s = json["s"].as_f64().unwrap();
    assert!(s <= 2.0 + 1e-6, "strict mode found S = {s}");
}

#[test]
fn local_fringe_writes_the_documented_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "zeta = pi/4\nscan.steps = 360\n");
    let path = dir.path().join("fringe.csv");
    let out = bin()
        .args(["local-fringe", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "phase_rad,I1,I2,I3,I4");
    assert_eq!(lines.len(), 361);
    // zeta = pi/4 gives detector 1 a full-visibility fringe: I1(0) = 0.
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert!(first[1].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn coincidence_scan_header_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "scan.steps = 16\n");
    let path = dir.path().join("scan.csv");
    let out = bin()
        .args(["coincidence-scan", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(
        "sweep_value_rad,overlay_value_rad,R14_norm,R23_norm,R13_norm,R24_norm,E_corr\n"
    ));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "scan.steps = 4\nzeta = pi/8\n");
    let path = dir.path().join("scan.csv");
    bin()
        .args(["coincidence-scan", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let cell = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    // Mantissa of the form d.dddddddddddddddd e exponent.
    let mantissa = cell.split('e').next().unwrap();
    let digits: usize = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 17, "cell {cell}");
    let parsed: f64 = cell.parse().unwrap();
    assert!(parsed.is_finite());
}
