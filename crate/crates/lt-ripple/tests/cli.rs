//! Drives the compiled binary end to end: artifact shapes, headers, error
//! lines, and rerun stability.

use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lt-ripple"));
    cmd.env_remove("LT_RIPPLE_OUT_DIR").env_remove("LT_RIPPLE_WORKERS");
    cmd
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary spawns");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary spawns");
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    let lines: Vec<&str> = stderr.trim_end().lines().collect();
    assert_eq!(lines.len(), 1, "want a single error line, got {stderr:?}");
    assert!(lines[0].starts_with("error: "), "bad error line {stderr:?}");
    lines[0].to_string()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

/// Header comments carry the invocation (scheduling flags stripped), the
/// seed, and a body hash that must match the bytes that follow.
fn check_header(content: &str, seed: &str) {
    let mut lines = content.lines();
    let invocation = lines.next().unwrap();
    assert!(invocation.starts_with("# invocation: lt-ripple "), "{invocation}");
    assert!(!invocation.contains("--out"), "{invocation}");
    assert!(!invocation.contains("--workers"), "{invocation}");
    assert_eq!(lines.next().unwrap(), format!("# seed: {seed}"));
    assert!(lines.next().unwrap().starts_with("# config_sha256: "));
    let content_line = lines.next().unwrap();
    let body_at = content.find("# content_sha256: ").unwrap()
        + content_line.len()
        + 1;
    let digest = Sha256::digest(content[body_at..].as_bytes());
    let mut hex = String::new();
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    assert_eq!(content_line, format!("# content_sha256: {hex}"), "body hash mismatch");
}

#[test]
fn design_writes_distribution_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "design", "--k", "64", "--c1", "1.7", "--c2", "2.5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("n_expected"), "{stdout}");

    let json = read(dir.path(), "design_k64.json");
    let dist = lt_ripple::load_distribution(&json).unwrap();
    assert_eq!(dist.k(), 64);

    let meta = read(dir.path(), "design_k64.json.meta");
    assert!(meta.contains("\"invocation\": \"lt-ripple design --k 64"));
    assert!(!meta.contains("--out"));
    assert!(meta.contains("\"n_expected\""));

    // reruns of the same invocation produce the same bytes
    let dir2 = tempfile::tempdir().unwrap();
    run_ok(&[
        "design", "--k", "64", "--c1", "1.7", "--c2", "2.5",
        "--out", dir2.path().to_str().unwrap(),
    ]);
    assert_eq!(json, read(dir2.path(), "design_k64.json"));
    assert_eq!(meta, read(dir2.path(), "design_k64.json.meta"));
}

#[test]
fn analyze_tabulates_release_and_redundancy() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "analyze", "--k", "100", "--fig", "release", "--degrees", "1,2,5,10,20",
        "--seed", "11", "--out", dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "release_k100.csv");
    check_header(&csv, "11");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "degree,remaining,release_prob");
    assert_eq!(rows.len(), 1 + 5 * 100);

    run_ok(&[
        "analyze", "--k", "40", "--fig", "redundancy", "--degrees", "2,5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "redundancy_k40.csv");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "degree,ripple,redundancy");
    // degree d has admissible ripple sizes 1..=k-d+1
    assert_eq!(rows.len(), 1 + 39 + 36);
}

#[test]
fn simulate_reads_designed_file_sources() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "design", "--k", "96", "--c1", "1.7", "--c2", "2.5", "--name", "d96",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let dist_path = dir.path().join("d96.json");
    run_ok(&[
        "simulate", "--k", "96",
        "--source", &format!("file:{}", dist_path.display()),
        "--trials", "120", "--seed", "5", "--out", dir.path().to_str().unwrap(),
    ]);
    let summary = read(dir.path(), "simulate_k96_summary.csv");
    check_header(&summary, "5");
    assert!(summary.contains("avg_overhead,1."), "{summary}");
    let ber = read(dir.path(), "simulate_k96_ber.csv");
    let rows: Vec<&str> = ber.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + 51, "default grid is 0..=0.5 step 0.01");
    let ripple = read(dir.path(), "simulate_k96_ripple.csv");
    assert!(ripple.lines().filter(|l| !l.starts_with('#')).count() == 1 + 96);
}

#[test]
fn simulate_can_record_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "simulate", "--k", "64", "--source", "designed:1.7,2.5", "--trials", "80",
        "--trajectory", "auto", "--out", dir.path().to_str().unwrap(),
    ]);
    let traj = read(dir.path(), "simulate_k64_trajectory.csv");
    let rows: Vec<&str> = traj.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "remaining,mean_ripple,target,reached");
    assert_eq!(rows.len(), 1 + 65);
    // designed sources carry a target column
    assert!(rows[1].split(',').nth(2).unwrap().parse::<f64>().is_ok());
}

#[test]
fn sweep_accepts_family_axis_flags() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "sweep", "--k", "32", "--family", "rsd",
        "--c", "0.05:0.15:0.05", "--delta", "0.5,1",
        "--trials", "60", "--seed", "3", "--out", dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "sweep_k32_rsd.csv");
    check_header(&csv, "3");
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("c\\delta,0.5,1"), "{}", rows[0]);
    assert_eq!(rows.len(), 1 + 3, "three c values, one row each");
    for row in &rows[1..] {
        assert_eq!(row.split(',').count(), 3, "{row}");
    }

    let err = run_err(&["sweep", "--k", "32", "--family", "rsd", "--c", "0.05",
        "--out", dir.path().to_str().unwrap()]);
    assert!(err.contains("both axes"), "{err}");
}

#[test]
fn walk_emits_fit_columns() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "walk", "--k", "256", "--model", "biased", "--trials", "500",
        "--seed", "21", "--out", dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "walk_biased_k256.csv");
    check_header(&csv, "21");
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows[0], "remaining,rms_delta,fit");
    assert_eq!(rows.len(), 1 + 256);
    assert!(csv.contains("# fit: c1="), "fit parameters belong in the artifact");
}

#[test]
fn info_prints_distribution_stats() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "design", "--k", "64", "--c1", "1.7", "--c2", "2.5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let path = dir.path().join("design_k64.json");
    let out = run_ok(&["info", "--dist", path.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("k: 64"), "{stdout}");
    assert!(stdout.contains("mean degree:"), "{stdout}");

    let out = run_ok(&["info", "--dist", path.to_str().unwrap(), "--format", "csv"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("key,value\nk,64\n"), "{stdout}");
}

#[test]
fn missing_output_directory_is_a_validation_error() {
    let err = run_err(&["analyze", "--k", "100", "--fig", "release"]);
    assert!(err.starts_with("error: invalid-parameter:"), "{err}");
    assert!(err.contains("--out"), "{err}");
}

#[test]
fn bad_arguments_fail_on_one_line() {
    let err = run_err(&["frobnicate"]);
    assert!(err.starts_with("error: invalid-parameter:"), "{err}");
    let err = run_err(&["simulate", "--k", "64", "--source", "rsd:0.1", "--out", "/tmp"]);
    assert!(err.contains("two comma-separated numbers"), "{err}");
    let err = run_err(&["info", "--dist", "/no/such/file.json"]);
    assert!(err.starts_with("error: io-error:"), "{err}");
    // validation failures must not leave partial artifacts
    // (delta >= k drives the soliton scale negative)
    let dir = tempfile::tempdir().unwrap();
    run_err(&[
        "simulate", "--k", "64", "--source", "rsd:0.1,100",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn environment_variables_supply_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["analyze", "--k", "30", "--fig", "release", "--degrees", "2"])
        .env("LT_RIPPLE_OUT_DIR", dir.path())
        .env("LT_RIPPLE_WORKERS", "2")
        .output()
        .expect("binary spawns");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("release_k30.csv").exists());

    let out = bin()
        .args(["analyze", "--k", "30", "--fig", "release"])
        .env("LT_RIPPLE_WORKERS", "zero")
        .output()
        .expect("binary spawns");
    assert!(!out.status.success(), "bad worker env must fail");
}
