//! End-to-end tests against the compiled binary: exit codes, report shape,
//! byte-level determinism, and digit cache behavior.

use std::path::Path;
use std::process::{Command, Output};

fn ndf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ndf"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    ndf()
        .args(args)
        .current_dir(dir)
        .env_remove("NDF_CACHE_DIR")
        .output()
        .expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be a json report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

#[test]
fn generate_reports_champernowne_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["generate", "--f", "1^1", "--mode", "integers", "--digits", "20"],
    );
    let v = stdout_json(&out);
    assert_eq!(v["results"]["preview"], "12345678910111213141");
    assert_eq!(v["results"]["l"], 20);
    assert_eq!(v["config"]["mode"], "integers");

    // envelope sections appear in a fixed order
    let raw = String::from_utf8(out.stdout.clone()).unwrap();
    let c = raw.find("\"config\"").unwrap();
    let r = raw.find("\"results\"").unwrap();
    let p = raw.find("\"provenance\"").unwrap();
    assert!(c < r && r < p);
}

#[test]
fn generate_writes_cache_with_magic_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["generate", "--digits", "100"]);
    let v = stdout_json(&out);
    let name = v["results"]["digit_file"].as_str().unwrap();
    let path = dir.path().join(name);
    let bytes = std::fs::read(&path).unwrap();
    // 8 byte magic, four u64 header words, then one byte per digit
    assert_eq!(bytes.len(), 8 + 32 + 100);
    assert_eq!(&bytes[..8], b"NDSTRM01");
}

#[test]
fn second_generate_run_hits_cache_and_matches_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_in(dir.path(), &["generate", "--digits", "500", "--threads", "1"]);
    let second = run_in(dir.path(), &["generate", "--digits", "500", "--threads", "1"]);
    assert!(String::from_utf8_lossy(&first.stderr).contains("cache written"));
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn env_cache_dir_overrides_flag() {
    let cwd = tempfile::tempdir().unwrap();
    let via_env = tempfile::tempdir().unwrap();
    let via_flag = tempfile::tempdir().unwrap();
    let out = ndf()
        .args(["generate", "--digits", "50", "--cache-dir"])
        .arg(via_flag.path())
        .current_dir(cwd.path())
        .env("NDF_CACHE_DIR", via_env.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let in_env = std::fs::read_dir(via_env.path()).unwrap().count();
    let in_flag = std::fs::read_dir(via_flag.path()).unwrap().count();
    assert_eq!((in_env, in_flag), (1, 0));
}

#[test]
fn analysis_reuses_generated_cache_without_changing_results() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_arg = cache.to_str().unwrap();
    let gen = run_in(
        dir.path(),
        &["generate", "--digits", "10000", "--cache-dir", cache_arg, "--threads", "1"],
    );
    assert_eq!(code(&gen), 0);

    let cold = run_in(
        dir.path(),
        &["discrepancy", "--decades", "3..4", "--threads", "1"],
    );
    let warm = run_in(
        dir.path(),
        &[
            "discrepancy",
            "--decades",
            "3..4",
            "--cache-dir",
            cache_arg,
            "--threads",
            "1",
        ],
    );
    assert!(String::from_utf8_lossy(&warm.stderr).contains("cache hit"));
    let cold_v = stdout_json(&cold);
    let warm_v = stdout_json(&warm);
    assert_eq!(cold_v["results"], warm_v["results"]);
}

#[test]
fn sequential_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["discrepancy", "--decades", "3..4", "--threads", "1"],
        vec!["digitsum", "--decades", "3..4", "--threads", "1"],
        vec![
            "expsum", "--upto", "1000", "--j", "1,2", "--nu", "1,2", "--threads", "1",
        ],
        vec!["check", "--threads", "1"],
    ] {
        let a = run_in(dir.path(), &args);
        let b = run_in(dir.path(), &args);
        assert_eq!(code(&a), 0, "args {args:?}");
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
    }
}

#[test]
fn csv_is_limited_to_tabular_commands() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run_in(dir.path(), &["generate", "--digits", "10", "--format", "csv"]);
    assert_eq!(code(&gen), 2);
    let check = run_in(dir.path(), &["check", "--format", "csv"]);
    assert_eq!(code(&check), 2);

    let disc = run_in(
        dir.path(),
        &["discrepancy", "--decades", "3..4", "--format", "csv", "--threads", "1"],
    );
    assert_eq!(code(&disc), 0);
    let text = String::from_utf8(disc.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("L,ell,digits_used,sup_deviation,argmax_pattern,r_log_l")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["generate", "--digits", "0"],
        vec!["generate", "--digits", "10", "--base", "1"],
        vec!["generate", "--digits", "10", "--base", "257"],
        vec!["discrepancy", "--decades", "3..4", "--ell", "13"],
        vec!["discrepancy", "--decades", "5..3"],
        vec!["digitsum", "--mode", "integers", "--decades", "3..4"],
        vec!["expsum", "--mode", "integers"],
        vec!["generate", "--digits", "10", "--f", "1^1+2^2"],
        vec!["generate", "--digits", "10", "--tol", "0.3"],
        vec!["check", "--H", "100"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(code(&out), 2, "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["generate", "--no-such-flag"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn uncertifiable_precision_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["generate", "--digits", "5", "--max-bits", "1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ambiguous"));
}

#[test]
fn injected_fault_exits_4_and_flags_one_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["check", "--inject-fault", "--threads", "1"]);
    assert_eq!(code(&out), 4);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["all_pass"], false);
    let failing: Vec<&str> = v["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["fourier_coefficient_bound"]);
}

#[test]
fn check_passes_clean_and_reports_every_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["check", "--threads", "1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["all_pass"], true);
    assert_eq!(v["results"]["checks"].as_array().unwrap().len(), 11);
    assert_eq!(v["provenance"]["sequential"], true);
}

#[test]
fn expsum_matches_frozen_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["expsum", "--upto", "100000", "--threads", "1", "--format", "csv"],
    );
    assert_eq!(code(&out), 0);
    let fresh = String::from_utf8(out.stdout).unwrap();
    let golden = include_str!("golden/expsum_1e5.csv");

    let fresh_rows: Vec<&str> = fresh.lines().collect();
    let golden_rows: Vec<&str> = golden.lines().collect();
    assert_eq!(fresh_rows.len(), golden_rows.len());
    assert_eq!(fresh_rows[0], golden_rows[0]);
    for (f, g) in fresh_rows.iter().zip(&golden_rows).skip(1) {
        let fc: Vec<&str> = f.split(',').collect();
        let gc: Vec<&str> = g.split(',').collect();
        // identity columns match exactly, float columns to a tolerance that
        // survives libm revisions
        assert_eq!(&fc[..4], &gc[..4]);
        assert_eq!(fc[9], gc[9]);
        for i in 4..9 {
            let a: f64 = fc[i].parse().unwrap();
            let b: f64 = gc[i].parse().unwrap();
            let scale = b.abs().max(1.0);
            assert!(
                (a - b).abs() <= 1e-6 * scale,
                "row {f} column {i} drifted from {b}"
            );
        }
    }
}

#[test]
fn output_flag_writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["generate", "--digits", "30", "--output", "report.json"],
    );
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["results"]["l"], 30);
}
