//! End-to-end tests of the config-driven front end: parsing, report
//! emission, determinism, and the binary's exit behavior.

use std::process::Command;

use holderkit::cli::{parse_config, run, AnalysisOutcome, RegularityReport};
use tempfile::tempdir;

const FBM_FIT_CONFIG: &str = r#"
analyses = ["metric-fit"]
hurst_candidate = 0.7

[model]
kind = "fbm"
hurst = 0.7
"#;

#[test]
fn metric_fit_recovers_fbm_exponent() {
    let dir = tempdir().unwrap();
    let config = parse_config(FBM_FIT_CONFIG).unwrap();
    let report = run(&config, dir.path()).unwrap();
    assert_eq!(report.analyses.len(), 1);
    match &report.analyses[0].outcome {
        AnalysisOutcome::Fit { fit } => {
            assert!((fit.exponent - 0.7).abs() < 1e-6, "{}", fit.exponent);
        }
        other => panic!("expected a fit, got {other:?}"),
    }
}

#[test]
fn divergence_scan_on_modulated_model_grows() {
    let dir = tempdir().unwrap();
    let config = parse_config(
        "analyses = [\"divergence\"]\nhurst_candidate = 0.5\nepsilons = [0.05]\n\
         [model]\nkind = \"modulated-fbm\"\nhurst = 0.5\nt_max = 0.3\n",
    )
    .unwrap();
    let report = run(&config, dir.path()).unwrap();
    match &report.analyses[0].outcome {
        AnalysisOutcome::Divergence { scans } => {
            let zero = scans.iter().find(|s| s.epsilon == 0.0).unwrap();
            let first = zero.constants.first().unwrap();
            let last = zero.constants.last().unwrap();
            assert!(last > first, "eps=0 constants should grow: {zero:?}");
        }
        other => panic!("expected a divergence scan, got {other:?}"),
    }
}

#[test]
fn empty_analysis_list_yields_empty_report() {
    let dir = tempdir().unwrap();
    let config = parse_config("[model]\nkind = \"bm\"\n").unwrap();
    let report = run(&config, dir.path()).unwrap();
    assert!(report.analyses.is_empty());
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn report_round_trips_through_json() {
    let dir = tempdir().unwrap();
    let config = parse_config(
        "analyses = [\"metric-fit\", \"stationary-increment\"]\n[model]\nkind = \"bm\"\n",
    )
    .unwrap();
    let report = run(&config, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let parsed: RegularityReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, report);
}

#[test]
fn capability_error_is_recorded_and_run_continues() {
    let dir = tempdir().unwrap();
    // bm has no spectral measure; the spectral analysis must fail without
    // aborting the metric fit that follows.
    let config = parse_config(
        "analyses = [\"spectral\", \"metric-fit\"]\n[model]\nkind = \"bm\"\n",
    )
    .unwrap();
    let report = run(&config, dir.path()).unwrap();
    assert_eq!(report.analyses.len(), 2);
    assert!(matches!(
        report.analyses[0].outcome,
        AnalysisOutcome::Error { .. }
    ));
    assert!(matches!(report.analyses[1].outcome, AnalysisOutcome::Fit { .. }));
}

#[test]
fn simulate_writes_deterministic_paths_csv() {
    let config = parse_config(
        "analyses = [\"simulate\"]\nn_paths = 8\nseed = 3\n\
         [model]\nkind = \"fbm\"\nhurst = 0.6\n[grid]\nn = 128\n",
    )
    .unwrap();
    let d1 = tempdir().unwrap();
    let d2 = tempdir().unwrap();
    run(&config, d1.path()).unwrap();
    run(&config, d2.path()).unwrap();
    let a = std::fs::read(d1.path().join("paths.csv")).unwrap();
    let b = std::fs::read(d2.path().join("paths.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "paths.csv must be byte-identical across runs");
    let header = String::from_utf8_lossy(&a);
    assert!(header.starts_with("t,p0,p1,"));
}

#[test]
fn pathstats_writes_constants_csv() {
    let dir = tempdir().unwrap();
    let config = parse_config(
        "analyses = [\"pathstats\"]\nn_paths = 16\nhurst_candidate = 0.5\nepsilons = [0.2]\n\
         [model]\nkind = \"fbm\"\nhurst = 0.5\n[grid]\nn = 128\n",
    )
    .unwrap();
    let report = run(&config, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "path_index,C");
    assert_eq!(lines.count(), 16);
    match &report.analyses[0].outcome {
        AnalysisOutcome::Pathstats { order, max_constant, .. } => {
            assert!((order - 0.3).abs() < 1e-12);
            assert!(*max_constant > 0.0);
        }
        other => panic!("expected pathstats, got {other:?}"),
    }
}

const BIN: &str = env!("CARGO_BIN_EXE_holderkit");

#[test]
fn binary_analyze_succeeds_and_writes_report() {
    let dir = tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(&config_path, FBM_FIT_CONFIG).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(BIN)
        .args(["analyze"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("report.json").exists());
}

#[test]
fn binary_rejects_bad_config_with_nonzero_exit() {
    let dir = tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "[model]\nkind = \"fbm\"\nhurst = 0.5\nhorzon = 1.0\n").unwrap();
    let output = Command::new(BIN)
        .args(["analyze"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("horzon"), "stderr should name the key: {stderr}");
}

#[test]
fn binary_simulate_is_thread_count_invariant() {
    let dir = tempdir().unwrap();
    let config_path = dir.path().join("sim.toml");
    std::fs::write(
        &config_path,
        "n_paths = 8\nseed = 11\n[model]\nkind = \"fbm\"\nhurst = 0.4\n[grid]\nn = 64\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let status = Command::new(BIN)
            .args(["simulate"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(out.join("paths.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn binary_seed_override_changes_paths() {
    let dir = tempdir().unwrap();
    let config_path = dir.path().join("sim.toml");
    std::fs::write(
        &config_path,
        "n_paths = 4\nseed = 11\n[model]\nkind = \"bm\"\n[grid]\nn = 32\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for seed in ["11", "12"] {
        let out = dir.path().join(format!("out{seed}"));
        let status = Command::new(BIN)
            .args(["simulate"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out)
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(out.join("paths.csv")).unwrap());
    }
    assert_ne!(outputs[0], outputs[1]);
}
