//! End-to-end checks of the `besov-rto` binary and its file formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use besov_rto::runner::{read_csv, RunConfig, RunManifest};

fn besov_rto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov-rto"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn small_run(dir: &Path, extra: &[&str]) -> Output {
    seeded_run(dir, "7", extra)
}

fn seeded_run(dir: &Path, seed: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--problem",
        "deconvolution",
        "--n",
        "32",
        "--wavelet",
        "haar",
        "--s",
        "1.0",
        "--p",
        "1.5",
        "--lambda",
        "1.0",
        "--n-samples",
        "150",
        "--seed",
        seed,
        "--workers",
        "1",
        "--output-dir",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    besov_rto(&args)
}

#[test]
fn run_writes_a_self_describing_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = small_run(&dir, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let manifest = RunManifest::read(&dir).unwrap();
    assert!((manifest.derived.kappa - (1.0 + 0.5 - 2.0 / 3.0)).abs() < 1e-12);
    assert_eq!(manifest.derived.m, 32);
    assert_eq!(manifest.derived.j_max, 5);

    // samples_f.bin holds n_samples rows of n little-endian f64 values.
    let bytes = fs::metadata(dir.join("samples_f.bin")).unwrap().len();
    assert_eq!(bytes, 150 * 32 * 8);
    assert_eq!(manifest.samples_f.rows, 150);
    assert_eq!(manifest.samples_f.cols, 32);
    let samples = manifest.samples_f.read(&dir).unwrap();
    assert!(samples.iter().all(|v| v.is_finite()));

    for file in ["mean.csv", "ci_lower.csv", "ci_upper.csv", "truth.csv", "map.csv"] {
        let (header, rows) = read_csv(&dir.join(file)).unwrap();
        assert_eq!(header.len(), 3, "{file}");
        assert_eq!(rows.len(), 32, "{file}");
    }
    let (_, lower) = read_csv(&dir.join("ci_lower.csv")).unwrap();
    let (_, upper) = read_csv(&dir.join("ci_upper.csv")).unwrap();
    assert!(lower.iter().zip(&upper).all(|(l, u)| l[2] <= u[2]));

    // Probes at 0.2, 0.6, 0.75 of 32 points.
    let indices: Vec<usize> = manifest.probes.iter().map(|p| p.index).collect();
    assert_eq!(indices, vec![6, 19, 24]);
    for probe in &manifest.probes {
        let (header, rows) = read_csv(&dir.join(&probe.file)).unwrap();
        assert_eq!(header, vec!["lag", "acf"]);
        assert_eq!(rows[0], vec![0.0, 1.0]);
    }
}

#[test]
fn manifest_round_trips_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    let dir = tmp.path().join("run");
    fs::write(
        &config_path,
        format!(
            r#"{{"problem": "inpainting", "n": 64, "wavelet": "db8", "s": 1.2, "p": 1.5, "lambda": 0.025,
                "n_samples": 120, "seed": 3, "workers": 1, "output_dir": {:?}}}"#,
            dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = besov_rto(&["run", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let input = RunConfig::from_json_file(&config_path).unwrap();
    let manifest = RunManifest::read(&dir).unwrap();
    assert_eq!(manifest.config, input);
    // The echoed config written to disk parses back to the same value.
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let echoed: RunConfig = serde_json::from_value(value["config"].clone()).unwrap();
    assert_eq!(echoed, input);
}

#[test]
fn flags_override_the_json_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    fs::write(&config_path, r#"{"problem": "deconvolution", "n": 64, "seed": 1, "n_samples": 500}"#).unwrap();
    let dir = tmp.path().join("run");
    let out = besov_rto(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--n",
        "16",
        "--n-samples",
        "110",
        "--output-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = RunManifest::read(&dir).unwrap();
    assert_eq!(manifest.config.n, 16);
    assert_eq!(manifest.config.n_samples, 110);
    assert_eq!(manifest.config.seed, 1);
}

#[test]
fn identical_seeds_give_identical_sample_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(small_run(&a, &[]).status.success());
    assert!(small_run(&b, &[]).status.success());
    assert_eq!(
        fs::read(a.join("samples_f.bin")).unwrap(),
        fs::read(b.join("samples_f.bin")).unwrap()
    );
    let c = tmp.path().join("c");
    assert!(seeded_run(&c, "8", &[]).status.success());
    assert_ne!(
        fs::read(a.join("samples_f.bin")).unwrap(),
        fs::read(c.join("samples_f.bin")).unwrap()
    );
}

#[test]
fn diagnose_reproduces_the_stored_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    assert!(small_run(&dir, &[]).status.success());
    let out = besov_rto(&["diagnose", "--samples", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recomputed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("diagnostics.json")).unwrap()).unwrap();
    for key in ["n_samples", "mean", "ci_lower", "ci_upper", "ess", "acceptance_rate"] {
        assert_eq!(recomputed[key], stored[key], "{key}");
    }
}

#[test]
fn sweep_writes_a_square_difference_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sweep");
    let out = besov_rto(&[
        "sweep",
        "--problem",
        "deconvolution",
        "--n-samples",
        "120",
        "--workers",
        "1",
        "--output-dir",
        dir.to_str().unwrap(),
        "--sizes",
        "32,16",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.join("sweep_differences.csv")).unwrap();
    assert_eq!(header, vec!["n", "n16", "n32"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], 0.0);
    assert_eq!(rows[1][2], 0.0);
    assert_eq!(rows[0][2], rows[1][1]);
    assert!(rows[0][2] > 0.0);
    let (header, rows) = read_csv(&dir.join("sweep_means.csv")).unwrap();
    assert_eq!(header, vec!["index", "x", "n16", "n32"]);
    assert_eq!(rows.len(), 16);
    assert!(dir.join("n16/manifest.json").exists() && dir.join("n32/manifest.json").exists());
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    assert_eq!(small_run(&dir, &["--n", "48"]).status.code(), Some(2));
    assert_eq!(small_run(&dir, &["--p", "0"]).status.code(), Some(2));
    assert_eq!(besov_rto(&["run", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"problem": "deconvolution", "unknown_field": 1}"#).unwrap();
    assert_eq!(besov_rto(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(besov_rto(&["run", "--problem", "mri"]).status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn numerical_failures_exit_with_code_3_and_leave_no_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.json");
    let dir = tmp.path().join("run");
    fs::write(
        &config_path,
        format!(
            r#"{{"problem": "deconvolution", "n": 32, "n_samples": 100, "output_dir": {:?},
                "map": {{"grad_tol": 1e-300, "max_iter": 1}}}}"#,
            dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = besov_rto(&["run", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MAP"));
    assert!(!dir.exists());
}

#[test]
fn failed_writes_remove_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    // A directory where a CSV should go makes the run fail after the
    // sample files were written.
    fs::create_dir_all(dir.join("mean.csv")).unwrap();
    let out = small_run(&dir, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("samples_f.bin").exists());
    assert!(!dir.join("samples_h.bin").exists());
    assert!(!dir.join("diagnostics.json").exists());
    assert!(!dir.join("manifest.json").exists());
}
