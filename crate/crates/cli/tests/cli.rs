//! Command-line contract: flag handling, exit codes, and file outputs.
//! Heavier end-to-end behavior lives in the acceptance target.

use std::path::Path;
use std::process::{Command, Output};

use lumos_cli::{ExperimentConfig, Manifest};

fn lumos(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lumos"))
        .args(args)
        .arg("--out")
        .arg(out_dir)
        .env_remove("LUMOS_OUT")
        .output()
        .expect("run lumos")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"{
    "experiment_id": "cli-test",
    "workloads": ["fibonacci"],
    "groups": [1],
    "modes": ["native-process"],
    "repetitions": 2
}"#;

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"modes": ["docker"]}"#,
        r#"{"repetitions": 0}"#,
        r#"{"workloads": []}"#,
        r#"{"unknown_key": 1}"#,
        "not json",
    ] {
        let config = write_config(dir.path(), body);
        let output = lumos(&["bench", "--config", &config], dir.path());
        assert_eq!(
            output.status.code(),
            Some(2),
            "config {body:?}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    // A config path that doesn't exist is also a config error.
    let output = lumos(&["bench", "--config", "/nonexistent.json"], dir.path());
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn dry_run_prints_the_plan_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let output = lumos(&["bench", "--dry-run", "--config", &config], dir.path());
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("plan: fibonacci [native-process] group 1 cold x2"));
    assert!(stdout.contains("plan: fibonacci [native-process] group 1 warm x2"));
    assert!(!dir.path().join("cli-test").exists());
    assert!(!dir.path().join("artifacts").exists());
}

#[test]
fn build_writes_a_manifest_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    assert!(lumos(&["build", "--config", &config], dir.path()).status.success());
    let manifest_path = dir.path().join("artifacts/manifest.json");
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest.entries.len(), 1);
    assert!(manifest.entries[0].artifact_bytes > manifest.base_layer_bytes);

    // Identical inputs, identical manifest.
    assert!(lumos(&["build", "--config", &config], dir.path()).status.success());
    let again: Manifest =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest, again);
}

#[test]
fn bench_then_report_produces_the_figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let output = lumos(&["bench", "--config", &config], dir.path());
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let output = lumos(&["report", "--config", &config], dir.path());
    assert!(output.status.success());
    let results = dir.path().join("cli-test");
    for figure in [
        "fig5_image_sizes.csv",
        "fig6_latency.csv",
        "fig7_io_serialization_cdf.csv",
        "fig8_resources.csv",
        "fig9_throughput_cdf.csv",
        "findings.md",
    ] {
        assert!(results.join(figure).is_file(), "missing {figure}");
    }
    let findings = std::fs::read_to_string(results.join("findings.md")).unwrap();
    assert_eq!(findings.matches("\n- ").count(), 6, "{findings}");
    let fig6 = std::fs::read_to_string(results.join("fig6_latency.csv")).unwrap();
    assert!(fig6.starts_with("series,x,y\n"));
    assert!(fig6.contains("fibonacci/native-process/warm,1,"));
}

#[test]
fn report_without_results_is_a_missing_results_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let output = lumos(&["report", "--config", &config], dir.path());
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("missing results"), "{stderr}");
}

#[test]
fn lumos_out_env_overrides_the_config_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let config = write_config(dir.path(), SMALL);
    let output = Command::new(env!("CARGO_BIN_EXE_lumos"))
        .args(["build", "--config", &config])
        .env("LUMOS_OUT", &env_dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(env_dir.join("artifacts/manifest.json").is_file());
}

#[test]
fn defaults_cover_the_full_matrix() {
    let config = ExperimentConfig::default();
    assert_eq!(config.workloads.len(), 8);
    assert_eq!(config.modes.len(), 3);
    assert_eq!(config.groups.len(), 3);
    assert_eq!(config.repetitions, 10);
    assert_eq!(config.matrix().len(), 8 * 3 * 3 * 2);
    config.validate().unwrap();
}

#[test]
fn bad_baas_flag_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let output = lumos(
        &["bench", "--config", &config, "--baas", "nocolon"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
    let output = lumos(
        &["bench", "--config", &config, "--baas", "host:notaport"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2));
}
