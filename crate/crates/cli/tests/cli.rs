//! Command-line interface contract: exit codes, flag overrides and the
//! thread-cap environment variable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{TimeZone, Utc};

use botminer_core::ingest::{default_platform_colors, SyntheticSpec};
use botminer_core::learn::{CvSpec, Hyperparams};
use botminer_core::pipeline::{ExperimentConfig, SelectionCfg};
use botminer_core::types::{DatasetFormat, DatasetManifest, Label};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_botminer"))
}

fn write_config(dir: &Path) -> PathBuf {
    let spec = SyntheticSpec {
        seed: 4,
        humans: 14,
        bots: 14,
        tweets_per_account: 5,
        account_signal: true,
        content_signal: true,
    };
    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let config = ExperimentConfig {
        manifest: DatasetManifest {
            dataset_id: "synthetic".into(),
            format: DatasetFormat::Synthetic,
            paths: BTreeMap::from([("spec".to_string(), spec_path)]),
            class_mapping: BTreeMap::from([
                ("genuine".to_string(), Label::Human),
                ("automated".to_string(), Label::Bot),
            ]),
            crawl_time: Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap(),
            platform_defaults: default_platform_colors(),
            max_tweets_per_user: Some(50),
        },
        selection: SelectionCfg {
            method: "rf_importance".into(),
            k_max: 4,
            patience: 2,
        },
        cv: CvSpec {
            folds: 4,
            stratified: true,
            seed: 1,
        },
        models: vec!["random_forest".into(), "dummy_majority".into()],
        seed: 5,
        output_dir: dir.join("out"),
        hyper: Hyperparams {
            n_trees: 10,
            ..Hyperparams::default()
        },
    };
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn full_stage_sequence_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    for stage in ["extract", "rank", "select", "train", "ablate"] {
        let status = bin()
            .args([stage, "--config", config.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "{stage}");
    }
    let status = bin()
        .args(["report", "--out", dir.path().join("out").to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());

    // Unknown model id.
    let status = bin()
        .args([
            "train",
            "--config",
            config.to_str().unwrap(),
            "--models",
            "svm",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Unknown selection method.
    let status = bin()
        .args([
            "select",
            "--config",
            config.to_str().unwrap(),
            "--method",
            "pca",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Manifest path that does not exist.
    let raw = std::fs::read_to_string(&config).unwrap();
    let broken = raw.replace("spec.json", "missing-spec.json");
    let broken_path = dir.path().join("broken.json");
    std::fs::write(&broken_path, broken).unwrap();
    let status = bin()
        .args(["extract", "--config", broken_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    // Rank before extract: the matrix files are missing.
    let status = bin()
        .args(["rank", "--config", config.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // Report over an empty directory.
    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let status = bin()
        .args(["report", "--out", empty.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn thread_env_var_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_env = dir.path().join("out_env");
    let status = bin()
        .args([
            "extract",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_env.to_str().unwrap(),
        ])
        .env("BOTMINER_THREADS", "1")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out_env.join("matrix.csv").exists());
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("alt");
    for (stage, extra) in [
        ("extract", vec![]),
        ("select", vec!["--method", "mutual_info", "--k-max", "3"]),
    ] {
        let mut args = vec![
            stage,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "123",
        ];
        args.extend(extra);
        let status = bin().args(&args).status().unwrap();
        assert_eq!(status.code(), Some(0), "{stage}");
    }
    let selection: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("selection.json")).unwrap())
            .unwrap();
    assert_eq!(selection["method"], "mutual_info");
    assert_eq!(selection["seed"], 123);
    assert!(selection["curve"].as_array().unwrap().len() <= 3);
}
