use std::path::Path;
use std::process::Command;

use cce::experiment::{self, ExperimentConfig, OutputFormat, TraceRecord, CSV_HEADER};
use cce::joint::Algorithm;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cce"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// CSV contents with the wall-clock column dropped.
fn without_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(1);
            f.join(",")
        })
        .collect()
}

#[test]
fn cfr_jr_smoke_trace() {
    let config = ExperimentConfig::new("K3-3".parse().unwrap(), Algorithm::CfrJr, 2000);
    let out = experiment::run(&config).unwrap();
    let trace = &out.cells[0].trace;
    assert_eq!(trace.len(), 40);
    assert!(trace.windows(2).all(|w| w[0].iteration < w[1].iteration));
    assert!(trace.windows(2).all(|w| w[0].support <= w[1].support));
    assert!(trace.iter().all(|r| (0.0..=1.0).contains(&r.alpha)));
    assert!(trace.iter().all(|r| r.time_s <= r.time_total_s));
}

#[test]
fn cfr_on_coordination_converges() {
    let mut config = ExperimentConfig::new("M:coordination".parse().unwrap(), Algorithm::Cfr, 10_000);
    config.eval_every = 1;
    let out = experiment::run(&config).unwrap();
    let hit = out.cells[0].first_hits[0].iteration;
    assert_eq!(hit, Some(10));
    assert!(out.cells[0].trace.last().unwrap().alpha < 1e-4);
}

#[test]
fn first_hits_rederive_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::new("SHAPLEY".parse().unwrap(), Algorithm::CfrS, 3000);
    config.seeds = vec![1, 2, 3];
    config.eval_every = 10;
    config.alpha_targets = vec![0.2, 0.1, 0.05];
    config.workers = 2;
    let out = experiment::run(&config).unwrap();
    let files = experiment::emit(&out, OutputFormat::Csv, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    for (cell, file) in out.cells.iter().zip(&files) {
        let csv = read(file);
        for hit in &cell.first_hits {
            let from_csv = csv.lines().skip(1).find_map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[3].parse::<f64>().unwrap() <= hit.alpha).then(|| f[0].parse::<u64>().unwrap())
            });
            assert_eq!(from_csv, hit.iteration, "seed {:?} target {}", cell.seed, hit.alpha);
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&read(files.last().unwrap())).unwrap();
    assert_eq!(summary["targets"].as_array().unwrap().len(), 3);
    assert_eq!(summary["aggregate"].as_array().unwrap().len(), 300);
}

#[test]
fn json_traces_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::new("M:shapley".parse().unwrap(), Algorithm::CfrJr, 120);
    config.eval_every = 40;
    let out = experiment::run(&config).unwrap();
    let files = experiment::emit(&out, OutputFormat::Json, dir.path()).unwrap();
    let back: Vec<TraceRecord> = serde_json::from_str(&read(&files[0])).unwrap();
    assert_eq!(back, out.cells[0].trace);
}

#[test]
fn cli_solve_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<String> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("run{k}"));
            let status = cli()
                .args(["solve", "--game", "K3-3", "--algo", "cfr-jr", "--iters", "600", "--eval-every", "50", "--out"])
                .arg(&out)
                .output()
                .unwrap();
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            read(&out.join("K3-3_cfr-jr.csv"))
        })
        .collect();
    assert!(runs[0].starts_with(CSV_HEADER));
    assert_eq!(runs[0].lines().count(), 13);
    assert_eq!(without_time(&runs[0]), without_time(&runs[1]));
}

#[test]
fn cli_config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"game": "M:coordination", "iterations": 30, "eval_every": 10, "format": "json", "seeds": [4, 5]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = cli()
        .args(["solve", "--game", "K3-3", "--algo", "cfr-s", "--iters", "5000", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for seed in [4, 5] {
        let trace: Vec<TraceRecord> = serde_json::from_str(&read(&out.join(format!("M_coordination_cfr-s_s{seed}.json")))).unwrap();
        assert_eq!(trace.iter().map(|r| r.iteration).collect::<Vec<_>>(), [10, 20, 30]);
    }
}

#[test]
fn cli_exit_codes() {
    let bad = [
        vec!["solve", "--game", "K9", "--algo", "cfr-jr", "--iters", "10"],
        vec!["solve", "--game", "K3-3", "--algo", "dcfr", "--iters", "10"],
        vec!["solve", "--game", "K3-3", "--algo", "cfr-jr", "--iters", "0"],
        vec!["solve", "--game", "K3-3", "--algo", "cfr-jr", "--iters", "5", "--alpha-targets", "0,0.5"],
        vec!["solve", "--game", "K3-3", "--algo", "cfr-jr-k", "--iters", "5", "--recon-rate", "9"],
        vec!["solve", "--algo", "cfr-jr", "--iters", "5"],
    ];
    for args in bad {
        let run = cli().args(&args).output().unwrap();
        assert_eq!(run.status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let run = cli()
        .args(["solve", "--config"])
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));

    let run = cli()
        .args(["solve", "--game", "L3-3", "--algo", "cfr", "--iters", "100000000", "--alpha-targets", "1e-12"])
        .args(["--time-limit", "0.5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3));
    assert!(dir.path().join("L3-3_cfr.checkpoint.json").exists());
}

#[test]
fn cli_instance_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let run = cli().args(["instance", "--game", "R2-3:seed=7", "--out"]).arg(&path).output().unwrap();
    assert!(run.status.success());
    let g = experiment::load_instance(&path).unwrap();
    assert_eq!(g, "R2-3:seed=7".parse::<cce::games::GameSpec>().unwrap().build().unwrap());
}
