//! End-to-end runs of the command-line tool.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toric-lab"));
    c.env("TORIC_LAB_THREADS", "2");
    c
}

fn run(args: &[&str]) -> std::process::Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `dir/name` as an owned string argument.
fn at(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

macro_rules! args {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

/// Runs `make(dir)` in two fresh directories and checks every listed
/// output is byte-identical across the runs.
fn twice(make: impl Fn(&Path) -> Vec<String>, outputs: &[&str]) -> PathBuf {
    let a = tempfile::tempdir().unwrap().keep();
    let b = tempfile::tempdir().unwrap().keep();
    for dir in [&a, &b] {
        let args = make(dir);
        run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for name in outputs {
        let x = std::fs::read(a.join(name)).unwrap_or_else(|_| panic!("missing {name}"));
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    a
}

/// A small network and short episodes so training runs in seconds.
const TINY: &str = r#"{
  "network": {"d": 3, "conv": [{"filters": 8, "kernel": 3, "stride": 2}], "fc": [16]},
  "schedule": {"eps_initial": 0.5, "eps_final": 0.1, "total_iterations": 40, "iterations_at_p_final": 10,
               "gamma": 0.9, "batch_size": 8, "target_sync_k": 10, "max_episode_steps": 30}
}"#;

fn tiny_config(dir: &Path) -> String {
    let path = dir.join("tiny.json");
    std::fs::write(&path, TINY).unwrap();
    s(&path).to_string()
}

fn train_tiny(dir: &Path, name: &str, seed: &str, extra: &[&str]) -> PathBuf {
    let ck = dir.join(name);
    let cfg = tiny_config(dir);
    let mut args = vec![
        "train",
        "--config",
        &cfg,
        "--seed",
        seed,
        "--out",
        s(&ck),
        "--progress",
        "0",
    ];
    args.extend_from_slice(extra);
    run(&args);
    ck
}

#[test]
fn usage_errors() {
    assert_eq!(bin().arg("nonsense").status().unwrap().code(), Some(2));
    assert_eq!(
        bin().args(["sweep", "--what"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        bin()
            .args([
                "sweep",
                "--decoder",
                "rl",
                "--d",
                "3",
                "--p",
                "0.1",
                "--out",
                "x.csv"
            ])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(bin().arg("--help").status().unwrap().code(), Some(0));
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "{\"network\": {\"d\": 4}}").unwrap();
    let out = tempfile::tempdir().unwrap();
    let code = bin()
        .args([
            "train",
            "--config",
            s(bad.path()),
            "--out",
            s(&out.path().join("x")),
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(1));
}

#[test]
fn sweep_row_count_and_determinism() {
    let dir = twice(
        |d| {
            args![
                "sweep",
                "--decoder",
                "mwpm",
                "--d",
                "5",
                "--p",
                "0.01:0.15:0.01",
                "--trials",
                "1000",
                "--seed",
                "7",
                "--out",
                at(d, "r.csv"),
                "--hist",
                at(d, "h.csv")
            ]
        },
        &["r.csv", "h.csv"],
    );
    let text = std::fs::read_to_string(dir.join("r.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("d,p,trials,successes,rate,ci_lo,ci_hi,mean_steps")
    );
    assert_eq!(lines.count(), 15);
    let hist = std::fs::read_to_string(dir.join("h.csv")).unwrap();
    assert!(hist.starts_with("d,p,steps,count\n"));
}

#[test]
fn mwpm_bench_and_threshold_are_deterministic() {
    let dir = twice(
        |d| {
            args![
                "mwpm-bench",
                "--d",
                "3,5",
                "--p",
                "0.05,0.1",
                "--trials",
                "500",
                "--seed",
                "3",
                "--out",
                at(d, "b.csv")
            ]
        },
        &["b.csv"],
    );
    let text = std::fs::read_to_string(dir.join("b.csv")).unwrap();
    assert!(text.starts_with("d,p,trials,successes,success_rate\n"));
    assert_eq!(text.lines().count(), 5);

    twice(
        |d| {
            args![
                "threshold",
                "--d",
                "3,5",
                "--p",
                "0.08:0.12:0.01",
                "--trials",
                "400",
                "--seed",
                "2",
                "--curves",
                at(d, "c.csv"),
                "--out",
                at(d, "t.json")
            ]
        },
        &["c.csv", "t.json"],
    );
    let out = run(&["threshold", "--input", s(&dir.join("b.csv"))]);
    assert!(
        String::from_utf8_lossy(&out.stdout).contains("crossing")
            || String::from_utf8_lossy(&out.stdout).contains("interval")
    );
}

#[test]
fn train_evaluate_compare_pipeline() {
    // The preset path produces a checkpoint and a log.
    let work = tempfile::tempdir().unwrap();
    let preset = work.path().join("d3.ckpt");
    run(&[
        "train",
        "--preset",
        "d3",
        "--episodes",
        "2",
        "--seed",
        "1",
        "--out",
        s(&preset),
        "--progress",
        "0",
    ]);
    assert!(preset.exists());
    assert_eq!(
        std::fs::read_to_string(work.path().join("d3.ckpt.log.csv"))
            .unwrap()
            .lines()
            .count(),
        3
    );

    // Training twice with the same seed gives identical logs and checkpoints.
    let dir = twice(
        |d| {
            args![
                "train",
                "--config",
                tiny_config(d),
                "--seed",
                "1",
                "--progress",
                "0",
                "--out",
                at(d, "t.ckpt")
            ]
        },
        &["t.ckpt", "t.ckpt.log.csv"],
    );
    let log = std::fs::read_to_string(dir.join("t.ckpt.log.csv")).unwrap();
    assert!(log.starts_with("iter,epsilon,p,steps,success,mean_loss,wall_ms\n"));
    assert_eq!(log.lines().count(), 41);

    let ck = train_tiny(work.path(), "sf.ckpt", "1", &[]);
    let mad = train_tiny(
        work.path(),
        "mad.ckpt",
        "2",
        &["--reward-mode", "minimum_action"],
    );

    let ck_s = s(&ck).to_string();
    twice(
        |d| {
            args![
                "evaluate",
                "--checkpoint",
                ck_s,
                "--p",
                "0.05,0.1",
                "--trials",
                "200",
                "--seed",
                "4",
                "--out",
                at(d, "e.csv"),
                "--hist",
                at(d, "eh.csv"),
                "--meta",
                at(d, "m.json")
            ]
        },
        &["e.csv", "eh.csv"],
    );
    twice(
        |d| {
            args![
                "sweep",
                "--decoder",
                "rl",
                "--checkpoint",
                ck_s,
                "--d",
                "3",
                "--p",
                "0.1",
                "--trials",
                "200",
                "--seed",
                "4",
                "--out",
                at(d, "s.csv")
            ]
        },
        &["s.csv"],
    );
    let mad_s = s(&mad).to_string();
    let cmp = twice(
        |d| {
            args![
                "compare",
                "--a",
                ck_s,
                "--b",
                mad_s,
                "--p",
                "0.05,0.1",
                "--trials",
                "200",
                "--seed",
                "9",
                "--out-dir",
                at(d, "cmp")
            ]
        },
        &[
            "cmp/compare.csv",
            "cmp/a.curves.csv",
            "cmp/b.curves.csv",
            "cmp/a.hist.csv",
            "cmp/b.hist.csv",
        ],
    );
    assert!(std::fs::read_to_string(cmp.join("cmp/compare.csv"))
        .unwrap()
        .starts_with("d,p,rate_a,rate_b,tv_distance\n"));

    // Identical checkpoints give identical histograms and zero distance.
    let same = tempfile::tempdir().unwrap();
    run(&[
        "compare",
        "--a",
        &ck_s,
        "--b",
        &ck_s,
        "--p",
        "0.1",
        "--trials",
        "200",
        "--seed",
        "9",
        "--out-dir",
        s(same.path()),
    ]);
    assert_eq!(
        std::fs::read(same.path().join("a.hist.csv")).unwrap(),
        std::fs::read(same.path().join("b.hist.csv")).unwrap()
    );
    assert!(std::fs::read_to_string(same.path().join("compare.csv"))
        .unwrap()
        .trim_end()
        .ends_with(",0.0"));

    // A checkpoint for the wrong lattice size is refused.
    let out = bin()
        .args([
            "evaluate",
            "--checkpoint",
            &ck_s,
            "--d",
            "5",
            "--p",
            "0.1",
            "--out",
            s(&same.path().join("x.csv")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}
