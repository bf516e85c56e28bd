//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::checkpoint::Checkpoint;
use crate::dql::{self, RewardMode, TrainConfig, TrainOptions};
use crate::error::{Error, Result};
use crate::eval::{self, io, Decoder, DecoderSpec, SweepSpec};

#[derive(Debug, Parser)]
#[command(
    name = "toric-lab",
    version,
    about = "Deep Q-learning and MWPM decoders for the toric code"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a Q-network agent and write a checkpoint plus a CSV log.
    Train(TrainArgs),
    /// Evaluate a checkpoint greedily over a p grid.
    Evaluate(EvaluateArgs),
    /// Success-vs-p sweep for either decoder.
    Sweep(SweepArgs),
    /// Compare two agents (e.g. the two reward schemes) on identical error draws.
    Compare(CompareArgs),
    /// Minimum-weight matching benchmark.
    MwpmBench(BenchArgs),
    /// Estimate the threshold from success curves of several lattice sizes.
    Threshold(ThresholdArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Named preset: d3, d5, d7, d9 or a *_p15 variant.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON training config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint path. Periodic checkpoints go to <out>.ep<N>.
    #[arg(long)]
    out: PathBuf,
    /// Training log CSV (default <out>.log.csv).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Override the reward scheme.
    #[arg(long, value_parser = parse_reward_mode)]
    reward_mode: Option<RewardMode>,
    /// Override the number of training episodes.
    #[arg(long)]
    episodes: Option<u64>,
    /// Use double DQN targets.
    #[arg(long)]
    double_dqn: bool,
    /// Checkpoint every N episodes.
    #[arg(long)]
    checkpoint_every: Option<u64>,
    /// Record elapsed milliseconds in the log instead of 0.
    #[arg(long)]
    wall_clock: bool,
    /// Print a progress line every N episodes (0 = silent).
    #[arg(long, default_value_t = 100)]
    progress: u64,
}

fn parse_reward_mode(s: &str) -> std::result::Result<RewardMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Error rates: comma list or inclusive start:stop:step.
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Expected lattice size; refuses a checkpoint of another size.
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// Curves CSV.
    #[arg(long)]
    out: PathBuf,
    /// Episode-length histogram CSV.
    #[arg(long)]
    hist: Option<PathBuf>,
    /// Run metadata JSON.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DecoderKind {
    Mwpm,
    Rl,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    decoder: DecoderKind,
    #[arg(long)]
    d: usize,
    /// Checkpoint for the rl decoder.
    #[arg(long, required_if_eq("decoder", "rl"))]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    hist: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// First checkpoint (e.g. success/failure rewards).
    #[arg(long)]
    a: PathBuf,
    /// Second checkpoint (e.g. minimum-action rewards).
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Directory for a/b curves and histograms, compare.csv and meta.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Lattice sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// CSV with columns d,p,trials,successes,success_rate.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Existing curve or bench CSVs to read instead of simulating.
    #[arg(long, num_args = 1.., conflicts_with_all = ["d", "checkpoint"])]
    input: Vec<PathBuf>,
    /// Lattice sizes to simulate with MWPM.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Checkpoints to simulate (one per lattice size).
    #[arg(long, num_args = 1..)]
    checkpoint: Vec<PathBuf>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Curves CSV of the simulated sweeps.
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Threshold estimate as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Meta<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    git_hash: Option<String>,
    command: &'a str,
    seed: u64,
    config: T,
}

fn git_hash() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn write_meta<T: Serialize>(path: &Path, command: &str, seed: u64, config: T) -> Result<()> {
    io::write_json(
        path,
        &Meta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            git_hash: git_hash(),
            command,
            seed,
            config,
        },
    )
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns 0 on success, 1 on a runtime error, 2 on a usage error.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train(a) => train(a),
        Command::Evaluate(a) => {
            let spec = SweepSpec {
                d: match a.d {
                    Some(d) => d,
                    None => Checkpoint::load(&a.checkpoint)?.d(),
                },
                p_values: eval::parse_p_list(&a.grid.p)?,
                trials: a.grid.trials,
                decoder: DecoderSpec::Rl {
                    checkpoint: a.checkpoint,
                },
                seed: a.grid.seed,
            };
            sweep_and_write(
                &spec,
                &a.out,
                a.hist.as_deref(),
                a.meta.as_deref(),
                "evaluate",
            )
        }
        Command::Sweep(a) => {
            let decoder = match a.decoder {
                DecoderKind::Mwpm => DecoderSpec::Mwpm,
                DecoderKind::Rl => DecoderSpec::Rl {
                    checkpoint: a.checkpoint.expect("required by clap"),
                },
            };
            let spec = SweepSpec {
                d: a.d,
                p_values: eval::parse_p_list(&a.grid.p)?,
                trials: a.grid.trials,
                decoder,
                seed: a.grid.seed,
            };
            sweep_and_write(&spec, &a.out, a.hist.as_deref(), a.meta.as_deref(), "sweep")
        }
        Command::Compare(a) => compare(a),
        Command::MwpmBench(a) => {
            let ps = eval::parse_p_list(&a.grid.p)?;
            let mut results = Vec::new();
            for &d in &a.d {
                let spec = SweepSpec {
                    d,
                    p_values: ps.clone(),
                    trials: a.grid.trials,
                    decoder: DecoderSpec::Mwpm,
                    seed: a.grid.seed,
                };
                let r = eval::evaluate(&spec)?;
                for pt in &r.points {
                    println!("d={d} p={} success_rate={:.5}", pt.p, pt.rate);
                }
                results.push(r);
            }
            io::write_bench(&a.out, &results)
        }
        Command::Threshold(a) => threshold(a),
    }
}

fn sweep_and_write(
    spec: &SweepSpec,
    out: &Path,
    hist: Option<&Path>,
    meta: Option<&Path>,
    command: &str,
) -> Result<()> {
    let r = eval::evaluate(spec)?;
    for pt in &r.points {
        println!(
            "d={} p={} rate={:.5} [{:.5}, {:.5}] mean_steps={:.3}",
            pt.d, pt.p, pt.rate, pt.ci_lo, pt.ci_hi, pt.mean_steps
        );
    }
    let results = [r];
    io::write_curves(out, &results)?;
    if let Some(h) = hist {
        io::write_histograms(h, &results)?;
    }
    if let Some(m) = meta {
        write_meta(m, command, spec.seed, spec)?;
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = match (&a.preset, &a.config) {
        (Some(p), _) => TrainConfig::preset(p)?,
        (None, Some(path)) => TrainConfig::from_json_file(path)?,
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    };
    if let Some(m) = a.reward_mode {
        cfg.schedule.reward_mode = m;
    }
    if let Some(n) = a.episodes {
        cfg.schedule.total_iterations = n;
        cfg.schedule.iterations_at_p_final = cfg.schedule.iterations_at_p_final.min(n);
    }
    if a.double_dqn {
        cfg.schedule.double_dqn = true;
    }
    if let Some(k) = a.checkpoint_every {
        cfg.checkpoint_every = k;
    }
    cfg.validate()?;
    let mut opts = TrainOptions::new(&a.out);
    if let Some(log) = a.log {
        opts.log = log;
    }
    opts.wall_clock = a.wall_clock;
    let (mut window, mut ok) = (0u64, 0u64);
    let summary = dql::train(&cfg, a.seed, &opts, |row| {
        window += 1;
        ok += row.success as u64;
        if a.progress > 0 && (row.iter + 1) % a.progress == 0 {
            println!(
                "episode {} eps={:.3} p={:.3} success={}/{}",
                row.iter + 1,
                row.epsilon,
                row.p,
                ok,
                window
            );
            (window, ok) = (0, 0);
        }
    })?;
    println!(
        "trained {} episodes, {} updates; checkpoint {} log {}",
        summary.episodes,
        summary.updates,
        opts.out.display(),
        opts.log.display()
    );
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let ca = Checkpoint::load(&a.a)?;
    let cb = Checkpoint::load(&a.b)?;
    let ps = eval::parse_p_list(&a.grid.p)?;
    let cmp = eval::compare_reward_modes(&ca, &cb, &ps, a.grid.trials, a.grid.seed)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let dir = &a.out_dir;
    io::write_curves(&dir.join("a.curves.csv"), std::slice::from_ref(&cmp.a))?;
    io::write_curves(&dir.join("b.curves.csv"), std::slice::from_ref(&cmp.b))?;
    io::write_histograms(&dir.join("a.hist.csv"), std::slice::from_ref(&cmp.a))?;
    io::write_histograms(&dir.join("b.hist.csv"), std::slice::from_ref(&cmp.b))?;
    #[derive(Serialize)]
    struct Row {
        d: usize,
        p: f64,
        rate_a: f64,
        rate_b: f64,
        tv_distance: f64,
    }
    let mut w = csv::Writer::from_path(dir.join("compare.csv"))?;
    for ((x, y), &tv) in cmp.a.points.iter().zip(&cmp.b.points).zip(&cmp.tv) {
        println!(
            "d={} p={} rate_a={:.5} rate_b={:.5} tv={:.4}",
            cmp.d, x.p, x.rate, y.rate, tv
        );
        w.serialize(Row {
            d: cmp.d,
            p: x.p,
            rate_a: x.rate,
            rate_b: y.rate,
            tv_distance: tv,
        })?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct CompareMeta<'a> {
        a: &'a Path,
        b: &'a Path,
        reward_mode_a: RewardMode,
        reward_mode_b: RewardMode,
        p: &'a [f64],
        trials: u64,
    }
    let meta = CompareMeta {
        a: &a.a,
        b: &a.b,
        reward_mode_a: ca.header.config.schedule.reward_mode,
        reward_mode_b: cb.header.config.schedule.reward_mode,
        p: &ps,
        trials: a.grid.trials,
    };
    write_meta(&dir.join("meta.json"), "compare", a.grid.seed, meta)
}

fn threshold(a: ThresholdArgs) -> Result<()> {
    let curves = if !a.input.is_empty() {
        let mut all = Vec::new();
        for path in &a.input {
            all.extend(io::read_curves(path)?);
        }
        all
    } else {
        let p =
            a.p.as_deref()
                .ok_or_else(|| Error::InvalidConfig("--p is required when simulating".into()))?;
        let ps = eval::parse_p_list(p)?;
        let mut decoders: Vec<(usize, Decoder)> = a.d.iter().map(|&d| (d, Decoder::Mwpm)).collect();
        for path in &a.checkpoint {
            let ck = Checkpoint::load(path)?;
            decoders.push((ck.d(), Decoder::rl_from_checkpoint(&ck)?));
        }
        if decoders.len() < 2 {
            return Err(Error::InvalidConfig(
                "need at least two lattice sizes (--d and/or --checkpoint)".into(),
            ));
        }
        let mut results = Vec::new();
        for (d, dec) in &decoders {
            let r = eval::evaluate_with(dec, *d, &ps, a.trials, a.seed)?;
            for pt in &r.points {
                println!("{} d={} p={} rate={:.5}", dec.name(), d, pt.p, pt.rate);
            }
            results.push(r);
        }
        if let Some(path) = &a.curves {
            io::write_curves(path, &results)?;
        }
        results.iter().map(|r| r.curve()).collect()
    };
    let est = eval::estimate_threshold(&curves);
    match est.interval() {
        Some((lo, hi)) => println!("threshold interval [{lo:.5}, {hi:.5}]"),
        None => println!("no crossing in range"),
    }
    if let Some(out) = &a.out {
        io::write_json(out, &est)?;
    }
    Ok(())
}
