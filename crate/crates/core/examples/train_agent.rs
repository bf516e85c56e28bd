//! Train a decoder agent from a preset and report progress.
//!
//! cargo run --release --example train_agent -- [preset] [seed] [out]

use toric_lab::dql::{train, TrainConfig, TrainOptions};
use toric_lab::Result;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).map_or("d3", String::as_str);
    let seed = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let out = args
        .get(3)
        .cloned()
        .unwrap_or_else(|| format!("{preset}_s{seed}.ckpt"));

    let config = TrainConfig::preset(preset)?;
    let mut opts = TrainOptions::new(&out);
    opts.wall_clock = true;
    let window = (config.schedule.total_iterations / 20).max(1);
    let (mut ok, mut steps) = (0, 0);
    let summary = train(&config, seed, &opts, |row| {
        ok += row.success as u64;
        steps += row.steps;
        if (row.iter + 1) % window == 0 {
            println!(
                "episode {:>5}  eps {:.3}  p {:.3}  success {:>3}/{window}  steps {:>5}  loss {:>10.2}  {:>5}s",
                row.iter + 1,
                row.epsilon,
                row.p,
                ok,
                steps,
                row.mean_loss.unwrap_or(f64::NAN),
                row.wall_ms / 1000
            );
            (ok, steps) = (0, 0);
        }
    })?;
    println!(
        "{} episodes, {} updates, final success {:.2}; checkpoint {out}",
        summary.episodes, summary.updates, summary.final_success_rate
    );
    Ok(())
}
