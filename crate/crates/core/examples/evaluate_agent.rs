//! Greedy evaluation of a trained agent next to the matching decoder on
//! the same error draws.
//!
//! cargo run --release --example evaluate_agent -- <checkpoint> [p list] [trials]

use toric_lab::checkpoint::Checkpoint;
use toric_lab::eval::{evaluate_with, parse_p_list, Decoder};
use toric_lab::Result;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let path = args
        .get(1)
        .expect("usage: evaluate_agent <checkpoint> [p list] [trials]");
    let ps = parse_p_list(args.get(2).map_or("0.01,0.05,0.1", String::as_str))?;
    let trials = args.get(3).map_or(5000, |s| s.parse().expect("trials"));

    let ck = Checkpoint::load(path.as_ref())?;
    let d = ck.d();
    println!(
        "d={d}, trained {} episodes ({:?} rewards)",
        ck.header.cursor.episodes, ck.header.config.schedule.reward_mode
    );
    let rl = evaluate_with(&Decoder::rl_from_checkpoint(&ck)?, d, &ps, trials, 5)?;
    let mw = evaluate_with(&Decoder::Mwpm, d, &ps, trials, 5)?;
    for (a, b) in rl.points.iter().zip(&mw.points) {
        println!(
            "p={:.3}  agent {:.4} [{:.4}, {:.4}] {:.2} steps  matching {:.4} {:.2} steps",
            a.p, a.rate, a.ci_lo, a.ci_hi, a.mean_steps, b.rate, b.mean_steps
        );
    }
    Ok(())
}
