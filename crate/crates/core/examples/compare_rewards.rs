//! Episode-length distributions of two agents on identical error draws.
//!
//! cargo run --release --example compare_rewards -- <a.ckpt> <b.ckpt> [p] [trials]

use toric_lab::checkpoint::Checkpoint;
use toric_lab::eval::compare_reward_modes;
use toric_lab::Result;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 3 {
        eprintln!("usage: compare_rewards <a.ckpt> <b.ckpt> [p] [trials]");
        std::process::exit(2);
    }
    let a = Checkpoint::load(args[1].as_ref())?;
    let b = Checkpoint::load(args[2].as_ref())?;
    let p: f64 = args.get(3).map_or(0.1, |s| s.parse().expect("p"));
    let trials = args.get(4).map_or(5000, |s| s.parse().expect("trials"));

    let cmp = compare_reward_modes(&a, &b, &[p], trials, 3)?;
    let (ha, hb) = (&cmp.a.points[0].histogram, &cmp.b.points[0].histogram);
    println!(
        "d={} p={p}: success {:.4} vs {:.4}",
        cmp.d, cmp.a.points[0].rate, cmp.b.points[0].rate
    );
    println!("steps        a        b");
    let longest = ha
        .keys()
        .chain(hb.keys())
        .max()
        .copied()
        .unwrap_or(0)
        .min(30);
    for s in 0..=longest {
        println!(
            "{s:>5} {:>8} {:>8}",
            ha.get(&s).unwrap_or(&0),
            hb.get(&s).unwrap_or(&0)
        );
    }
    println!("total-variation distance {:.4}", cmp.tv[0]);
    Ok(())
}
