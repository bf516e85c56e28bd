//! Success-vs-p curves of the matching decoder and where they cross.
//!
//! cargo run --release --example mwpm_threshold -- [trials]

use toric_lab::eval::{estimate_threshold, evaluate_with, parse_p_list, Decoder};
use toric_lab::Result;

fn main() -> Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(5000, |s| s.parse().expect("trials"));
    let ps = parse_p_list("0.08:0.12:0.01")?;
    let mut curves = Vec::new();
    for d in [3, 5, 7] {
        let res = evaluate_with(&Decoder::Mwpm, d, &ps, trials, 1)?;
        for pt in &res.points {
            println!(
                "d={d} p={:.3} rate {:.4} [{:.4}, {:.4}] mean weight {:.2}",
                pt.p, pt.rate, pt.ci_lo, pt.ci_hi, pt.mean_steps
            );
        }
        curves.push(res.curve());
    }
    let est = estimate_threshold(&curves);
    println!("{}", serde_json::to_string_pretty(&est).expect("json"));
    Ok(())
}
