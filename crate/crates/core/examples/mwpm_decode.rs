//! Decode a random error with minimum-weight perfect matching.
//!
//! cargo run --example mwpm_decode -- [d] [p] [seed]

use toric_lab::mwpm::{build_defect_graph, min_weight_matching, mwpm_decode};
use toric_lab::{Result, ToricLattice};

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let d = args.get(1).map_or(7, |s| s.parse().expect("d"));
    let p = args.get(2).map_or(0.08, |s| s.parse().expect("p"));
    let seed = args.get(3).map_or(1, |s| s.parse().expect("seed"));

    let l = ToricLattice::new(d)?;
    let errors = l.sample_errors(p, seed)?;
    let syn = l.compute_syndrome(&errors);
    let g = build_defect_graph(&syn)?;
    let m = min_weight_matching(&g)?;
    println!("{} errors, {} defects", errors.weight(), g.len());
    for &(i, j) in &m.pairs {
        println!(
            "  {:?} <-> {:?} (distance {})",
            g.nodes[i],
            g.nodes[j],
            g.weight(i, j)
        );
    }

    let corr = mwpm_decode(l, &syn)?;
    let combined = errors.xor(&corr);
    println!(
        "correction weight {} (matching weight {})",
        corr.weight(),
        m.weight
    );
    println!(
        "residual defects {}, class {:?}",
        l.compute_syndrome(&combined).defect_count(),
        l.homology_class(&combined)?
    );
    println!(
        "{}",
        if l.is_success(&combined)? {
            "success"
        } else {
            "logical error"
        }
    );
    Ok(())
}
