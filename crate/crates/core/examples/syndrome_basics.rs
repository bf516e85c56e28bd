//! Errors, syndromes and homology on a small torus.
//!
//! cargo run --example syndrome_basics

use toric_lab::{ErrorState, Result, ToricLattice};

fn show(grid: &[u8], d: usize) {
    for row in grid.chunks(d) {
        let line: String = row
            .iter()
            .map(|&x| if x == 1 { 'X' } else { '.' })
            .collect();
        println!("  {line}");
    }
}

fn main() -> Result<()> {
    let l = ToricLattice::new(5)?;
    println!(
        "d = {}: {} qubits, {} plaquettes",
        l.d(),
        l.n_qubits(),
        l.n_plaquettes()
    );

    // One flipped edge lights the two plaquettes it separates.
    let q = l.horizontal(2, 2);
    let e = ErrorState::from_indices(l, &[q])?;
    let syn = l.compute_syndrome(&e);
    println!("flip H(2,2) -> defects {:?}", syn.defects());
    show(syn.grid(), l.d());

    // A vertex star is a stabilizer: no defects, trivial class.
    let star = ErrorState::from_indices(l, &l.vertex_star((1, 1)))?;
    println!(
        "vertex star: {} defects, class {:?}",
        l.compute_syndrome(&star).defect_count(),
        l.homology_class(&star)?
    );

    // A row of horizontal-edge flips around the torus also has no defects,
    // but it wraps around and changes the logical state.
    let ring: Vec<usize> = (0..l.d()).map(|r| l.horizontal(r, 0)).collect();
    let ring = ErrorState::from_indices(l, &ring)?;
    println!(
        "winding loop: {} defects, class {:?}, success {}",
        l.compute_syndrome(&ring).defect_count(),
        l.homology_class(&ring)?,
        l.is_success(&ring)?
    );

    // Random noise.
    let noise = l.sample_errors(0.1, 7)?;
    let syn = l.compute_syndrome(&noise);
    println!(
        "p = 0.1 sample: {} flips, {} defects",
        noise.weight(),
        syn.defect_count()
    );
    show(syn.grid(), l.d());
    Ok(())
}
