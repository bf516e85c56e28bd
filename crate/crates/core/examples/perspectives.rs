//! Translation-invariant views of a syndrome and how the four network
//! outputs map back to qubits.
//!
//! cargo run --example perspectives

use toric_lab::perspective::perspectives_for_qubit;
use toric_lab::{make_perspectives, resolve_action, ActionId, Result, Syndrome, ToricLattice};

fn main() -> Result<()> {
    let l = ToricLattice::new(5)?;
    let syn = Syndrome::from_defects(l, &[(0, 1), (0, 2), (3, 4), (4, 4)])?;
    println!("defects {:?}", syn.defects());

    for p in make_perspectives(&syn)? {
        println!(
            "\nview from {:?} (shift {:?}), centre {:?}",
            p.origin,
            p.shift(),
            toric_lab::perspective::center(l.d())
        );
        for row in p.grid().chunks(l.d()) {
            println!(
                "  {}",
                row.iter()
                    .map(|&x| if x == 1 { '#' } else { '.' })
                    .collect::<String>()
            );
        }
        let qubits: Vec<usize> = ActionId::ALL
            .iter()
            .map(|&a| resolve_action(&p, a))
            .collect();
        println!("  up/down/left/right flip qubits {qubits:?}");
        assert_eq!(p.source(), syn);
    }

    // The edge between two adjacent defects is reachable from both sides.
    let shared = l.vertical(0, 2);
    for (p, a) in perspectives_for_qubit(&syn, shared) {
        println!("qubit {shared} = action {} from {:?}", a.index(), p.origin);
    }
    Ok(())
}
