//! Exact minimum-weight perfect matching decoder.
//!
//! Defects are paired so that the summed toric Manhattan distance is minimal,
//! then each pair is joined by a shortest correction chain.

mod blossom;

pub use blossom::{max_weight_matching, WeightedEdge};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, ErrorState, Syndrome, ToricLattice};

/// Complete graph on the defects of a syndrome with the toric metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectGraph {
    pub lattice: ToricLattice,
    pub nodes: Vec<Coord>,
}

impl DefectGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> usize {
        self.lattice.distance_between(self.nodes[i], self.nodes[j])
    }
}

/// A set of node pairs covering every node exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: usize,
}

pub fn build_defect_graph(syn: &Syndrome) -> Result<DefectGraph> {
    let nodes = syn.defects();
    if !nodes.len().is_multiple_of(2) {
        return Err(Error::OddDefectCount(nodes.len()));
    }
    Ok(DefectGraph {
        lattice: syn.lattice(),
        nodes,
    })
}

/// Globally minimal perfect matching.
pub fn min_weight_matching(g: &DefectGraph) -> Result<Matching> {
    let n = g.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddDefectCount(n));
    }
    if n == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            weight: 0,
        });
    }
    // Max-cardinality max-weight matching on (C - w) is a min-weight perfect
    // matching on a complete graph with an even vertex count.
    let max_w = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| g.weight(i, j))
        .max()
        .unwrap_or(0);
    let c = max_w as i64 + 1;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, 2 * (c - g.weight(i, j) as i64)));
        }
    }
    let mate = max_weight_matching(n, &edges, true);
    let mut pairs = Vec::with_capacity(n / 2);
    for (i, m) in mate.iter().enumerate() {
        let j = m.expect("complete graph with even order has a perfect matching");
        if i < j {
            pairs.push((i, j));
        }
    }
    let weight = pairs.iter().map(|&(i, j)| g.weight(i, j)).sum();
    Ok(Matching { pairs, weight })
}

/// Which axis a correction chain traverses first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathOrder {
    /// Along the starting row (column changes) first, then along the column.
    #[default]
    RowFirst,
    ColumnFirst,
}

/// Signed shortest step count from `a` to `b` on a cycle of odd length `d`.
fn shortest_offset(a: usize, b: usize, d: usize) -> isize {
    let fwd = (b + d - a) % d;
    // d odd: fwd and d - fwd never tie.
    debug_assert!(fwd == 0 || fwd != d - fwd);
    if fwd <= d / 2 {
        fwd as isize
    } else {
        fwd as isize - d as isize
    }
}

/// Flip the qubits along a shortest toric path between two plaquettes.
pub fn add_path(
    lattice: ToricLattice,
    corr: &mut ErrorState,
    from: Coord,
    to: Coord,
    order: PathOrder,
) {
    let d = lattice.d();
    let (mut r, mut c) = from;
    let dr = shortest_offset(from.0, to.0, d);
    let dc = shortest_offset(from.1, to.1, d);
    let horizontal_leg = |r: usize, c: &mut usize, corr: &mut ErrorState| {
        for _ in 0..dc.unsigned_abs() {
            if dc > 0 {
                // (r, c) -> (r, c + 1) crosses the right edge V(r, c + 1).
                *c = (*c + 1) % d;
                corr.flip(lattice.vertical(r, *c)).unwrap();
            } else {
                // (r, c) -> (r, c - 1) crosses the left edge V(r, c).
                corr.flip(lattice.vertical(r, *c)).unwrap();
                *c = (*c + d - 1) % d;
            }
        }
    };
    let vertical_leg = |r: &mut usize, c: usize, corr: &mut ErrorState| {
        for _ in 0..dr.unsigned_abs() {
            if dr > 0 {
                // (r, c) -> (r + 1, c) crosses the bottom edge H(r + 1, c).
                *r = (*r + 1) % d;
                corr.flip(lattice.horizontal(*r, c)).unwrap();
            } else {
                corr.flip(lattice.horizontal(*r, c)).unwrap();
                *r = (*r + d - 1) % d;
            }
        }
    };
    match order {
        PathOrder::RowFirst => {
            horizontal_leg(r, &mut c, corr);
            vertical_leg(&mut r, c, corr);
        }
        PathOrder::ColumnFirst => {
            vertical_leg(&mut r, c, corr);
            horizontal_leg(r, &mut c, corr);
        }
    }
    debug_assert_eq!((r, c), to);
}

pub fn matching_to_correction(
    lattice: ToricLattice,
    g: &DefectGraph,
    m: &Matching,
    order: PathOrder,
) -> ErrorState {
    let mut corr = lattice.empty_errors();
    for &(i, j) in &m.pairs {
        add_path(lattice, &mut corr, g.nodes[i], g.nodes[j], order);
    }
    corr
}

/// Correction proposed by minimum-weight matching.
pub fn mwpm_decode(lattice: ToricLattice, syn: &Syndrome) -> Result<ErrorState> {
    mwpm_decode_with(lattice, syn, PathOrder::RowFirst)
}

pub fn mwpm_decode_with(
    lattice: ToricLattice,
    syn: &Syndrome,
    order: PathOrder,
) -> Result<ErrorState> {
    if syn.lattice() != lattice {
        return Err(Error::DimensionMismatch {
            expected: lattice.d(),
            found: syn.d(),
        });
    }
    let g = build_defect_graph(syn)?;
    let m = min_weight_matching(&g)?;
    Ok(matching_to_correction(lattice, &g, &m, order))
}
