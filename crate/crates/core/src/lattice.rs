//! The d×d toric code under bit-flip noise.
//!
//! Qubits live on the edges of a periodic square lattice. Edge indices are
//! laid out as two d×d blocks:
//!
//! * `r*d + c`        the horizontal edge on top of plaquette `(r, c)`
//! * `d*d + r*d + c`  the vertical edge on the left of plaquette `(r, c)`
//!
//! X errors anticommute with the Z-type plaquette stabilizers, so defects are
//! plaquettes. A chain of X errors is a path on the dual lattice (plaquette to
//! plaquette); closed chains that bound a region are products of vertex
//! (X-type star) stabilizers and act trivially on the code space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Plaquette (or vertex) coordinate `(row, col)`.
pub type Coord = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A decoded edge index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub orientation: Orientation,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ToricLattice {
    d: usize,
}

impl TryFrom<usize> for ToricLattice {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<ToricLattice> for usize {
    fn from(l: ToricLattice) -> usize {
        l.d
    }
}

impl ToricLattice {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self { d })
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Code distance.
    pub fn distance(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        2 * self.d * self.d
    }

    #[inline]
    pub fn n_plaquettes(&self) -> usize {
        self.d * self.d
    }

    #[inline]
    fn wrap(&self, x: isize) -> usize {
        x.rem_euclid(self.d as isize) as usize
    }

    #[inline]
    pub fn horizontal(&self, row: usize, col: usize) -> usize {
        (row % self.d) * self.d + col % self.d
    }

    #[inline]
    pub fn vertical(&self, row: usize, col: usize) -> usize {
        self.d * self.d + (row % self.d) * self.d + col % self.d
    }

    pub fn edge(&self, qubit: usize) -> Edge {
        let dd = self.d * self.d;
        let (orientation, rest) = if qubit < dd {
            (Orientation::Horizontal, qubit)
        } else {
            (Orientation::Vertical, qubit - dd)
        };
        Edge {
            orientation,
            row: rest / self.d,
            col: rest % self.d,
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits() {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    /// Boundary edges of plaquette `(r, c)` in the order up, down, left, right.
    pub fn plaquette_boundary(&self, (r, c): Coord) -> [usize; 4] {
        [
            self.horizontal(r, c),
            self.horizontal(r + 1, c),
            self.vertical(r, c),
            self.vertical(r, c + 1),
        ]
    }

    /// The two plaquettes sharing `qubit`, in row-major order of the edge's
    /// own plaquette first.
    pub fn adjacent_plaquettes(&self, qubit: usize) -> [Coord; 2] {
        let e = self.edge(qubit);
        let (r, c) = (e.row as isize, e.col as isize);
        match e.orientation {
            // Top edge of (r, c), bottom edge of (r - 1, c).
            Orientation::Horizontal => [(e.row, e.col), (self.wrap(r - 1), e.col)],
            // Left edge of (r, c), right edge of (r, c - 1).
            Orientation::Vertical => [(e.row, e.col), (e.row, self.wrap(c - 1))],
        }
    }

    /// Edges meeting at vertex `(r, c)`, the top-left corner of plaquette
    /// `(r, c)`. As an X operator this is a vertex stabilizer, the boundary
    /// of one plaquette of the dual lattice.
    pub fn vertex_star(&self, (r, c): Coord) -> [usize; 4] {
        let (ri, ci) = (r as isize, c as isize);
        [
            self.horizontal(r, c),
            self.horizontal(r, self.wrap(ci - 1)),
            self.vertical(r, c),
            self.vertical(self.wrap(ri - 1), c),
        ]
    }

    pub fn empty_errors(&self) -> ErrorState {
        ErrorState {
            lattice: *self,
            flips: vec![0; self.n_qubits()],
        }
    }

    pub fn empty_syndrome(&self) -> Syndrome {
        Syndrome {
            lattice: *self,
            defects: vec![0; self.n_plaquettes()],
        }
    }

    /// I.i.d. bit-flip noise: every qubit flips independently with probability `p`.
    pub fn sample_errors(&self, p: f64, seed: u64) -> Result<ErrorState> {
        self.sample_errors_with(p, &mut rng::seeded(seed))
    }

    pub fn sample_errors_with<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<ErrorState> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let flips = (0..self.n_qubits())
            .map(|_| u8::from(rng.gen::<f64>() < p))
            .collect();
        Ok(ErrorState {
            lattice: *self,
            flips,
        })
    }

    pub fn compute_syndrome(&self, errs: &ErrorState) -> Syndrome {
        debug_assert_eq!(errs.lattice, *self);
        let mut syn = self.empty_syndrome();
        for (q, &f) in errs.flips.iter().enumerate() {
            if f != 0 {
                for (r, c) in self.adjacent_plaquettes(q) {
                    syn.defects[r * self.d + c] ^= 1;
                }
            }
        }
        syn
    }

    /// Copy of `errs` with `qubit` toggled.
    pub fn apply_flip(&self, errs: &ErrorState, qubit: usize) -> Result<ErrorState> {
        let mut out = errs.clone();
        out.flip(qubit)?;
        Ok(out)
    }

    /// Winding parities of a closed configuration, counted on the column-0
    /// and row-0 cuts.
    pub fn homology_class(&self, combined: &ErrorState) -> Result<HomologyClass> {
        self.homology_class_on_cuts(combined, 0, 0)
    }

    /// Winding parities counted on an arbitrary pair of cuts. For closed
    /// configurations the result does not depend on the cuts chosen.
    ///
    /// `h_parity` counts vertical edges in column `col`, which every
    /// horizontally winding dual loop must cross; `v_parity` counts horizontal
    /// edges in row `row`.
    pub fn homology_class_on_cuts(
        &self,
        combined: &ErrorState,
        col: usize,
        row: usize,
    ) -> Result<HomologyClass> {
        let n_defects = self.compute_syndrome(combined).defect_count();
        if n_defects != 0 {
            return Err(Error::OpenConfiguration(n_defects));
        }
        let h = (0..self.d).fold(0u8, |acc, r| acc ^ combined.flips[self.vertical(r, col)]);
        let v = (0..self.d).fold(0u8, |acc, c| acc ^ combined.flips[self.horizontal(row, c)]);
        Ok(HomologyClass {
            h_parity: h == 1,
            v_parity: v == 1,
        })
    }

    /// True when a closed configuration carries no logical error.
    pub fn is_success(&self, combined: &ErrorState) -> Result<bool> {
        Ok(self.homology_class(combined)?.is_trivial())
    }

    /// Toric Manhattan distance between two plaquettes.
    pub fn distance_between(&self, a: Coord, b: Coord) -> usize {
        let dr = a.0.abs_diff(b.0);
        let dc = a.1.abs_diff(b.1);
        dr.min(self.d - dr) + dc.min(self.d - dc)
    }

    /// Index of the edge obtained by shifting `qubit` by `(dr, dc)`.
    pub fn translate_qubit(&self, qubit: usize, dr: isize, dc: isize) -> usize {
        let e = self.edge(qubit);
        let r = self.wrap(e.row as isize + dr);
        let c = self.wrap(e.col as isize + dc);
        match e.orientation {
            Orientation::Horizontal => self.horizontal(r, c),
            Orientation::Vertical => self.vertical(r, c),
        }
    }

    /// Shift every flipped edge by `(dr, dc)` with periodic wrap.
    pub fn translate_errors(&self, errs: &ErrorState, dr: isize, dc: isize) -> ErrorState {
        let mut out = self.empty_errors();
        for q in errs.flipped() {
            out.flips[self.translate_qubit(q, dr, dc)] = 1;
        }
        out
    }
}

/// Hidden per-qubit X error configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ErrorStateWire", try_from = "ErrorStateWire")]
pub struct ErrorState {
    lattice: ToricLattice,
    flips: Vec<u8>,
}

impl ErrorState {
    pub fn lattice(&self) -> ToricLattice {
        self.lattice
    }

    /// 0/1 per qubit.
    pub fn flips(&self) -> &[u8] {
        &self.flips
    }

    pub fn is_flipped(&self, qubit: usize) -> bool {
        self.flips[qubit] != 0
    }

    /// Indices of flipped qubits in increasing order.
    pub fn flipped(&self) -> impl Iterator<Item = usize> + '_ {
        self.flips
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != 0)
            .map(|(q, _)| q)
    }

    pub fn weight(&self) -> usize {
        self.flips.iter().filter(|&&f| f != 0).count()
    }

    pub fn flip(&mut self, qubit: usize) -> Result<()> {
        self.lattice.check_qubit(qubit)?;
        self.flips[qubit] ^= 1;
        Ok(())
    }

    pub fn from_indices(lattice: ToricLattice, indices: &[usize]) -> Result<Self> {
        let mut e = lattice.empty_errors();
        for &q in indices {
            e.flip(q)?;
        }
        Ok(e)
    }

    /// XOR composition. Panics if the lattices differ.
    pub fn xor(&self, other: &ErrorState) -> ErrorState {
        assert_eq!(
            self.lattice, other.lattice,
            "error states live on different lattices"
        );
        let flips = self
            .flips
            .iter()
            .zip(&other.flips)
            .map(|(a, b)| a ^ b)
            .collect();
        ErrorState {
            lattice: self.lattice,
            flips,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ErrorStateWire {
    d: usize,
    flips: Vec<usize>,
}

impl From<ErrorState> for ErrorStateWire {
    fn from(e: ErrorState) -> Self {
        Self {
            d: e.lattice.d,
            flips: e.flipped().collect(),
        }
    }
}

impl TryFrom<ErrorStateWire> for ErrorState {
    type Error = Error;

    fn try_from(w: ErrorStateWire) -> Result<Self> {
        ErrorState::from_indices(ToricLattice::new(w.d)?, &w.flips)
    }
}

/// Plaquette stabilizer outcomes, row-major, 1 = outcome −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SyndromeWire", try_from = "SyndromeWire")]
pub struct Syndrome {
    lattice: ToricLattice,
    defects: Vec<u8>,
}

impl Syndrome {
    pub fn from_grid(lattice: ToricLattice, grid: Vec<u8>) -> Result<Self> {
        if grid.len() != lattice.n_plaquettes() {
            return Err(Error::ShapeMismatch {
                expected: lattice.n_plaquettes(),
                found: grid.len(),
            });
        }
        let defects = grid.into_iter().map(|v| u8::from(v != 0)).collect();
        Ok(Self { lattice, defects })
    }

    pub fn from_defects(lattice: ToricLattice, defects: &[Coord]) -> Result<Self> {
        let d = lattice.d();
        let mut syn = lattice.empty_syndrome();
        for &(r, c) in defects {
            if r >= d || c >= d {
                return Err(Error::InvalidConfig(format!(
                    "defect ({r}, {c}) outside {d}x{d} lattice"
                )));
            }
            syn.defects[r * d + c] ^= 1;
        }
        Ok(syn)
    }

    pub fn lattice(&self) -> ToricLattice {
        self.lattice
    }

    pub fn d(&self) -> usize {
        self.lattice.d
    }

    /// Row-major 0/1 grid.
    pub fn grid(&self) -> &[u8] {
        &self.defects
    }

    pub fn get(&self, (r, c): Coord) -> bool {
        self.defects[r * self.lattice.d + c] != 0
    }

    pub fn defect_count(&self) -> usize {
        self.defects.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_terminal(&self) -> bool {
        self.defects.iter().all(|&v| v == 0)
    }

    /// Defect coordinates in row-major order.
    pub fn defects(&self) -> Vec<Coord> {
        let d = self.lattice.d;
        self.defects
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| (i / d, i % d))
            .collect()
    }

    /// Cyclic shift: the defect at `(r, c)` moves to `(r + dr, c + dc)`.
    pub fn translate(&self, dr: isize, dc: isize) -> Syndrome {
        let d = self.lattice.d;
        let mut out = self.lattice.empty_syndrome();
        for (r, c) in self.defects() {
            let nr = (r as isize + dr).rem_euclid(d as isize) as usize;
            let nc = (c as isize + dc).rem_euclid(d as isize) as usize;
            out.defects[nr * d + nc] = 1;
        }
        out
    }

    /// Toggle the defects adjacent to `qubit`, i.e. the syndrome change caused
    /// by flipping that qubit.
    pub fn toggle_qubit(&mut self, qubit: usize) -> Result<()> {
        self.lattice.check_qubit(qubit)?;
        let d = self.lattice.d;
        for (r, c) in self.lattice.adjacent_plaquettes(qubit) {
            self.defects[r * d + c] ^= 1;
        }
        Ok(())
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        assert_eq!(
            self.lattice, other.lattice,
            "syndromes live on different lattices"
        );
        let defects = self
            .defects
            .iter()
            .zip(&other.defects)
            .map(|(a, b)| a ^ b)
            .collect();
        Syndrome {
            lattice: self.lattice,
            defects,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SyndromeWire {
    d: usize,
    defects: Vec<[usize; 2]>,
}

impl From<Syndrome> for SyndromeWire {
    fn from(s: Syndrome) -> Self {
        Self {
            d: s.d(),
            defects: s.defects().into_iter().map(|(r, c)| [r, c]).collect(),
        }
    }
}

impl TryFrom<SyndromeWire> for Syndrome {
    type Error = Error;

    fn try_from(w: SyndromeWire) -> Result<Self> {
        let coords: Vec<Coord> = w.defects.iter().map(|&[r, c]| (r, c)).collect();
        Syndrome::from_defects(ToricLattice::new(w.d)?, &coords)
    }
}

/// Winding parities of a closed error-plus-correction configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    /// Parity of horizontal windings (crossings of a column cut).
    pub h_parity: bool,
    /// Parity of vertical windings (crossings of a row cut).
    pub v_parity: bool,
}

impl HomologyClass {
    pub fn is_trivial(&self) -> bool {
        !self.h_parity && !self.v_parity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn lat(d: usize) -> ToricLattice {
        ToricLattice::new(d).unwrap()
    }

    #[test]
    fn rejects_even_and_small_dimensions() {
        for d in [0, 1, 2, 4, 8] {
            assert!(matches!(
                ToricLattice::new(d),
                Err(Error::InvalidDimension(_))
            ));
        }
        assert_eq!(lat(5).n_qubits(), 50);
    }

    #[test]
    fn every_edge_touches_two_plaquettes_and_two_vertices() {
        for d in [3, 5, 7] {
            let l = lat(d);
            let mut plaq_count = vec![0; l.n_qubits()];
            let mut vert_count = vec![0; l.n_qubits()];
            for r in 0..d {
                for c in 0..d {
                    for q in l.plaquette_boundary((r, c)) {
                        plaq_count[q] += 1;
                    }
                    for q in l.vertex_star((r, c)) {
                        vert_count[q] += 1;
                    }
                }
            }
            assert!(plaq_count.iter().all(|&n| n == 2));
            assert!(vert_count.iter().all(|&n| n == 2));
            for q in 0..l.n_qubits() {
                for p in l.adjacent_plaquettes(q) {
                    assert!(l.plaquette_boundary(p).contains(&q));
                }
            }
        }
    }

    #[test]
    fn sampling_extremes() {
        let l = lat(5);
        assert_eq!(l.sample_errors(0.0, 3).unwrap().weight(), 0);
        assert_eq!(l.sample_errors(1.0, 3).unwrap().weight(), 50);
        assert!(matches!(
            l.sample_errors(1.5, 3),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            l.sample_errors(-0.1, 3),
            Err(Error::InvalidProbability(_))
        ));
        assert_eq!(
            l.sample_errors(0.3, 11).unwrap(),
            l.sample_errors(0.3, 11).unwrap()
        );
    }

    #[test]
    fn empirical_flip_fraction_matches_p() {
        // 10^6 error states on d = 9; the binomial standard error of the pooled
        // fraction is ~2.4e-5, far inside the ±1e-3 band.
        let l = lat(9);
        let mut rng = rng::seeded(2024);
        let samples = 1_000_000usize;
        let mut flipped = 0usize;
        for _ in 0..samples {
            flipped += l.sample_errors_with(0.10, &mut rng).unwrap().weight();
        }
        let frac = flipped as f64 / (samples * l.n_qubits()) as f64;
        assert!((frac - 0.10).abs() < 1e-3, "fraction {frac}");
    }

    #[test]
    fn single_flip_lights_the_two_sharing_plaquettes() {
        let l = lat(5);
        for q in 0..l.n_qubits() {
            let e = l.apply_flip(&l.empty_errors(), q).unwrap();
            let s = l.compute_syndrome(&e);
            let mut expect = l.adjacent_plaquettes(q).to_vec();
            expect.sort();
            assert_eq!(s.defects(), expect);
        }
    }

    #[test]
    fn vertex_star_is_syndrome_free_and_trivial() {
        let l = lat(5);
        let star = ErrorState::from_indices(l, &l.vertex_star((2, 3))).unwrap();
        assert!(l.compute_syndrome(&star).is_terminal());
        assert!(l.is_success(&star).unwrap());
        // A plaquette boundary is not closed for X errors: it lights the four
        // neighbouring plaquettes.
        let plaq = ErrorState::from_indices(l, &l.plaquette_boundary((2, 3))).unwrap();
        assert_eq!(l.compute_syndrome(&plaq).defect_count(), 4);
    }

    #[test]
    fn flip_is_an_involution_and_range_checked() {
        let l = lat(3);
        let e = l.sample_errors(0.4, 1).unwrap();
        let twice = l.apply_flip(&l.apply_flip(&e, 7).unwrap(), 7).unwrap();
        assert_eq!(e, twice);
        assert!(matches!(
            l.apply_flip(&e, 18),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn correcting_the_error_is_success() {
        let l = lat(3);
        for q in 0..l.n_qubits() {
            let err = l.apply_flip(&l.empty_errors(), q).unwrap();
            let combined = l.apply_flip(&err, q).unwrap();
            assert!(l.compute_syndrome(&combined).is_terminal());
            assert_eq!(
                l.homology_class(&combined).unwrap(),
                HomologyClass::default()
            );
        }
    }

    #[test]
    fn logical_loops_have_one_odd_parity() {
        let l = lat(5);
        // Dual loop running along row 2 crosses every vertical edge of that row.
        let horiz: Vec<usize> = (0..5).map(|c| l.vertical(2, c)).collect();
        let h = l
            .homology_class(&ErrorState::from_indices(l, &horiz).unwrap())
            .unwrap();
        assert_eq!(
            h,
            HomologyClass {
                h_parity: true,
                v_parity: false
            }
        );
        let vert: Vec<usize> = (0..5).map(|r| l.horizontal(r, 1)).collect();
        let v = l
            .homology_class(&ErrorState::from_indices(l, &vert).unwrap())
            .unwrap();
        assert_eq!(
            v,
            HomologyClass {
                h_parity: false,
                v_parity: true
            }
        );
    }

    #[test]
    fn wrapping_correction_is_a_logical_failure() {
        // d = 3: one error on V(0,0) lights (0,0) and (0,2). Correcting through
        // the long way round, V(0,1) and V(0,2), closes a horizontal loop.
        let l = lat(3);
        let err = ErrorState::from_indices(l, &[l.vertical(0, 0)]).unwrap();
        let corr = ErrorState::from_indices(l, &[l.vertical(0, 1), l.vertical(0, 2)]).unwrap();
        assert_eq!(l.compute_syndrome(&err), l.compute_syndrome(&corr));
        let combined = err.xor(&corr);
        assert!(!l.is_success(&combined).unwrap());
        assert!(l.homology_class(&combined).unwrap().h_parity);
    }

    #[test]
    fn open_configuration_is_rejected() {
        let l = lat(3);
        let e = ErrorState::from_indices(l, &[0]).unwrap();
        assert!(matches!(
            l.homology_class(&e),
            Err(Error::OpenConfiguration(2))
        ));
        assert!(l.is_success(&e).is_err());
    }

    #[test]
    fn json_forms() {
        let l = lat(5);
        let e = ErrorState::from_indices(l, &[3, 31]).unwrap();
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(js, r#"{"d":5,"flips":[3,31]}"#);
        assert_eq!(serde_json::from_str::<ErrorState>(&js).unwrap(), e);
        let s = l.compute_syndrome(&ErrorState::from_indices(l, &[0]).unwrap());
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"d":5,"defects":[[0,0],[4,0]]}"#);
        assert_eq!(serde_json::from_str::<Syndrome>(&js).unwrap(), s);
        assert!(serde_json::from_str::<ErrorState>(r#"{"d":4,"flips":[]}"#).is_err());
    }
}
