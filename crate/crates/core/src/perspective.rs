//! Translation-invariant syndrome views.
//!
//! On the torus every plaquette is equivalent, so a syndrome with N defects is
//! presented to the Q-network as N grids, each cyclically shifted so that one
//! defect sits on the central cell. The network then only scores the four
//! edges of that central plaquette.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, Syndrome, ToricLattice};

/// One of the four boundary edges of the central plaquette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ActionId(u8);

impl ActionId {
    pub const UP: ActionId = ActionId(0);
    pub const DOWN: ActionId = ActionId(1);
    pub const LEFT: ActionId = ActionId(2);
    pub const RIGHT: ActionId = ActionId(3);
    pub const ALL: [ActionId; 4] = [Self::UP, Self::DOWN, Self::LEFT, Self::RIGHT];

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(ActionId(value))
        } else {
            Err(Error::InvalidConfig(format!(
                "action id {value} not in 0..4"
            )))
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for ActionId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        ActionId::new(v)
    }
}

impl From<ActionId> for u8 {
    fn from(a: ActionId) -> u8 {
        a.0
    }
}

/// A syndrome shifted so that the defect at `origin` lands on the centre cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perspective {
    pub syndrome: Syndrome,
    pub origin: Coord,
}

impl Perspective {
    pub fn lattice(&self) -> ToricLattice {
        self.syndrome.lattice()
    }

    /// Row-major 0/1 grid fed to the network.
    pub fn grid(&self) -> &[u8] {
        self.syndrome.grid()
    }

    /// Shift that maps the source syndrome onto this grid.
    pub fn shift(&self) -> (isize, isize) {
        let c = center(self.lattice().d());
        (
            c.0 as isize - self.origin.0 as isize,
            c.1 as isize - self.origin.1 as isize,
        )
    }

    /// The source syndrome, recovered by undoing the shift.
    pub fn source(&self) -> Syndrome {
        let (dr, dc) = self.shift();
        self.syndrome.translate(-dr, -dc)
    }
}

/// Centre cell of a d×d grid (d odd).
pub fn center(d: usize) -> Coord {
    (d / 2, d / 2)
}

pub fn perspective_at(syn: &Syndrome, origin: Coord) -> Perspective {
    let c = center(syn.d());
    let dr = c.0 as isize - origin.0 as isize;
    let dc = c.1 as isize - origin.1 as isize;
    Perspective {
        syndrome: syn.translate(dr, dc),
        origin,
    }
}

/// One perspective per defect, ordered row-major by origin.
pub fn make_perspectives(syn: &Syndrome) -> Result<Vec<Perspective>> {
    let defects = syn.defects();
    if defects.is_empty() {
        return Err(Error::TerminalState);
    }
    Ok(defects
        .into_iter()
        .map(|origin| perspective_at(syn, origin))
        .collect())
}

/// Absolute qubit index that action `a` of `persp` flips.
pub fn resolve_action(persp: &Perspective, a: ActionId) -> usize {
    let lattice = persp.lattice();
    let local = lattice.plaquette_boundary(center(lattice.d()))[a.index()];
    let (dr, dc) = persp.shift();
    lattice.translate_qubit(local, -dr, -dc)
}

/// Recover a `(perspective, action)` pair that flips `qubit` in `syn`.
///
/// The perspective is centred on the first defect (row-major) among the two
/// plaquettes adjacent to `qubit`. Returns `None` when neither is a defect.
pub fn perspective_for_qubit(syn: &Syndrome, qubit: usize) -> Option<(Perspective, ActionId)> {
    let lattice = syn.lattice();
    let mut adj = lattice.adjacent_plaquettes(qubit);
    adj.sort();
    let origin = adj.into_iter().find(|&p| syn.get(p))?;
    let side = lattice
        .plaquette_boundary(origin)
        .iter()
        .position(|&q| q == qubit)?;
    Some((perspective_at(syn, origin), ActionId(side as u8)))
}

/// Every `(perspective, action)` pair that flips `qubit` in `syn`: one per
/// defect among the qubit's two adjacent plaquettes, row-major.
pub fn perspectives_for_qubit(syn: &Syndrome, qubit: usize) -> Vec<(Perspective, ActionId)> {
    let lattice = syn.lattice();
    let mut adj = lattice.adjacent_plaquettes(qubit);
    adj.sort();
    adj.into_iter()
        .filter(|&p| syn.get(p))
        .filter_map(|origin| {
            let side = lattice
                .plaquette_boundary(origin)
                .iter()
                .position(|&q| q == qubit)?;
            Some((perspective_at(syn, origin), ActionId(side as u8)))
        })
        .collect()
}
