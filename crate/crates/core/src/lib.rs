//! Toric-code decoding laboratory.
//!
//! Deep Q-learning decoders for the toric code under i.i.d. bit-flip noise,
//! trained on translation-invariant syndrome perspectives, together with an
//! exact minimum-weight perfect matching baseline and the Monte-Carlo harness
//! that compares them.

pub mod checkpoint;
pub mod cli;
pub mod dql;
pub mod error;
pub mod eval;
pub mod lattice;
pub mod mwpm;
pub mod perspective;
pub mod qnet;
pub mod rng;

pub use error::{Error, Result};
pub use lattice::{Coord, ErrorState, HomologyClass, Syndrome, ToricLattice};
pub use perspective::{make_perspectives, resolve_action, ActionId, Perspective};
