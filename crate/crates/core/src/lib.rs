//! Manhattan curves for pairs of word metrics on hyperbolic groups.
//!
//! The pipeline runs from a group fixture (generating sets with complete
//! shortlex rewriting systems) through a brute-force Cayley-graph oracle, a
//! certified geodesic automaton with integer edge weights, weighted transfer
//! matrices and their Perron roots, to the derived invariants: growth rates,
//! mean distortion, dilation constants, multifractal spectrum, large
//! deviation rate function and the rough-similarity verdict.

pub mod analysis;
pub mod automaton;
pub mod cayley;
pub mod error;
pub mod group;
pub mod thermo;

pub use error::{Error, Result};
