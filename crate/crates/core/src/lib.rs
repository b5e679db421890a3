//! Robust recovery of point locations from pairwise direction observations.
//!
//! Given a graph whose edges carry unit vectors claimed to be the directions
//! between pairs of unknown points — some fraction of them corrupted — the
//! solver recovers the configuration up to translation and positive scale by
//! minimizing the total rotational residual under a scale-pinning
//! constraint. The surrounding modules generate synthetic instances, verify
//! the deterministic conditions under which recovery is guaranteed, and
//! provide executable oracles for the geometric inequalities behind those
//! guarantees.

pub mod conditions;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod solver;
pub mod synth;
pub mod tol;
pub mod types;

pub use error::{Error, Result};
pub use types::{EdgeDecomposition, EdgeLabel, LocationSet, Observation, ObservationSet, ShapeAlignment};
