//! Fixed numerical tolerances used across the library.
//!
//! All values sit around 100x the f64 machine epsilon scale and are exposed
//! as named constants so tests assert against the same numbers the library
//! enforces.

/// Maximum allowed deviation `| ||v|| - 1 |` for an observation direction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A location set counts as centered when the norm of its mean is below
/// this factor times the largest point norm (absolute when all points are
/// zero).
pub const CENTERING_TOL: f64 = 1e-12;

/// Relative tolerance for edge-decomposition reconstruction and for the
/// orthogonality of the rotational unit vector.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Relative tolerance below which a shape-alignment residual counts as an
/// exact similarity.
pub const ALIGNMENT_TOL: f64 = 1e-9;

/// Bound on constraint violations reported by a converged solve.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Additive slack granted to the geometric-inequality oracles; a violation
/// beyond this is a bug, not roundoff.
pub const LEMMA_SLACK: f64 = 1e-10;

/// Below this projected-residual norm the subgradient oracle treats a term
/// as sitting at its kink and uses the zero subgradient.
pub const KINK_TOL: f64 = 1e-14;
