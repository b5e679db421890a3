//! Domain types shared by every module: point configurations, direction
//! observations, and the per-edge deformation decomposition.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;

/// An ordered set of `n` points in `R^d`; the index is the point's identity.
///
/// Immutable after construction. The `centered` flag is computed at
/// construction time: it is set exactly when the empirical mean has norm at
/// most [`tol::CENTERING_TOL`] times the largest point norm (absolute when
/// all points are zero).
#[derive(Debug, Clone, PartialEq)]
pub struct LocationSet {
    dim: usize,
    // Row-major n x dim storage.
    coords: Vec<f64>,
    centered: bool,
}

impl LocationSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput(
                "a location set needs at least one point".into(),
            ));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self::from_flat_unchecked(dim, coords))
    }

    /// Builds from row-major flat storage of length `n * dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "flat coordinate buffer of length {} does not split into d={dim} points",
                coords.len()
            )));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Self::from_flat_unchecked(dim, coords))
    }

    fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        let mut set = LocationSet {
            dim,
            coords,
            centered: false,
        };
        set.centered = set.satisfies_centering();
        set
    }

    fn satisfies_centering(&self) -> bool {
        let mean = self.mean();
        let max_norm = (0..self.n())
            .map(|i| linalg::norm(self.point(i)))
            .fold(0.0_f64, f64::max);
        let bound = if max_norm == 0.0 {
            tol::CENTERING_TOL
        } else {
            tol::CENTERING_TOL * max_norm
        };
        linalg::norm(&mean) <= bound
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.n() as f64;
        let mut m = vec![0.0; self.dim];
        for p in self.iter() {
            linalg::axpy(&mut m, 1.0 / n, p);
        }
        m
    }

    /// `t_i - t_j`
    pub fn diff(&self, i: usize, j: usize) -> Vec<f64> {
        linalg::sub(self.point(i), self.point(j))
    }

    /// Returns a copy with the empirical mean subtracted.
    pub fn centered(&self) -> LocationSet {
        let mean = self.mean();
        let mut coords = self.coords.clone();
        for p in coords.chunks_exact_mut(self.dim) {
            for (x, m) in p.iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        Self::from_flat_unchecked(self.dim, coords)
    }

    /// Returns a copy translated by `w` and scaled by `c`: `c * (t_i + w)`.
    pub fn transformed(&self, c: f64, w: &[f64]) -> Result<LocationSet> {
        if w.len() != self.dim {
            return Err(Error::InvalidInput(
                "translation dimension mismatch".into(),
            ));
        }
        let coords = self
            .iter()
            .flat_map(|p| p.iter().zip(w).map(move |(x, wi)| c * (x + wi)))
            .collect();
        Self::from_flat(self.dim, coords)
    }
}

/// Serializes as a plain nested array `[[x1, ..., xd], ...]`.
impl Serialize for LocationSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.n()))?;
        for p in self.iter() {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

/// Ground-truth tag for a synthetic observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    Good,
    Bad,
}

/// One observed pairwise direction: endpoints `i < j` and a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub i: usize,
    pub j: usize,
    pub direction: Vec<f64>,
}

/// A graph of unit-direction observations over `n` vertices, optionally
/// carrying ground-truth good/bad labels (synthetic instances only; solvers
/// never read them).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    n: usize,
    dim: usize,
    observations: Vec<Observation>,
    labels: Option<Vec<EdgeLabel>>,
}

impl ObservationSet {
    pub fn new(
        n: usize,
        dim: usize,
        observations: Vec<Observation>,
        labels: Option<Vec<EdgeLabel>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for obs in &observations {
            if obs.i >= obs.j {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) must satisfy i < j",
                    obs.i, obs.j
                )));
            }
            if obs.j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    obs.i, obs.j
                )));
            }
            if !seen.insert((obs.i, obs.j)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate edge ({}, {})",
                    obs.i, obs.j
                )));
            }
            if obs.direction.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) direction has dimension {}, expected {dim}",
                    obs.i,
                    obs.j,
                    obs.direction.len()
                )));
            }
            let norm = linalg::norm(&obs.direction);
            if !norm.is_finite() || (norm - 1.0).abs() > tol::UNIT_NORM_TOL {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) direction has norm {norm}, not unit",
                    obs.i, obs.j
                )));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != observations.len() {
                return Err(Error::InvalidInput(format!(
                    "{} labels for {} edges",
                    labels.len(),
                    observations.len()
                )));
            }
        }
        Ok(ObservationSet {
            n,
            dim,
            observations,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.observations.iter()
    }

    pub fn labels(&self) -> Option<&[EdgeLabel]> {
        self.labels.as_deref()
    }

    /// Edges labeled bad; `None` when the instance carries no labels.
    pub fn bad_edges(&self) -> Option<Vec<(usize, usize)>> {
        self.labels.as_ref().map(|labels| {
            self.observations
                .iter()
                .zip(labels)
                .filter(|(_, l)| **l == EdgeLabel::Bad)
                .map(|(o, _)| (o.i, o.j))
                .collect()
        })
    }

    /// True when every vertex is reachable from vertex 0 along observations.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for o in &self.observations {
            adj[o.i].push(o.j);
            adj[o.j].push(o.i);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

/// Decomposition of a deformed edge against its reference: a relative
/// parallel stretch, a rotational magnitude, and (when the rotation is
/// nonzero) the unit direction of the rotational component, orthogonal to
/// the reference edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDecomposition {
    pub delta: f64,
    pub eta: f64,
    /// Absent when `eta == 0`: any orthogonal unit vector would do, so none
    /// is singled out.
    pub s: Option<Vec<f64>>,
}

/// Result of least-squares alignment of one shape onto another:
/// `t_i ~ alpha * (t0_i + w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeAlignment {
    pub alpha: f64,
    pub w: Vec<f64>,
    /// Frobenius norm of the mismatch at the optimum; zero exactly when the
    /// shapes are related by the fitted translation and scale.
    pub residual: f64,
}

impl ShapeAlignment {
    /// Shape equivalence demands a positive scale; a negative optimum means
    /// the best fit is a reflected/negated copy.
    pub fn is_positive_scale(&self) -> bool {
        self.alpha > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_flag_tracks_mean() {
        let set = LocationSet::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert!(set.is_centered());
        let set = LocationSet::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(!set.is_centered());
        assert!(set.centered().is_centered());
    }

    #[test]
    fn single_zero_point_counts_as_centered() {
        let set = LocationSet::new(3, vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(set.is_centered());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        assert!(LocationSet::new(2, vec![vec![1.0, 2.0, 3.0]]).is_err());
        assert!(LocationSet::new(2, vec![]).is_err());
    }

    #[test]
    fn observation_set_rejects_bad_edges() {
        let unit = vec![1.0, 0.0];
        let obs = |i, j| Observation {
            i,
            j,
            direction: unit.clone(),
        };
        assert!(ObservationSet::new(3, 2, vec![obs(1, 1)], None).is_err());
        assert!(ObservationSet::new(3, 2, vec![obs(1, 0)], None).is_err());
        assert!(ObservationSet::new(3, 2, vec![obs(0, 1), obs(0, 1)], None).is_err());
        assert!(ObservationSet::new(3, 2, vec![obs(0, 3)], None).is_err());
        let nonunit = Observation {
            i: 0,
            j: 1,
            direction: vec![1.0, 1.0],
        };
        assert!(ObservationSet::new(3, 2, vec![nonunit], None).is_err());
        assert!(ObservationSet::new(
            3,
            2,
            vec![obs(0, 1), obs(1, 2)],
            Some(vec![EdgeLabel::Good])
        )
        .is_err());
    }

    #[test]
    fn connectivity_detects_split_components() {
        let unit = vec![1.0, 0.0];
        let obs = |i, j| Observation {
            i,
            j,
            direction: unit.clone(),
        };
        let connected = ObservationSet::new(3, 2, vec![obs(0, 1), obs(1, 2)], None).unwrap();
        assert!(connected.is_connected());
        let split = ObservationSet::new(4, 2, vec![obs(0, 1), obs(2, 3)], None).unwrap();
        assert!(!split.is_connected());
    }
}
