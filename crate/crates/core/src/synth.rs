//! Synthetic instance generation: Gaussian ground-truth locations, the
//! random corruption/noise model, and adversarial corrupted-edge-set
//! construction under a per-vertex degree cap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::rng::{mix_seed, Rng};
use crate::types::{EdgeLabel, LocationSet, Observation, ObservationSet};

const STREAM_EDGE_DECISIONS: u64 = 1;
const STREAM_DIRECTIONS: u64 = 2;
const STREAM_SELECTION: u64 = 3;

/// Per-edge Bernoulli corruption with optional direction noise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorruptionConfig {
    /// Probability that an observation is replaced by a uniformly random
    /// unit vector.
    pub q: f64,
    /// Noise scale added to uncorrupted directions before renormalization.
    pub sigma: f64,
    pub seed: u64,
}

impl CorruptionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::InvalidInput(format!(
                "corruption probability {} outside [0, 1]",
                self.q
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "noise scale {} must be nonnegative",
                self.sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryStrategy {
    /// Corrupted edges point in uniformly random directions.
    Random,
    /// Corrupted edges incident to the victim vertex all point toward one
    /// fake location, mimicking a self-consistent alternative placement.
    SelfConsistent,
}

/// Adversarial corrupted-edge-set construction with a per-vertex cap of
/// `floor(gamma * n)` corrupted edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub gamma: f64,
    pub strategy: AdversaryStrategy,
    pub seed: u64,
    /// Alternative location used by the self-consistent strategy.
    pub fake_location: Option<Vec<f64>>,
}

impl AdversaryConfig {
    /// Validates ranges; returns a warning when `gamma` exceeds the
    /// information-theoretic well-posedness limit of 1/2.
    pub fn validate(&self) -> Result<Option<String>> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidInput(format!(
                "degree-cap fraction {} outside [0, 1)",
                self.gamma
            )));
        }
        if self.strategy == AdversaryStrategy::SelfConsistent && self.fake_location.is_none() {
            return Err(Error::InvalidInput(
                "self-consistent strategy needs a fake location".into(),
            ));
        }
        Ok(if self.gamma >= 0.5 {
            Some(format!(
                "gamma = {} is at or above 1/2; recovery is information-theoretically \
                 impossible against a worst-case adversary",
                self.gamma
            ))
        } else {
            None
        })
    }
}

/// Draws `n` i.i.d. standard Gaussian points in `R^d` and subtracts the
/// empirical mean. Deterministic per seed; the output is flagged centered.
pub fn sample_gaussian_locations(n: usize, d: usize, seed: u64) -> Result<LocationSet> {
    if n < 1 {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    if d < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    let mut rng = Rng::from_seed(seed);
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        coords.extend(rng.gaussian_vector(d));
    }
    let set = LocationSet::from_flat(d, coords)?;
    Ok(set.centered())
}

fn exact_direction(t0: &LocationSet, i: usize, j: usize) -> Result<Vec<f64>> {
    let diff = t0.diff(i, j);
    linalg::normalized(&diff).ok_or_else(|| {
        Error::DegenerateInput(format!(
            "edge ({i}, {j}) has coincident endpoint locations"
        ))
    })
}

/// Applies the Bernoulli corruption model to exact directions of `t0` over
/// the edges of `g`: with probability `q` an edge observes a uniformly
/// random unit vector (labeled bad), otherwise the exact direction plus
/// `sigma` times that same random vector, renormalized (labeled good).
///
/// Edge decisions and direction draws come from separate streams derived
/// from the seed, so changing `sigma` never changes which edges are
/// corrupted and reuses the same noise vectors — sweeps over `sigma` are
/// paired.
pub fn corrupt_observations(
    t0: &LocationSet,
    g: &Graph,
    cfg: &CorruptionConfig,
) -> Result<ObservationSet> {
    cfg.validate()?;
    if g.n() != t0.n() {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices, locations {}",
            g.n(),
            t0.n()
        )));
    }
    let d = t0.dim();
    let mut decide = Rng::from_seed(mix_seed(&[cfg.seed, STREAM_EDGE_DECISIONS]));
    let mut dirs = Rng::from_seed(mix_seed(&[cfg.seed, STREAM_DIRECTIONS]));
    let mut observations = Vec::with_capacity(g.edge_count());
    let mut labels = Vec::with_capacity(g.edge_count());
    for &(i, j) in g.edges() {
        let bad = decide.next_f64() < cfg.q;
        let z = dirs.unit_vector(d);
        let raw = if bad {
            z
        } else {
            let mut v = exact_direction(t0, i, j)?;
            linalg::axpy(&mut v, cfg.sigma, &z);
            v
        };
        let v = linalg::normalized(&raw).ok_or_else(|| {
            Error::DegenerateInput(format!("edge ({i}, {j}) produced a zero observation"))
        })?;
        observations.push(Observation { i, j, direction: v });
        labels.push(if bad { EdgeLabel::Bad } else { EdgeLabel::Good });
    }
    ObservationSet::new(g.n(), d, observations, Some(labels))
}

/// Builds a corrupted edge set greedily from a random permutation of the
/// edges, admitting an edge only while both endpoints stay within the cap
/// `floor(gamma * n)`, then emits observations: exact directions on good
/// edges, adversarial directions on bad ones.
pub fn adversarial_bad_set(
    t0: &LocationSet,
    g: &Graph,
    cfg: &AdversaryConfig,
) -> Result<ObservationSet> {
    cfg.validate()?;
    if g.n() != t0.n() {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices, locations {}",
            g.n(),
            t0.n()
        )));
    }
    let n = g.n();
    let d = t0.dim();
    let cap = (cfg.gamma * n as f64).floor() as usize;

    // Vertex 0 is the designated victim for the self-consistent strategy.
    let victim = 0usize;
    let fake = cfg.fake_location.as_deref();
    if let Some(w) = fake {
        if w.len() != d {
            return Err(Error::InvalidInput(
                "fake location dimension mismatch".into(),
            ));
        }
        for (k, p) in t0.iter().enumerate() {
            if linalg::dist(w, p) == 0.0 {
                return Err(Error::DegenerateInput(format!(
                    "fake location coincides with point {k}"
                )));
            }
        }
    }

    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    let mut select = Rng::from_seed(mix_seed(&[cfg.seed, STREAM_SELECTION]));
    select.shuffle(&mut order);

    let mut deg_b = vec![0usize; n];
    let mut is_bad = vec![false; g.edge_count()];
    for &e in &order {
        let (i, j) = g.edges()[e];
        if deg_b[i] < cap && deg_b[j] < cap {
            // Self-consistent corruption only makes sense at the victim.
            if cfg.strategy == AdversaryStrategy::SelfConsistent && i != victim && j != victim {
                continue;
            }
            is_bad[e] = true;
            deg_b[i] += 1;
            deg_b[j] += 1;
        }
    }

    let mut dirs = Rng::from_seed(mix_seed(&[cfg.seed, STREAM_DIRECTIONS]));
    let mut observations = Vec::with_capacity(g.edge_count());
    let mut labels = Vec::with_capacity(g.edge_count());
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let v = if !is_bad[e] {
            exact_direction(t0, i, j)?
        } else {
            match cfg.strategy {
                AdversaryStrategy::Random => dirs.unit_vector(d),
                AdversaryStrategy::SelfConsistent => {
                    let w = fake.expect("validated above");
                    // Direction consistent with the victim sitting at w.
                    let raw = if i == victim {
                        linalg::sub(w, t0.point(j))
                    } else {
                        linalg::sub(t0.point(i), w)
                    };
                    linalg::normalized(&raw).expect("fake location checked distinct")
                }
            }
        };
        observations.push(Observation { i, j, direction: v });
        labels.push(if is_bad[e] {
            EdgeLabel::Bad
        } else {
            EdgeLabel::Good
        });
    }
    ObservationSet::new(n, d, observations, Some(labels))
}
