//! Deterministic recovery-condition measurement and executable oracles for
//! the geometric inequalities underpinning exact recovery.
//!
//! Two condition suites exist: a high-dimensional one (uniform angle and
//! length bounds over all triples/pairs) and a three-dimensional one (angle
//! bounds holding for all but a small fraction of triples, one-sided length
//! bound against the mean edge length). Both share graph typicality,
//! per-vertex corruption fractions, and a well-distributedness constant
//! estimated by a certified circle-grid search in 3D.

use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{check_p_typical, Graph, TypicalityReport};
use crate::linalg::{dist, dot, norm, normalized, perp_norm, perp_span2_norm, sub};
use crate::rng::Rng;
use crate::types::LocationSet;

/// Grid size used by the report builders when none is given.
pub const DEFAULT_WELL_DIST_GRID: usize = 512;

/// Fixed seed for the uncertified Monte Carlo fallback; the estimate is a
/// pure function of its arguments.
const MONTE_CARLO_SEED: u64 = 0x57e1_1a00_cafe_f00d;

/// A lower-bound estimate of a well-distributedness constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellDistEstimate {
    pub value: f64,
    /// True when the value is a certified lower bound (3D circle grid with
    /// Lipschitz slack); false for the Monte Carlo fallback in other
    /// dimensions, which may overestimate.
    pub certified: bool,
}

/// Estimates the largest `c` such that for every direction `h`,
/// `sum_t ||P_{span{t-x, t-y}_perp}(h)|| >= c |T| ||P_{(x-y)_perp}(h)||`.
///
/// Both sides only see the component of `h` orthogonal to `x - y` (the span
/// always contains `x - y`), and each summand is 1-Lipschitz in `h`, so in
/// 3D the minimum over the unit circle in `(x-y)_perp` evaluated on `k`
/// uniformly spaced grid directions, minus the `pi/k` grid slack and clamped
/// at zero, is a certified lower bound. For `d != 3` the minimum is taken
/// over `k` random unit directions in `(x-y)_perp` instead and flagged
/// uncertified.
///
/// Points of `t_sub` lying on the line through `x` and `y` span only that
/// line, whose orthogonal complement contains all admissible `h`; such terms
/// contribute `||h||`.
pub fn estimate_well_distributed_constant(
    t_sub: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
    k: usize,
) -> Result<WellDistEstimate> {
    let d = x.len();
    if y.len() != d || t_sub.iter().any(|t| t.len() != d) {
        return Err(Error::InvalidInput(
            "well-distributedness inputs have mismatched dimensions".into(),
        ));
    }
    if t_sub.is_empty() {
        return Err(Error::InvalidInput(
            "well-distributedness needs a nonempty point set".into(),
        ));
    }
    if k < 16 {
        return Err(Error::InvalidInput(format!("grid size {k} below 16")));
    }
    let axis = sub(x, y);
    let axis_unit = normalized(&axis)
        .ok_or_else(|| Error::DegenerateInput("x and y coincide".into()))?;

    let f = |h: &[f64]| -> f64 {
        let total: f64 = t_sub
            .iter()
            .map(|t| perp_span2_norm(h, &sub(t, x), &sub(t, y)))
            .sum();
        total / t_sub.len() as f64
    };

    if d == 3 {
        let (b1, b2) = plane_basis(&axis_unit);
        let mut min_val = f64::INFINITY;
        for m in 0..k {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / k as f64;
            let (s, c) = theta.sin_cos();
            let h: Vec<f64> = (0..3).map(|c_| c * b1[c_] + s * b2[c_]).collect();
            min_val = min_val.min(f(&h));
        }
        let slack = std::f64::consts::PI / k as f64;
        Ok(WellDistEstimate {
            value: (min_val - slack).max(0.0),
            certified: true,
        })
    } else {
        let mut rng = Rng::from_seed(MONTE_CARLO_SEED);
        let mut min_val = f64::INFINITY;
        let mut drawn = 0;
        while drawn < k {
            let mut h = rng.gaussian_vector(d);
            let c = dot(&h, &axis_unit);
            for (hc, ac) in h.iter_mut().zip(&axis_unit) {
                *hc -= c * ac;
            }
            let n = norm(&h);
            if n < 1e-12 {
                continue;
            }
            for hc in h.iter_mut() {
                *hc /= n;
            }
            min_val = min_val.min(f(&h));
            drawn += 1;
        }
        Ok(WellDistEstimate {
            value: min_val.max(0.0),
            certified: false,
        })
    }
}

/// Orthonormal basis of the plane orthogonal to the unit vector `u` in R^3.
fn plane_basis(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    // Cross with the axis of smallest overlap for stability.
    let pick = (0..3)
        .min_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap())
        .unwrap();
    let mut e = vec![0.0; 3];
    e[pick] = 1.0;
    let b1 = normalized(&cross3(u, &e)).expect("axis chosen non-parallel");
    let b2 = normalized(&cross3(u, &b1)).expect("orthogonal frame");
    (b1, b2)
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionVariant {
    #[serde(rename = "highd")]
    HighDim,
    #[serde(rename = "3d")]
    ThreeDim,
}

/// Measured recovery-condition constants with pass/fail against the
/// corresponding thresholds.
///
/// Field meanings depend on the variant: for `HighDim`, `beta` is the
/// measured minimum angle constant over all triples, `c0` the min/max
/// pairwise-length ratio, and `epsilon` the per-vertex corruption fraction
/// checked against `threshold`. For `ThreeDim`, `beta` is the caller-chosen
/// angle target, `epsilon1` the measured fraction of triples violating it,
/// `c0` the max pairwise length over the mean observed edge length, and
/// `epsilon0` the corruption fraction; `epsilon0`/`epsilon1` are checked
/// against `threshold`/`epsilon1_threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub theorem: ConditionVariant,
    pub p_typical: TypicalityReport,
    pub beta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c1_certified: bool,
    pub epsilon: Option<f64>,
    pub epsilon0: Option<f64>,
    pub epsilon1: Option<f64>,
    pub mu: f64,
    pub mu_inf: f64,
    pub threshold: f64,
    pub epsilon1_threshold: Option<f64>,
    /// Headroom `epsilon / threshold` (infinite when the threshold is zero).
    pub epsilon_ratio: f64,
    pub locations_distinct: bool,
    pub no_collinear_triple: Option<bool>,
    pub passes: bool,
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "theorem: {}",
            match self.theorem {
                ConditionVariant::HighDim => "highd",
                ConditionVariant::ThreeDim => "3d",
            }
        )?;
        writeln!(f, "p_typical: {}", self.p_typical.is_p_typical)?;
        writeln!(f, "connected: {}", self.p_typical.connected)?;
        writeln!(
            f,
            "degrees: [{}, {}]",
            self.p_typical.min_degree, self.p_typical.max_degree
        )?;
        writeln!(
            f,
            "codegrees: [{}, {}]",
            self.p_typical.min_codegree, self.p_typical.max_codegree
        )?;
        writeln!(f, "beta: {:.6e}", self.beta)?;
        writeln!(f, "c0: {:.6e}", self.c0)?;
        writeln!(f, "c1: {:.6e} (certified: {})", self.c1, self.c1_certified)?;
        if let Some(e) = self.epsilon {
            writeln!(f, "epsilon: {e:.6e}")?;
        }
        if let Some(e) = self.epsilon0 {
            writeln!(f, "epsilon0: {e:.6e}")?;
        }
        if let Some(e) = self.epsilon1 {
            writeln!(f, "epsilon1: {e:.6e}")?;
        }
        writeln!(f, "mu: {:.6e}", self.mu)?;
        writeln!(f, "mu_inf: {:.6e}", self.mu_inf)?;
        writeln!(f, "threshold: {:.6e}", self.threshold)?;
        if let Some(t) = self.epsilon1_threshold {
            writeln!(f, "epsilon1_threshold: {t:.6e}")?;
        }
        writeln!(f, "epsilon_ratio: {:.6e}", self.epsilon_ratio)?;
        writeln!(f, "locations_distinct: {}", self.locations_distinct)?;
        if let Some(nc) = self.no_collinear_triple {
            writeln!(f, "no_collinear_triple: {nc}")?;
        }
        write!(f, "passes: {}", self.passes)
    }
}

fn validate_condition_inputs(
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
) -> Result<()> {
    if g.n() != t0.n() {
        return Err(Error::InvalidInput(format!(
            "graph has {} vertices, locations {}",
            g.n(),
            t0.n()
        )));
    }
    let edge_set: HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    for &(i, j) in e_b {
        if !edge_set.contains(&(i, j)) {
            return Err(Error::InvalidInput(format!(
                "corrupted edge ({i}, {j}) is not an edge of the graph"
            )));
        }
    }
    Ok(())
}

fn max_bad_degree_fraction(n: usize, e_b: &[(usize, usize)]) -> f64 {
    let mut deg = vec![0usize; n];
    for &(i, j) in e_b {
        deg[i] += 1;
        deg[j] += 1;
    }
    deg.into_iter().max().unwrap_or(0) as f64 / n as f64
}

fn pair_length_stats(t0: &LocationSet, g: &Graph) -> (f64, f64, f64) {
    let n = t0.n();
    let mut min_pair = f64::INFINITY;
    let mut max_pair: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let l = dist(t0.point(i), t0.point(j));
            min_pair = min_pair.min(l);
            max_pair = max_pair.max(l);
        }
    }
    let mu = if g.edge_count() == 0 {
        0.0
    } else {
        g.edges()
            .iter()
            .map(|&(i, j)| dist(t0.point(i), t0.point(j)))
            .sum::<f64>()
            / g.edge_count() as f64
    };
    (min_pair, max_pair, mu)
}

/// Minimum well-distributedness constant of the common-neighbor point sets
/// over all vertex pairs. Pairs with no common neighbors impose no
/// constraint and are skipped; pairs with coincident endpoints are skipped
/// too (they already fail the distinctness condition).
fn well_distributed_along_graph(
    t0: &LocationSet,
    g: &Graph,
    k_grid: usize,
) -> Result<(f64, bool)> {
    let n = t0.n();
    let adj = g.adjacency();
    let mut c1 = f64::INFINITY;
    let mut certified = true;
    let mut saw_any = false;
    for i in 0..n {
        for j in (i + 1)..n {
            let common = Graph::common_neighbors(&adj, i, j);
            if common.is_empty() {
                continue;
            }
            if dist(t0.point(i), t0.point(j)) == 0.0 {
                continue;
            }
            let points: Vec<Vec<f64>> =
                common.iter().map(|&k| t0.point(k).to_vec()).collect();
            let est = estimate_well_distributed_constant(
                &points,
                t0.point(i),
                t0.point(j),
                k_grid,
            )?;
            saw_any = true;
            certified &= est.certified;
            c1 = c1.min(est.value);
        }
    }
    if !saw_any {
        return Ok((0.0, false));
    }
    Ok((c1, certified))
}

/// Measures the high-dimensional recovery conditions and compares the
/// corruption fraction against the recovery threshold
/// `beta * c0 * c1^2 * p^4 / (3 * 256 * 64 * 32)`.
pub fn check_highd_conditions(
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
    p: f64,
) -> Result<ConditionReport> {
    check_highd_conditions_with_grid(t0, g, e_b, p, DEFAULT_WELL_DIST_GRID)
}

pub fn check_highd_conditions_with_grid(
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
    p: f64,
    k_grid: usize,
) -> Result<ConditionReport> {
    if t0.dim() < 3 {
        return Err(Error::InvalidInput(
            "high-dimensional conditions need d >= 3".into(),
        ));
    }
    validate_condition_inputs(t0, g, e_b)?;
    let n = t0.n();
    let p_typical = check_p_typical(g, p)?;

    // Condition 6: all locations distinct (duplicates are reported, not
    // thrown).
    let (min_pair, max_pair, mu) = pair_length_stats(t0, g);
    let distinct = min_pair > 0.0;

    // Condition 2: minimum over all triples sharing an apex.
    let mut beta: f64 = 1.0;
    'beta: for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let tij = t0.diff(i, j);
            let nij = norm(&tij);
            if nij == 0.0 {
                continue;
            }
            for k in (j + 1)..n {
                if k == i {
                    continue;
                }
                let tik = t0.diff(i, k);
                let nik = norm(&tik);
                if nik == 0.0 {
                    continue;
                }
                let cos = dot(&tij, &tik) / (nij * nik);
                let val = (1.0 - cos * cos).max(0.0).sqrt();
                if val < beta {
                    beta = val;
                    if beta == 0.0 {
                        break 'beta;
                    }
                }
            }
        }
    }

    // Condition 3.
    let c0 = if max_pair > 0.0 { min_pair / max_pair } else { 0.0 };
    // Condition 4.
    let epsilon = max_bad_degree_fraction(n, e_b);
    // Condition 5.
    let (c1, c1_certified) = well_distributed_along_graph(t0, g, k_grid)?;

    let threshold = beta * c0 * c1 * c1 * p.powi(4) / (3.0 * 256.0 * 64.0 * 32.0);
    let passes = p_typical.is_p_typical
        && distinct
        && beta > 0.0
        && c0 > 0.0
        && c1 > 0.0
        && epsilon <= threshold;

    Ok(ConditionReport {
        theorem: ConditionVariant::HighDim,
        p_typical,
        beta,
        c0,
        c1,
        c1_certified,
        epsilon: Some(epsilon),
        epsilon0: None,
        epsilon1: None,
        mu,
        mu_inf: max_pair,
        threshold,
        epsilon1_threshold: None,
        epsilon_ratio: epsilon / threshold,
        locations_distinct: distinct,
        no_collinear_triple: None,
        passes,
    })
}

/// Measures the three-dimensional recovery conditions at a caller-chosen
/// angle target `beta_target`, with thresholds
/// `epsilon0 <= beta * c1^2 * p^4 / (32 * 3 * 64 * 1024 * c0^2)` and
/// `epsilon1 <= p / (192 * c0)`.
pub fn check_threed_conditions(
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
    p: f64,
    beta_target: f64,
) -> Result<ConditionReport> {
    check_threed_conditions_with_grid(t0, g, e_b, p, beta_target, DEFAULT_WELL_DIST_GRID)
}

pub fn check_threed_conditions_with_grid(
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
    p: f64,
    beta_target: f64,
    k_grid: usize,
) -> Result<ConditionReport> {
    if t0.dim() != 3 {
        return Err(Error::InvalidInput(
            "three-dimensional conditions need d = 3".into(),
        ));
    }
    if !(beta_target > 0.0 && beta_target <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "beta target {beta_target} outside (0, 1]"
        )));
    }
    validate_condition_inputs(t0, g, e_b)?;
    let n = t0.n();
    let p_typical = check_p_typical(g, p)?;
    let (min_pair, max_pair, mu) = pair_length_stats(t0, g);
    let distinct = min_pair > 0.0;

    // Condition 2: per pair (i, j), count indices k whose angle at either
    // endpoint falls below the target. Coincident points make the angle
    // undefined and count as violations.
    let beta_sq = beta_target * beta_target;
    let mut worst_violations = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let tij = t0.diff(i, j);
            let nij = norm(&tij);
            let mut violations = 0usize;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let bad = if nij == 0.0 {
                    true
                } else {
                    let tik = t0.diff(i, k);
                    let tjk = t0.diff(j, k);
                    let (nik, njk) = (norm(&tik), norm(&tjk));
                    if nik == 0.0 || njk == 0.0 {
                        true
                    } else {
                        let ci = dot(&tij, &tik) / (nij * nik);
                        let cj = dot(&tij, &tjk) / (nij * njk);
                        (1.0 - ci * ci) < beta_sq || (1.0 - cj * cj) < beta_sq
                    }
                };
                if bad {
                    violations += 1;
                }
            }
            worst_violations = worst_violations.max(violations);
        }
    }
    let epsilon1 = worst_violations as f64 / n as f64;

    // Condition 3: one-sided length bound against the mean edge length.
    let c0 = if mu > 0.0 { max_pair / mu } else { f64::INFINITY };
    // Condition 4.
    let epsilon0 = max_bad_degree_fraction(n, e_b);
    // Condition 5.
    let (c1, c1_certified) = well_distributed_along_graph(t0, g, k_grid)?;
    // Condition 6: no collinear triple.
    let no_collinear = !has_collinear_triple(t0);

    let threshold =
        beta_target * c1 * c1 * p.powi(4) / (32.0 * 3.0 * 64.0 * 1024.0 * c0 * c0);
    let epsilon1_threshold = p / (192.0 * c0);
    let passes = p_typical.is_p_typical
        && no_collinear
        && c1 > 0.0
        && epsilon0 <= threshold
        && epsilon1 <= epsilon1_threshold;

    Ok(ConditionReport {
        theorem: ConditionVariant::ThreeDim,
        p_typical,
        beta: beta_target,
        c0,
        c1,
        c1_certified,
        epsilon: None,
        epsilon0: Some(epsilon0),
        epsilon1: Some(epsilon1),
        mu,
        mu_inf: max_pair,
        threshold,
        epsilon1_threshold: Some(epsilon1_threshold),
        epsilon_ratio: epsilon0 / threshold,
        locations_distinct: distinct,
        no_collinear_triple: Some(no_collinear),
        passes,
    })
}

fn has_collinear_triple(t0: &LocationSet) -> bool {
    let n = t0.n();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = t0.diff(j, i);
            let na = norm(&a);
            for k in (j + 1)..n {
                let b = t0.diff(k, i);
                let nb = norm(&b);
                if na == 0.0 || nb == 0.0 {
                    return true;
                }
                let area = norm(&cross3(&a, &b));
                if area <= 1e-12 * na * nb {
                    return true;
                }
            }
        }
    }
    false
}

fn delta_tilde(points: &[Vec<f64>], motions: &[Vec<f64>], alpha: f64, i: usize, j: usize) -> f64 {
    let tij = sub(&points[i], &points[j]);
    let nij = norm(&tij);
    let vij = sub(&motions[i], &motions[j]);
    let mut num = 0.0;
    for c in 0..tij.len() {
        num += (vij[c] - alpha * tij[c]) * tij[c] / nij;
    }
    num / nij
}

fn check_motion_inputs(points: &[Vec<f64>], motions: &[Vec<f64>], count: usize) -> Result<()> {
    if points.len() != count || motions.len() != count {
        return Err(Error::InvalidInput(format!(
            "expected {count} points and {count} motion vectors"
        )));
    }
    let d = points[0].len();
    if d < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    if points.iter().any(|p| p.len() != d) || motions.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidInput("mismatched dimensions".into()));
    }
    for i in 0..count {
        for j in (i + 1)..count {
            if dist(&points[i], &points[j]) == 0.0 {
                return Err(Error::DegenerateInput(format!(
                    "points {i} and {j} coincide"
                )));
            }
        }
    }
    Ok(())
}

/// Rotation bound for a triangle under unequal parallel stretch: returns
/// the total rotational motion over the three edges (lhs) and the lower
/// bound forced by the stretch difference between the two edges at vertex 0
/// (rhs). The inequality `lhs >= rhs` holds for all inputs.
pub fn rigidity_triangle_gap(
    points: &[Vec<f64>],
    motions: &[Vec<f64>],
    alpha: f64,
) -> Result<(f64, f64)> {
    check_motion_inputs(points, motions, 3)?;
    let mut lhs = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            lhs += perp_norm(&sub(&motions[i], &motions[j]), &sub(&points[i], &points[j]));
        }
    }
    let t01 = sub(&points[0], &points[1]);
    let t12 = sub(&points[1], &points[2]);
    let cos = dot(&t01, &t12) / (norm(&t01) * norm(&t12));
    let sine = (1.0 - cos * cos).max(0.0).sqrt();
    let d01 = delta_tilde(points, motions, alpha, 0, 1);
    let d02 = delta_tilde(points, motions, alpha, 0, 2);
    let rhs = sine * norm(&t01) * (d01 - d02).abs();
    Ok((lhs, rhs))
}

/// Rotation bound for a tetrahedron under unequal parallel stretch of the
/// two disjoint edges (0,1) and (2,3): lhs sums rotational motion over all
/// six edges; rhs is `(beta / 4) * ||t01|| * |delta01 - delta23|` where
/// `beta` is the minimum angle constant over the admissible triples
/// (those not measuring the angle subtended by the pair {0, 1}).
pub fn rigidity_tetrahedron_gap(
    points: &[Vec<f64>],
    motions: &[Vec<f64>],
    alpha: f64,
) -> Result<(f64, f64)> {
    check_motion_inputs(points, motions, 4)?;
    let mut lhs = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            lhs += perp_norm(&sub(&motions[i], &motions[j]), &sub(&points[i], &points[j]));
        }
    }
    let mut beta = f64::INFINITY;
    for i in 0..4 {
        for j in 0..4 {
            if j == i {
                continue;
            }
            for k in (j + 1)..4 {
                if k == i {
                    continue;
                }
                if (j, k) == (0, 1) {
                    continue;
                }
                let tij = sub(&points[i], &points[j]);
                let tik = sub(&points[i], &points[k]);
                let cos = dot(&tij, &tik) / (norm(&tij) * norm(&tik));
                beta = beta.min((1.0 - cos * cos).max(0.0).sqrt());
            }
        }
    }
    let d01 = delta_tilde(points, motions, alpha, 0, 1);
    let d23 = delta_tilde(points, motions, alpha, 2, 3);
    let t01 = sub(&points[0], &points[1]);
    let rhs = beta / 4.0 * norm(&t01) * (d01 - d23).abs();
    Ok((lhs, rhs))
}

/// Rotation propagation through the triangles over a common pair: lhs sums
/// the two-leg rotational motions through every non-excluded apex, rhs is
/// `(c k - |X|)` times the direct rotational motion between `x` and `y`.
/// Valid whenever `c` is a true well-distributedness constant for
/// `(t_sub, x, y)`.
pub fn triangles_inequality_gap(
    x: &[f64],
    y: &[f64],
    t_sub: &[Vec<f64>],
    h_x: &[f64],
    h_y: &[f64],
    h_sub: &[Vec<f64>],
    excluded: &[usize],
    c: f64,
) -> Result<(f64, f64)> {
    let d = x.len();
    let k = t_sub.len();
    if y.len() != d
        || h_x.len() != d
        || h_y.len() != d
        || t_sub.iter().any(|t| t.len() != d)
        || h_sub.iter().any(|h| h.len() != d)
    {
        return Err(Error::InvalidInput("mismatched dimensions".into()));
    }
    if d < 3 {
        return Err(Error::InvalidInput(
            "triangle propagation needs d >= 3".into(),
        ));
    }
    if h_sub.len() != k {
        return Err(Error::InvalidInput(
            "one motion vector per point required".into(),
        ));
    }
    let mut excluded_set = HashSet::new();
    for &i in excluded {
        if i >= k || !excluded_set.insert(i) {
            return Err(Error::InvalidInput(format!(
                "excluded index {i} is not a valid subset element"
            )));
        }
    }
    let mut lhs = 0.0;
    for i in 0..k {
        if excluded_set.contains(&i) {
            continue;
        }
        lhs += perp_norm(&sub(h_x, &h_sub[i]), &sub(x, &t_sub[i]));
        lhs += perp_norm(&sub(&h_sub[i], h_y), &sub(&t_sub[i], y));
    }
    let rhs =
        (c * k as f64 - excluded.len() as f64) * perp_norm(&sub(h_x, h_y), &sub(x, y));
    Ok((lhs, rhs))
}

/// Rotational-motion sums of a deformation `t` against reference `t0`:
/// over the labeled-good edges, the labeled-bad edges, and every vertex
/// pair of the complete graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaTransferSums {
    pub sum_eta_good: f64,
    pub sum_eta_bad: f64,
    pub sum_eta_complete: f64,
}

pub fn eta_transfer_diagnostics(
    t: &LocationSet,
    t0: &LocationSet,
    g: &Graph,
    e_b: &[(usize, usize)],
) -> Result<EtaTransferSums> {
    if t.dim() != t0.dim() || t.n() != t0.n() {
        return Err(Error::InvalidInput(
            "deformed and reference sets must agree on n and d".into(),
        ));
    }
    validate_condition_inputs(t0, g, e_b)?;
    let n = t0.n();
    let bad: HashSet<(usize, usize)> = e_b.iter().copied().collect();
    let graph_edges: HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    let mut sums = EtaTransferSums {
        sum_eta_good: 0.0,
        sum_eta_bad: 0.0,
        sum_eta_complete: 0.0,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let ref_edge = t0.diff(i, j);
            if norm(&ref_edge) == 0.0 {
                return Err(Error::DegenerateInput(format!(
                    "reference points {i} and {j} coincide"
                )));
            }
            let eta = perp_norm(&t.diff(i, j), &ref_edge);
            sums.sum_eta_complete += eta;
            if graph_edges.contains(&(i, j)) {
                if bad.contains(&(i, j)) {
                    sums.sum_eta_bad += eta;
                } else {
                    sums.sum_eta_good += eta;
                }
            }
        }
    }
    Ok(sums)
}
