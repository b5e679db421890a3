//! Exact geometric primitives: orthogonal projection, the recovery
//! objective and scale constraint, edge deformation decomposition, shape
//! alignment, and the relative-error metric used by the experiments.
//!
//! Everything here is a pure function over immutable inputs.

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;
use crate::types::{EdgeDecomposition, LocationSet, ObservationSet, ShapeAlignment};

fn check_pair(t: &LocationSet, obs: &ObservationSet) -> Result<()> {
    if t.dim() != obs.dim() {
        return Err(Error::InvalidInput(format!(
            "locations have dimension {}, observations {}",
            t.dim(),
            obs.dim()
        )));
    }
    if t.n() != obs.n() {
        return Err(Error::InvalidInput(format!(
            "locations have {} points, observations expect {}",
            t.n(),
            obs.n()
        )));
    }
    Ok(())
}

/// Projects `h` onto the orthogonal complement of the unit vector `v`:
/// returns `h - <h, v> v`.
pub fn project_orthogonal(h: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if h.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "cannot project a {}-vector against a {}-vector",
            h.len(),
            v.len()
        )));
    }
    let nv = linalg::norm(v);
    if (nv - 1.0).abs() > tol::UNIT_NORM_TOL {
        return Err(Error::InvalidInput(format!(
            "projection direction has norm {nv}, not unit"
        )));
    }
    let c = linalg::dot(h, v);
    Ok(h.iter().zip(v).map(|(hi, vi)| hi - c * vi).collect())
}

/// Sum over all observed edges of the norm of the displacement component
/// orthogonal to the observed direction. Nonnegative; zero exactly when
/// every edge displacement is parallel to its observation.
pub fn objective_r(t: &LocationSet, obs: &ObservationSet) -> Result<f64> {
    check_pair(t, obs)?;
    let mut total = 0.0;
    for o in obs.iter() {
        let diff = t.diff(o.i, o.j);
        let p = project_orthogonal(&diff, &o.direction)?;
        total += linalg::norm(&p);
    }
    Ok(total)
}

/// Sum over all observed edges of the inner product between the edge
/// displacement and the observed direction.
pub fn constraint_l(t: &LocationSet, obs: &ObservationSet) -> Result<f64> {
    Ok(edge_inner_products(t, obs)?.iter().sum())
}

/// The per-edge inner products `<t_i - t_j, v_ij>`, in observation order.
pub fn edge_inner_products(t: &LocationSet, obs: &ObservationSet) -> Result<Vec<f64>> {
    check_pair(t, obs)?;
    Ok(obs
        .iter()
        .map(|o| linalg::dot(&t.diff(o.i, o.j), &o.direction))
        .collect())
}

/// Splits a deformed edge vector against its reference into a relative
/// parallel stretch and a rotational component:
/// `t_ij = (1 + delta) t0_ij + eta * s` with `s` a unit vector orthogonal
/// to `t0_ij`.
pub fn decompose_edge(t_ij: &[f64], t0_ij: &[f64]) -> Result<EdgeDecomposition> {
    if t_ij.len() != t0_ij.len() {
        return Err(Error::InvalidInput(
            "edge vectors have mismatched dimensions".into(),
        ));
    }
    let n0 = linalg::norm(t0_ij);
    if n0 == 0.0 {
        return Err(Error::DegenerateInput(
            "cannot decompose against a zero reference edge".into(),
        ));
    }
    let delta = linalg::dot(t_ij, t0_ij) / (n0 * n0) - 1.0;
    let unit0 = linalg::scaled(t0_ij, 1.0 / n0);
    let rot = project_orthogonal(t_ij, &unit0)?;
    let eta = linalg::norm(&rot);
    let s = if eta > 0.0 {
        Some(linalg::scaled(&rot, 1.0 / eta))
    } else {
        None
    };
    Ok(EdgeDecomposition { delta, eta, s })
}

/// Least-squares alignment of `t` onto `t0`: the optimal scale and
/// translation minimizing `sum_i || t_i - alpha (t0_i + w) ||^2`,
/// unconstrained in `alpha`.
///
/// The sign of `alpha` is reported rather than forced positive: a negative
/// optimum indicates the best fit is a negated copy, which is diagnostic
/// information in its own right.
pub fn align_shapes(t: &LocationSet, t0: &LocationSet) -> Result<ShapeAlignment> {
    if t.dim() != t0.dim() || t.n() != t0.n() {
        return Err(Error::InvalidInput(
            "shape alignment needs equal point counts and dimensions".into(),
        ));
    }
    let d = t.dim();
    let mean_t = t.mean();
    let mean_t0 = t0.mean();
    // Reduce to the centered problem: with u = alpha * w + alpha * mean_t0
    // absorbed, the optimal scale comes from the centered cross-correlation.
    let mut cross = 0.0;
    let mut norm0_sq = 0.0;
    for i in 0..t.n() {
        for c in 0..d {
            let a = t.point(i)[c] - mean_t[c];
            let b = t0.point(i)[c] - mean_t0[c];
            cross += a * b;
            norm0_sq += b * b;
        }
    }
    if norm0_sq == 0.0 {
        return Err(Error::DegenerateInput(
            "reference shape has all points identical".into(),
        ));
    }
    let alpha = cross / norm0_sq;
    // t_i ~ alpha * t0_i + u with u = mean_t - alpha * mean_t0, so
    // w = u / alpha.
    let w: Vec<f64> = if alpha != 0.0 {
        (0..d)
            .map(|c| (mean_t[c] - alpha * mean_t0[c]) / alpha)
            .collect()
    } else {
        vec![0.0; d]
    };
    // Evaluate the mismatch explicitly at the optimum; the closed-form
    // norm difference cancels catastrophically near exact similarity.
    let u: Vec<f64> = (0..d).map(|c| alpha * w[c]).collect();
    let mut residual_sq = 0.0;
    for i in 0..t.n() {
        for c in 0..d {
            let r = t.point(i)[c] - alpha * t0.point(i)[c] - u[c];
            residual_sq += r * r;
        }
    }
    Ok(ShapeAlignment {
        alpha,
        w,
        residual: residual_sq.sqrt(),
    })
}

/// Frobenius distance between the Frobenius-normalized configurations,
/// after centering both. Invariant to positive rescaling of either
/// argument; ranges over `[0, 2]`.
///
/// Both inputs are centered before normalization because recovered and
/// ground-truth configurations are compared as mean-zero shapes; callers
/// passing uncentered sets get the centered comparison.
pub fn relative_error(t: &LocationSet, t0: &LocationSet) -> Result<f64> {
    if t.dim() != t0.dim() || t.n() != t0.n() {
        return Err(Error::InvalidInput(
            "relative error needs equal point counts and dimensions".into(),
        ));
    }
    let tc = t.centered();
    let t0c = t0.centered();
    let nt = linalg::norm(tc.flat());
    let n0 = linalg::norm(t0c.flat());
    if nt == 0.0 || n0 == 0.0 {
        return Err(Error::DegenerateInput(
            "relative error undefined for a zero-norm configuration".into(),
        ));
    }
    let sum_sq: f64 = tc
        .flat()
        .iter()
        .zip(t0c.flat())
        .map(|(a, b)| {
            let r = a / nt - b / n0;
            r * r
        })
        .sum();
    Ok(sum_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(dim: usize, pts: &[&[f64]]) -> LocationSet {
        LocationSet::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn projection_of_orthogonal_vector_is_identity() {
        let r = project_orthogonal(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(r, vec![1.0, 0.0]);
    }

    #[test]
    fn projection_drops_axis_component() {
        let r = project_orthogonal(&[3.0, 4.0], &[1.0, 0.0]).unwrap();
        assert_eq!(r, vec![0.0, 4.0]);
    }

    #[test]
    fn projection_of_parallel_vector_vanishes() {
        let r = project_orthogonal(&[0.6, 0.8], &[0.6, 0.8]).unwrap();
        assert!(linalg::norm(&r) <= 1e-12);
    }

    #[test]
    fn projection_rejects_bad_inputs() {
        assert!(project_orthogonal(&[1.0, 0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(project_orthogonal(&[1.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn objective_measures_orthogonal_component() {
        let t = loc(2, &[&[0.0, 0.0], &[2.0, 0.0]]);
        let obs = ObservationSet::new(
            2,
            2,
            vec![crate::types::Observation {
                i: 0,
                j: 1,
                direction: vec![0.0, 1.0],
            }],
            None,
        )
        .unwrap();
        assert!((objective_r(&t, &obs).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constraint_reports_signed_alignment() {
        let t = loc(2, &[&[2.0, 0.0], &[0.0, 0.0]]);
        let mk = |v: Vec<f64>| {
            ObservationSet::new(
                2,
                2,
                vec![crate::types::Observation {
                    i: 0,
                    j: 1,
                    direction: v,
                }],
                None,
            )
            .unwrap()
        };
        assert!((constraint_l(&t, &mk(vec![1.0, 0.0])).unwrap() - 2.0).abs() < 1e-15);
        assert!((constraint_l(&t, &mk(vec![-1.0, 0.0])).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_identity_stretch_rotation() {
        let id = decompose_edge(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!(id.delta.abs() < 1e-15 && id.eta.abs() < 1e-15 && id.s.is_none());

        let stretch = decompose_edge(&[2.0, 4.0], &[1.0, 2.0]).unwrap();
        assert!((stretch.delta - 1.0).abs() < 1e-15);
        assert!(stretch.eta.abs() < 1e-15);

        let rot = decompose_edge(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(rot.delta.abs() < 1e-15);
        assert!((rot.eta - 1.0).abs() < 1e-15);
        assert_eq!(rot.s.unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn decompose_rejects_zero_reference() {
        assert!(matches!(
            decompose_edge(&[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn alignment_recovers_exact_similarity() {
        let t0 = loc(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let same = align_shapes(&t0, &t0).unwrap();
        assert!((same.alpha - 1.0).abs() < 1e-12);
        assert!(linalg::norm(&same.w) < 1e-12);
        assert!(same.residual < 1e-12);

        let w0 = [0.5, -0.25];
        let t = t0.transformed(2.0, &w0).unwrap();
        let fit = align_shapes(&t, &t0).unwrap();
        assert!((fit.alpha - 2.0).abs() < 1e-12);
        assert!(linalg::dist(&fit.w, &w0) < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!(fit.is_positive_scale());
    }

    #[test]
    fn alignment_rejects_collapsed_reference() {
        let t = loc(2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let t0 = loc(2, &[&[3.0, 1.0], &[3.0, 1.0]]);
        assert!(matches!(
            align_shapes(&t, &t0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn relative_error_extremes() {
        let t0 = loc(2, &[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 2.0]]);
        assert!(relative_error(&t0, &t0).unwrap() < 1e-15);
        let neg = t0.transformed(-1.0, &[0.0, 0.0]).unwrap();
        assert!((relative_error(&neg, &t0).unwrap() - 2.0).abs() < 1e-12);
        let scaled = t0.transformed(3.0, &[0.0, 0.0]).unwrap();
        assert!(relative_error(&scaled, &t0).unwrap() < 1e-12);
    }

    #[test]
    fn relative_error_rejects_zero_shape() {
        let z = loc(2, &[&[1.0, 1.0], &[1.0, 1.0]]);
        let t0 = loc(2, &[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert!(matches!(
            relative_error(&z, &t0),
            Err(Error::DegenerateInput(_))
        ));
    }
}
