//! Small dense-vector helpers shared by the geometry and solver modules.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// `dst += c * src`
pub fn axpy(dst: &mut [f64], c: f64, src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d += c * s;
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Returns `a / ||a||`, or `None` when `||a||` is zero.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n == 0.0 {
        None
    } else {
        Some(scaled(a, 1.0 / n))
    }
}

/// Norm of the component of `h` orthogonal to `w`. A zero `w` spans nothing,
/// so the projector is the identity and the result is `||h||`.
pub fn perp_norm(h: &[f64], w: &[f64]) -> f64 {
    let nw = norm(w);
    if nw == 0.0 {
        return norm(h);
    }
    let c = dot(h, w) / (nw * nw);
    h.iter()
        .zip(w)
        .map(|(hi, wi)| {
            let r = hi - c * wi;
            r * r
        })
        .sum::<f64>()
        .sqrt()
        .min(norm(h))
}

/// Norm of the component of `h` orthogonal to `span{a, b}`.
///
/// Computes the explicit residual of a Gram-Schmidt projection (with one
/// re-orthogonalization pass) rather than the cancellation-prone
/// `sqrt(||h||^2 - p1^2 - p2^2)` form, so small results carry absolute error
/// near machine epsilon. Degenerate spans collapse gracefully: if `a` and
/// `b` are parallel (or one is zero) the span is the line through the longer
/// of the two, and if both are zero the projector is the identity.
pub fn perp_span2_norm(h: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let (first, second) = if na >= nb { (a, b) } else { (b, a) };
    let nf = norm(first);
    if nf == 0.0 {
        return norm(h);
    }
    let q1: Vec<f64> = scaled(first, 1.0 / nf);
    // Gram-Schmidt the second vector against the first.
    let mut q2: Vec<f64> = second.to_vec();
    let c = dot(&q2, &q1);
    axpy(&mut q2, -c, &q1);
    let n2 = norm(&q2);

    let mut r = h.to_vec();
    let c1 = dot(&r, &q1);
    axpy(&mut r, -c1, &q1);
    // Treat a nearly dependent pair as a one-dimensional span.
    if n2 > 1e-13 * nf.max(norm(second)) {
        let q2: Vec<f64> = scaled(&q2, 1.0 / n2);
        let c2 = dot(&r, &q2);
        axpy(&mut r, -c2, &q2);
        let c2b = dot(&r, &q2);
        axpy(&mut r, -c2b, &q2);
    }
    let c1b = dot(&r, &q1);
    axpy(&mut r, -c1b, &q1);
    norm(&r)
}
