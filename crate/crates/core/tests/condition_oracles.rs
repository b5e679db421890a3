//! Brute-force oracles and randomized property sweeps for the condition
//! checkers and geometric-inequality oracles.

use shapefit::conditions::*;
use shapefit::graph::{sample_erdos_renyi, Graph};
use shapefit::linalg::{dist, dot, norm, normalized, perp_norm, perp_span2_norm, sub};
use shapefit::rng::Rng;
use shapefit::synth::sample_gaussian_locations;
use shapefit::types::LocationSet;

fn random_cloud(rng: &mut Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| rng.gaussian_vector(d)).collect()
}

/// Fine-grid reference for the certified estimator: the K = 512 value must
/// sit within 2*pi/512 of a K = 65536 brute-force minimum.
#[test]
fn estimator_matches_fine_grid_reference() {
    let mut rng = Rng::from_seed(404);
    for trial in 0..5 {
        let t_sub = random_cloud(&mut rng, 20, 3);
        let x = rng.gaussian_vector(3);
        let y = rng.gaussian_vector(3);
        let coarse = estimate_well_distributed_constant(&t_sub, &x, &y, 512).unwrap();
        let fine = estimate_well_distributed_constant(&t_sub, &x, &y, 65_536).unwrap();
        assert!(coarse.certified && fine.certified);
        // Both subtract their own slack; compare the underlying minima.
        let coarse_min = coarse.value + std::f64::consts::PI / 512.0;
        let fine_min = fine.value + std::f64::consts::PI / 65_536.0;
        assert!(
            (coarse_min - fine_min).abs() <= 2.0 * std::f64::consts::PI / 512.0,
            "trial {trial}: coarse {coarse_min} vs fine {fine_min}"
        );
        // The certified value never exceeds the fine-grid minimum.
        assert!(coarse.value <= fine_min + 1e-12);
    }
}

/// The certified bound satisfies the definition on random test directions.
#[test]
fn certified_bound_satisfies_definition() {
    let mut rng = Rng::from_seed(405);
    for _ in 0..10 {
        let t_sub = random_cloud(&mut rng, 12, 3);
        let x = rng.gaussian_vector(3);
        let y = rng.gaussian_vector(3);
        let est = estimate_well_distributed_constant(&t_sub, &x, &y, 512).unwrap();
        assert!(est.certified);
        for _ in 0..1000 {
            let h = rng.unit_vector(3);
            let lhs: f64 = t_sub
                .iter()
                .map(|t| perp_span2_norm(&h, &sub(t, &x), &sub(t, &y)))
                .sum();
            let rhs = est.value * t_sub.len() as f64 * perp_norm(&h, &sub(&x, &y));
            assert!(lhs >= rhs - 1e-10, "definition violated: {lhs} < {rhs}");
        }
    }
}

/// Straight-line re-enumeration of the angle and length constants for the
/// high-dimensional report.
#[test]
fn highd_constants_match_brute_force() {
    let t0 = sample_gaussian_locations(30, 8, 5).unwrap();
    let g = sample_erdos_renyi(30, 0.7, 6).unwrap();
    let rep = check_highd_conditions_with_grid(&t0, &g, &[], 0.7, 64).unwrap();

    let n = t0.n();
    let mut beta = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || i == k || j == k {
                    continue;
                }
                let tij = t0.diff(i, j);
                let tik = t0.diff(i, k);
                let cos = dot(&tij, &tik) / (norm(&tij) * norm(&tik));
                beta = beta.min((1.0 - cos * cos).max(0.0).sqrt());
            }
        }
    }
    let mut min_len = f64::INFINITY;
    let mut max_len: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let l = dist(t0.point(i), t0.point(j));
                min_len = min_len.min(l);
                max_len = max_len.max(l);
            }
        }
    }
    assert_eq!(rep.beta, beta);
    assert_eq!(rep.c0, min_len / max_len);
    assert_eq!(rep.epsilon, Some(0.0));
    assert_eq!(rep.mu_inf, max_len);
}

/// Brute-force triple enumeration of the violation counts behind the 3D
/// angle condition.
#[test]
fn threed_epsilon1_matches_brute_force() {
    let t0 = sample_gaussian_locations(40, 3, 13).unwrap();
    let g = sample_erdos_renyi(40, 0.6, 14).unwrap();
    let beta_target = 0.05;
    let rep =
        check_threed_conditions_with_grid(&t0, &g, &[], 0.6, beta_target, 64).unwrap();

    let n = t0.n();
    let mut worst = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let tij = t0.diff(i, j);
            let mut count = 0usize;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let tik = t0.diff(i, k);
                let tjk = t0.diff(j, k);
                let ci = dot(&tij, &tik) / (norm(&tij) * norm(&tik));
                let cj = dot(&tij, &tjk) / (norm(&tij) * norm(&tjk));
                if (1.0 - ci * ci) < beta_target * beta_target
                    || (1.0 - cj * cj) < beta_target * beta_target
                {
                    count += 1;
                }
            }
            worst = worst.max(count);
        }
    }
    assert_eq!(rep.epsilon1, Some(worst as f64 / n as f64));
}

#[test]
fn equilateral_triangle_has_no_angle_violations() {
    let h = 3.0f64.sqrt() / 2.0;
    let t0 = LocationSet::new(
        3,
        vec![
            vec![1.0, 0.0, 0.0],
            vec![-0.5, h, 0.0],
            vec![-0.5, -h, 0.0],
        ],
    )
    .unwrap();
    let g = sample_erdos_renyi(3, 1.0, 0).unwrap();
    let rep = check_threed_conditions_with_grid(&t0, &g, &[], 1.0, 0.5, 64).unwrap();
    assert_eq!(rep.epsilon1, Some(0.0));
    assert_eq!(rep.epsilon0, Some(0.0));
    assert_eq!(rep.no_collinear_triple, Some(true));
}

#[test]
fn collinear_locations_zero_out_beta() {
    let mut points = vec![
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![2.0, 0.0, 0.0],
    ];
    let mut rng = Rng::from_seed(50);
    for _ in 0..5 {
        points.push(rng.gaussian_vector(3));
    }
    let t0 = LocationSet::new(3, points).unwrap();
    let g = sample_erdos_renyi(8, 1.0, 1).unwrap();
    let rep = check_highd_conditions_with_grid(&t0, &g, &[], 1.0, 64).unwrap();
    assert_eq!(rep.beta, 0.0);
    assert!(!rep.passes);
    let rep3 = check_threed_conditions_with_grid(&t0, &g, &[], 1.0, 0.3, 64).unwrap();
    assert_eq!(rep3.no_collinear_triple, Some(false));
    assert!(!rep3.passes);
}

#[test]
fn duplicate_locations_reported_not_thrown() {
    let mut rng = Rng::from_seed(51);
    let mut points = random_cloud(&mut rng, 6, 3);
    points[3] = points[1].clone();
    let t0 = LocationSet::new(3, points).unwrap();
    let g = sample_erdos_renyi(6, 1.0, 1).unwrap();
    let rep = check_highd_conditions_with_grid(&t0, &g, &[], 1.0, 64).unwrap();
    assert!(!rep.locations_distinct);
    assert!(!rep.passes);
}

/// Condition constants are invariant under translating and positively
/// rescaling the ground truth.
#[test]
fn reports_invariant_under_similarity() {
    let t0 = sample_gaussian_locations(12, 3, 61).unwrap();
    let g = sample_erdos_renyi(12, 0.8, 62).unwrap();
    let e_b = vec![g.edges()[0], g.edges()[3]];
    let moved = t0.transformed(2.0, &[0.4, -1.0, 2.5]).unwrap();

    let a = check_threed_conditions_with_grid(&t0, &g, &e_b, 0.8, 0.2, 128).unwrap();
    let b = check_threed_conditions_with_grid(&moved, &g, &e_b, 0.8, 0.2, 128).unwrap();
    assert!((a.beta - b.beta).abs() <= 1e-9);
    assert!((a.c0 - b.c0).abs() <= 1e-9 * a.c0.max(1.0));
    assert!((a.c1 - b.c1).abs() <= 1e-9);
    assert_eq!(a.epsilon0, b.epsilon0);
    assert_eq!(a.epsilon1, b.epsilon1);
    assert!((a.threshold - b.threshold).abs() <= 1e-9 * a.threshold.max(1e-30));
    assert_eq!(a.passes, b.passes);

    let a2 = check_highd_conditions_with_grid(&t0, &g, &e_b, 0.8, 128).unwrap();
    let b2 = check_highd_conditions_with_grid(&moved, &g, &e_b, 0.8, 128).unwrap();
    assert!((a2.beta - b2.beta).abs() <= 1e-9);
    assert!((a2.c0 - b2.c0).abs() <= 1e-9);
    assert!((a2.c1 - b2.c1).abs() <= 1e-9);
    assert_eq!(a2.epsilon, b2.epsilon);
}

/// The measured angle/length constants do not depend on vertex labels.
#[test]
fn constants_invariant_under_relabeling() {
    let t0 = sample_gaussian_locations(10, 3, 71).unwrap();
    let g = sample_erdos_renyi(10, 0.9, 72).unwrap();
    // A fixed permutation.
    let perm: Vec<usize> = vec![3, 1, 4, 0, 9, 2, 6, 8, 7, 5];
    let permuted_points: Vec<Vec<f64>> = {
        let mut pts = vec![vec![]; 10];
        for i in 0..10 {
            pts[perm[i]] = t0.point(i).to_vec();
        }
        pts
    };
    let t0p = LocationSet::new(3, permuted_points).unwrap();
    let edges_p: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (perm[i], perm[j]);
            (a.min(b), a.max(b))
        })
        .collect();
    let gp = Graph::new(10, edges_p).unwrap();

    let rep = check_highd_conditions_with_grid(&t0, &g, &[], 0.9, 64).unwrap();
    let rep_p = check_highd_conditions_with_grid(&t0p, &gp, &[], 0.9, 64).unwrap();
    assert!((rep.beta - rep_p.beta).abs() <= 1e-12);
    assert!((rep.c0 - rep_p.c0).abs() <= 1e-12);
    assert!((rep.c1 - rep_p.c1).abs() <= 1e-12);
}

/// Randomized sweeps of the rotation-bound oracles; smaller versions of the
/// full acceptance sweeps.
#[test]
fn rigidity_inequalities_hold_on_random_draws() {
    let mut rng = Rng::from_seed(81);
    for d in [2usize, 3, 6] {
        for _ in 0..200 {
            let pts = random_cloud(&mut rng, 4, d);
            let motions = random_cloud(&mut rng, 4, d);
            let alpha = rng.next_gaussian();
            let (lhs, rhs) = rigidity_triangle_gap(&pts[..3], &motions[..3], alpha).unwrap();
            assert!(lhs >= rhs - 1e-10, "triangle d={d}: {lhs} < {rhs}");
            let (lhs, rhs) = rigidity_tetrahedron_gap(&pts, &motions, alpha).unwrap();
            assert!(lhs >= rhs - 1e-10, "tetrahedron d={d}: {lhs} < {rhs}");
        }
    }
}

#[test]
fn triangle_propagation_holds_with_certified_constant() {
    let mut rng = Rng::from_seed(82);
    for _ in 0..20 {
        let t_sub = random_cloud(&mut rng, 8, 3);
        let x = rng.gaussian_vector(3);
        let y = rng.gaussian_vector(3);
        let c = estimate_well_distributed_constant(&t_sub, &x, &y, 256)
            .unwrap()
            .value;
        for _ in 0..25 {
            let h_x = rng.gaussian_vector(3);
            let h_y = rng.gaussian_vector(3);
            let h_sub = random_cloud(&mut rng, 8, 3);
            let excluded: Vec<usize> = (0..8).filter(|_| rng.next_f64() < 0.3).collect();
            let (lhs, rhs) = triangles_inequality_gap(
                &x, &y, &t_sub, &h_x, &h_y, &h_sub, &excluded, c,
            )
            .unwrap();
            assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs}");
        }
    }
}

/// The transfer sums respect the labeled split.
#[test]
fn eta_sums_split_consistently() {
    let mut rng = Rng::from_seed(83);
    let t0 = sample_gaussian_locations(10, 3, 84).unwrap();
    let deformed = LocationSet::new(
        3,
        t0.iter()
            .map(|p| {
                let mut q = p.to_vec();
                for x in q.iter_mut() {
                    *x += 0.1 * rng.next_gaussian();
                }
                q
            })
            .collect(),
    )
    .unwrap();
    let g = sample_erdos_renyi(10, 0.7, 85).unwrap();
    let e_b = vec![g.edges()[1], g.edges()[4]];
    let sums = eta_transfer_diagnostics(&deformed, &t0, &g, &e_b).unwrap();
    assert!(sums.sum_eta_good > 0.0);
    assert!(sums.sum_eta_bad > 0.0);
    assert!(sums.sum_eta_complete >= sums.sum_eta_good + sums.sum_eta_bad - 1e-12);

    // Direct recount over the complete graph.
    let mut complete = 0.0;
    for i in 0..10 {
        for j in (i + 1)..10 {
            complete += perp_norm(&deformed.diff(i, j), &t0.diff(i, j));
        }
    }
    assert!((sums.sum_eta_complete - complete).abs() <= 1e-12 * complete.max(1.0));
}

/// Degenerate spans inside the estimator: a point on the line through the
/// pair contributes the full component.
#[test]
fn estimator_handles_on_axis_points() {
    let x = vec![1.0, 0.0, 0.0];
    let y = vec![-1.0, 0.0, 0.0];
    // One point on the segment, one past the endpoints, plus x itself.
    let t_sub = vec![
        vec![0.0, 0.0, 0.0],
        vec![3.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
    ];
    let est = estimate_well_distributed_constant(&t_sub, &x, &y, 64).unwrap();
    // Every term is ||h|| = 1 on the whole circle, so the minimum is 1.
    let slack = std::f64::consts::PI / 64.0;
    assert!((est.value - (1.0 - slack)).abs() <= 1e-12);
}

#[test]
fn exact_direction_recovery_of_unit_vectors() {
    // Sanity on helper normalization used across the suite.
    let v = normalized(&[3.0, 4.0, 0.0]).unwrap();
    assert!((norm(&v) - 1.0).abs() <= 1e-15);
}
