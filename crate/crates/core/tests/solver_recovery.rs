//! End-to-end recovery behavior of the splitting solver on synthetic
//! instances, checked against ground truth and against the subgradient
//! reference.

use shapefit::geometry::relative_error;
use shapefit::graph::sample_erdos_renyi;
use shapefit::linalg;
use shapefit::rng::{mix_seed, Rng};
use shapefit::solver::{
    reference_subgradient, solve_shapefit, LinearSolve, SolverConfig, SolverStatus,
};
use shapefit::synth::{corrupt_observations, sample_gaussian_locations, CorruptionConfig};
use shapefit::tol;
use shapefit::types::{LocationSet, Observation, ObservationSet};

fn instance(
    n: usize,
    p: f64,
    q: f64,
    sigma: f64,
    seed: u64,
) -> (LocationSet, ObservationSet) {
    let t0 = sample_gaussian_locations(n, 3, mix_seed(&[seed, 1])).unwrap();
    let g = sample_erdos_renyi(n, p, mix_seed(&[seed, 2])).unwrap();
    let obs = corrupt_observations(
        &t0,
        &g,
        &CorruptionConfig {
            q,
            sigma,
            seed: mix_seed(&[seed, 3]),
        },
    )
    .unwrap();
    (t0, obs)
}

#[test]
fn generic_triangle_recovers_exactly() {
    let t0 = LocationSet::new(
        2,
        vec![vec![0.1, -0.3], vec![1.2, 0.4], vec![-0.5, 0.9]],
    )
    .unwrap();
    let dirs: Vec<Observation> = [(0usize, 1usize), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| Observation {
            i,
            j,
            direction: linalg::normalized(&t0.diff(i, j)).unwrap(),
        })
        .collect();
    let obs = ObservationSet::new(3, 2, dirs, None).unwrap();
    let res = solve_shapefit(&obs, &SolverConfig::default()).unwrap();
    assert_eq!(res.status, SolverStatus::Converged);
    assert!(res.objective <= 1e-8, "objective {}", res.objective);
    let err = relative_error(&res.locations, &t0).unwrap();
    assert!(err <= 1e-6, "relative error {err}");

    // Uniqueness cross-check: the subgradient reference lands on the same
    // objective value.
    let sg = reference_subgradient(&obs, 200_000, 0.01).unwrap();
    assert!(sg.objective <= 1e-3);
}

#[test]
fn exact_recovery_without_corruption() {
    for seed in 0..5u64 {
        let (t0, obs) = instance(20, 0.5, 0.0, 0.0, seed);
        let res = solve_shapefit(&obs, &SolverConfig::default()).unwrap();
        assert_eq!(res.status, SolverStatus::Converged);
        let err = relative_error(&res.locations, &t0).unwrap();
        assert!(err <= 1e-5, "seed {seed}: relative error {err}");
        assert!(res.constraint_violation.0 <= tol::FEASIBILITY_TOL);
        assert!(res.constraint_violation.1 <= tol::FEASIBILITY_TOL);
    }
}

/// Recovery survives one in five measurements being replaced by random
/// directions once the instance is large enough.
#[test]
fn recovery_under_random_corruption() {
    let (t0, obs) = instance(50, 0.5, 0.2, 0.0, 1);
    let res = solve_shapefit(&obs, &SolverConfig::default()).unwrap();
    let err = relative_error(&res.locations, &t0).unwrap();
    assert!(err <= 1e-3, "relative error {err}");
}

#[test]
fn split_objective_agrees_at_convergence() {
    for seed in [3u64, 4, 5] {
        let (_, obs) = instance(12, 0.7, 0.3, 0.0, seed);
        let cfg = SolverConfig::default();
        let res = solve_shapefit(&obs, &cfg).unwrap();
        assert_eq!(res.status, SolverStatus::Converged);
        let bound = cfg.tol_primal * (obs.len() as f64).sqrt();
        assert!(
            (res.objective - res.split_objective).abs() <= bound,
            "seed {seed}: |{} - {}| > {bound}",
            res.objective,
            res.split_objective
        );
    }
}

/// Relabeling the vertices relabels the recovered configuration; the solver
/// output agrees up to its own tolerance.
#[test]
fn solution_equivariant_under_relabeling() {
    let (_, obs) = instance(10, 0.8, 0.2, 0.0, 9);
    let n = 10;
    let mut rng = Rng::from_seed(1234);
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);

    let permuted: Vec<Observation> = obs
        .iter()
        .map(|o| {
            let (a, b) = (perm[o.i], perm[o.j]);
            if a < b {
                Observation {
                    i: a,
                    j: b,
                    direction: o.direction.clone(),
                }
            } else {
                Observation {
                    i: b,
                    j: a,
                    direction: linalg::scaled(&o.direction, -1.0),
                }
            }
        })
        .collect();
    let obs_p = ObservationSet::new(n, 3, permuted, None).unwrap();

    let res = solve_shapefit(&obs, &SolverConfig::default()).unwrap();
    let res_p = solve_shapefit(&obs_p, &SolverConfig::default()).unwrap();

    let unpermuted =
        LocationSet::new(3, (0..n).map(|i| res_p.locations.point(perm[i]).to_vec()).collect())
            .unwrap();
    let err = relative_error(&res.locations, &unpermuted).unwrap();
    assert!(err <= 1e-6, "permutation equivariance broken: {err}");
}

#[test]
fn conjugate_gradient_path_matches_direct() {
    let (_, obs) = instance(15, 0.6, 0.25, 0.0, 11);
    let direct = solve_shapefit(
        &obs,
        &SolverConfig {
            linear_solve: LinearSolve::DirectFactorization,
            ..Default::default()
        },
    )
    .unwrap();
    let cg = solve_shapefit(
        &obs,
        &SolverConfig {
            linear_solve: LinearSolve::ConjugateGradient,
            ..Default::default()
        },
    )
    .unwrap();
    let rel = (direct.objective - cg.objective).abs() / direct.objective.max(1e-9);
    assert!(rel <= 1e-6, "direct {} vs cg {}", direct.objective, cg.objective);
    let err = relative_error(&direct.locations, &cg.locations).unwrap();
    assert!(err <= 1e-5, "solution mismatch {err}");
}

#[test]
fn subgradient_cross_check_on_small_instances() {
    // Smaller in-crate version of the full acceptance comparison.
    for seed in [21u64, 22, 23] {
        let (_, obs) = instance(9, 0.8, 0.35, 0.0, seed);
        let admm = solve_shapefit(&obs, &SolverConfig::default()).unwrap();
        let sg = reference_subgradient(&obs, 300_000, 3e-4).unwrap();
        let rel = (admm.objective - sg.objective).abs() / sg.objective.max(1e-6);
        assert!(
            rel <= 1e-3,
            "seed {seed}: admm {} vs subgradient {}",
            admm.objective,
            sg.objective
        );
    }
}

#[test]
fn tree_instance_is_refused_as_underdetermined() {
    // A path graph admits zero-objective deformations; the stationarity
    // system is singular and the solve must refuse.
    let mut rng = Rng::from_seed(42);
    let dirs: Vec<Observation> = (0..3)
        .map(|i| Observation {
            i,
            j: i + 1,
            direction: rng.unit_vector(3),
        })
        .collect();
    let obs = ObservationSet::new(4, 3, dirs, None).unwrap();
    let res = solve_shapefit(&obs, &SolverConfig::default());
    assert!(
        matches!(res, Err(shapefit::Error::InfeasibleInput(_))),
        "expected refusal, got {res:?}"
    );
}
