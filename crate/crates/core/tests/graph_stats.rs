//! Statistical and structural checks on the random-graph generator.

use shapefit::graph::{check_p_typical, sample_erdos_renyi};

/// Binomial concentration: at n = 200, p = 0.5 the edge count stays within
/// four standard deviations of its mean on every seed.
#[test]
fn edge_count_concentrates_around_mean() {
    for seed in 0..50u64 {
        let g = sample_erdos_renyi(200, 0.5, seed).unwrap();
        let count = g.edge_count();
        assert!(
            (9671..=10229).contains(&count),
            "seed {seed}: edge count {count} outside the 4-sigma bracket"
        );
    }
}

#[test]
fn typicality_holds_for_dense_draws() {
    // Smoke version of the full statistical acceptance run.
    for seed in 0..3u64 {
        let g = sample_erdos_renyi(300, 0.5, seed).unwrap();
        let rep = check_p_typical(&g, 0.5).unwrap();
        assert!(rep.is_p_typical, "seed {seed}: {rep:?}");
    }
}

#[test]
fn generation_is_reproducible_across_calls() {
    let a = sample_erdos_renyi(120, 0.37, 0xA11CE).unwrap();
    let b = sample_erdos_renyi(120, 0.37, 0xA11CE).unwrap();
    assert_eq!(a.edges(), b.edges());
}

#[test]
fn rejects_out_of_range_parameters() {
    assert!(sample_erdos_renyi(0, 0.5, 1).is_err());
    assert!(sample_erdos_renyi(5, -0.1, 1).is_err());
    assert!(sample_erdos_renyi(5, 1.5, 1).is_err());
    let g = sample_erdos_renyi(5, 1.0, 1).unwrap();
    assert!(check_p_typical(&g, 0.0).is_err());
    assert!(check_p_typical(&g, 1.1).is_err());
}
