//! Round-trip property of the text interchange format.

use proptest::prelude::*;

use shapefit::io::{format_instance, parse_instance};
use shapefit::rng::Rng;
use shapefit::synth::{corrupt_observations, sample_gaussian_locations, CorruptionConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn format_parse_round_trip_is_exact(
        seed in 0u64..10_000,
        n in 2usize..12,
        d in 2usize..5,
        q in 0.0f64..1.0,
        with_locations in proptest::bool::ANY,
    ) {
        let t0 = sample_gaussian_locations(n, d, seed).unwrap();
        let mut edges = Vec::new();
        let mut rng = Rng::from_seed(seed ^ 0xbeef);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.next_f64() < 0.7 {
                    edges.push((i, j));
                }
            }
        }
        prop_assume!(!edges.is_empty());
        let g = shapefit::graph::Graph::new(n, edges).unwrap();
        let obs = corrupt_observations(&t0, &g, &CorruptionConfig { q, sigma: 0.02, seed }).unwrap();

        let locations = if with_locations { Some(&t0) } else { None };
        let text = format_instance(locations, &obs).unwrap();
        let parsed = parse_instance(&text).unwrap();
        prop_assert_eq!(parsed.observations, obs);
        if with_locations {
            let parsed_locs = parsed.locations.unwrap();
            prop_assert_eq!(parsed_locs.flat(), t0.flat());
        } else {
            prop_assert!(parsed.locations.is_none());
        }
    }
}
