//! Property tests for the library invariants: linearity and
//! order-invariance of the sketch, merge/split equivalence, serialization
//! round trips, oracle self-consistency and hash output ranges.

mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{
    random_pattern, reference_accumulators, sketch_of_stream, triangle_profile, TestRng,
};
use hypercount_core::{
    build_pattern_profile, count_automorphisms, derive_basis, exact_count, EstimatorBank,
    Hypergraph, Sign, Sketch, StreamEdge,
};

/// Signed edges over a small universe, sizes 1..=3.
fn stream_strategy(max_len: usize) -> impl Strategy<Value = Vec<StreamEdge>> {
    prop::collection::vec(
        (
            prop::bool::ANY,
            prop::collection::btree_set(0u64..24, 1..=3),
        ),
        0..max_len,
    )
    .prop_map(|edges| {
        edges
            .into_iter()
            .map(|(insert, vertices)| {
                let sign = if insert { Sign::Insert } else { Sign::Delete };
                StreamEdge::new(sign, vertices.into_iter().collect()).unwrap()
            })
            .collect()
    })
}

fn pattern_strategy() -> impl Strategy<Value = Hypergraph> {
    any::<u64>().prop_map(|seed| random_pattern(&mut TestRng::new(seed), 5))
}

proptest! {
    #[test]
    fn insert_delete_pairs_cancel_bitwise(stream in stream_strategy(12), seed in any::<u64>()) {
        let profile = triangle_profile();
        let mut sketch = Sketch::new(Arc::clone(&profile), seed);
        for e in &stream {
            sketch.update(e).unwrap();
        }
        let before = sketch.accumulators().to_vec();
        let extra = StreamEdge::insert(vec![90, 91]).unwrap();
        sketch.update(&extra).unwrap();
        sketch.update(&extra.inverted()).unwrap();
        prop_assert_eq!(sketch.accumulators(), before.as_slice());
    }

    #[test]
    fn pure_insert_streams_are_order_invariant(
        edges in prop::collection::vec(prop::collection::btree_set(0u64..20, 1..=3), 1..12),
        shuffle_seed in any::<u64>(),
    ) {
        let profile = triangle_profile();
        let stream: Vec<StreamEdge> = edges
            .iter()
            .map(|s| StreamEdge::insert(s.iter().copied().collect()).unwrap())
            .collect();
        let mut shuffled = stream.clone();
        TestRng::new(shuffle_seed).shuffle(&mut shuffled);

        let a = sketch_of_stream(&profile, 7, &stream);
        let b = sketch_of_stream(&profile, 7, &shuffled);
        for (x, y) in a.accumulators().iter().zip(b.accumulators()) {
            prop_assert!((x - y).norm() < 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn split_streams_merge_to_whole(
        stream in stream_strategy(16),
        split in any::<prop::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let profile = triangle_profile();
        let cut = if stream.is_empty() { 0 } else { split.index(stream.len()) };
        let left = sketch_of_stream(&profile, seed, &stream[..cut]);
        let right = sketch_of_stream(&profile, seed, &stream[cut..]);
        let merged = left.merge(&right).unwrap();
        let whole = sketch_of_stream(&profile, seed, &stream);
        for (x, y) in merged.accumulators().iter().zip(whole.accumulators()) {
            prop_assert!((x - y).norm() < 1e-12, "{} vs {}", x, y);
        }
        prop_assert_eq!(merged.edges_processed(), whole.edges_processed());
    }

    #[test]
    fn sketch_serialization_round_trips_bitwise(stream in stream_strategy(10), seed in any::<u64>()) {
        let profile = triangle_profile();
        let sketch = sketch_of_stream(&profile, seed, &stream);
        let restored = Sketch::from_bytes(&sketch.to_bytes(), Arc::clone(&profile)).unwrap();
        prop_assert_eq!(restored.accumulators(), sketch.accumulators());
        prop_assert_eq!(restored.edges_processed(), sketch.edges_processed());
        prop_assert_eq!(restored.basis(), sketch.basis());
    }

    #[test]
    fn accumulators_match_reference_expansion(stream in stream_strategy(8), seed in any::<u64>()) {
        let profile = triangle_profile();
        let sketch = sketch_of_stream(&profile, seed, &stream);
        let reference = reference_accumulators(&profile, sketch.basis(), &stream);
        for (x, y) in sketch.accumulators().iter().zip(&reference) {
            prop_assert!((x - y).norm() < 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn accumulator_magnitude_is_bounded(
        edges in prop::collection::vec(prop::collection::btree_set(0u64..16, 2..=2), 1..20),
        seed in any::<u64>(),
    ) {
        // U net unit updates of size 2 bound each accumulator by U * 2!.
        let profile = triangle_profile();
        let stream: Vec<StreamEdge> = edges
            .iter()
            .map(|s| StreamEdge::insert(s.iter().copied().collect()).unwrap())
            .collect();
        let sketch = sketch_of_stream(&profile, seed, &stream);
        let bound = (stream.len() * 2) as f64 + 1e-9;
        for z in sketch.accumulators() {
            prop_assert!(z.norm() <= bound, "|{}| > {}", z, bound);
        }
    }

    #[test]
    fn automorphism_count_divides_factorial(pattern in pattern_strategy()) {
        let auto = count_automorphisms(&pattern).unwrap();
        let t_factorial: u64 = (1..=pattern.vertex_count() as u64).product();
        prop_assert_eq!(t_factorial % auto, 0, "auto = {}", auto);
    }

    #[test]
    fn every_pattern_occurs_once_in_itself(pattern in pattern_strategy()) {
        prop_assert_eq!(exact_count(&pattern, &pattern).unwrap(), 1);
    }

    #[test]
    fn single_edge_pattern_counts_matching_sizes(
        g_edges in prop::collection::btree_set(prop::collection::btree_set(0u64..10, 1..=3), 1..15),
        q in 1usize..=3,
    ) {
        let pattern = Hypergraph::from_edges(vec![(100..100 + q as u64).collect()]).unwrap();
        let edges: Vec<Vec<u64>> = g_edges.iter().map(|s| s.iter().copied().collect()).collect();
        let expected = edges.iter().filter(|e| e.len() == q).count() as u64;
        let g = Hypergraph::from_edges(edges).unwrap();
        prop_assert_eq!(exact_count(&pattern, &g).unwrap(), expected);
    }

    #[test]
    fn exact_count_monotone_under_insertion(
        g_edges in prop::collection::btree_set(prop::collection::btree_set(0u64..7, 2..=2), 1..10),
        extra in prop::collection::btree_set(0u64..7, 2..=2),
    ) {
        let pattern = common::triangle();
        let edges: Vec<Vec<u64>> = g_edges.iter().map(|s| s.iter().copied().collect()).collect();
        let before = exact_count(&pattern, &Hypergraph::from_edges(edges.clone()).unwrap()).unwrap();
        let extra: Vec<u64> = extra.iter().copied().collect();
        if !g_edges.contains(&extra.iter().copied().collect()) {
            let mut grown = edges;
            grown.push(extra);
            let after = exact_count(&pattern, &Hypergraph::from_edges(grown).unwrap()).unwrap();
            prop_assert!(after >= before);
        }
    }

    #[test]
    fn basis_outputs_stay_in_range(pattern in pattern_strategy(), seed in any::<u64>(), v in any::<u64>()) {
        let profile = build_pattern_profile(&pattern).unwrap();
        let basis = derive_basis(&profile, seed);
        for (&c, &deg) in profile.vertices().iter().zip(profile.degrees()) {
            prop_assert!(basis.x_exponent(c, v).unwrap() < deg as u64);
        }
        let y = basis.y_value(v);
        prop_assert!(y.is_power_of_two() && y < (1 << profile.t()));
        prop_assert!(basis.q_exponent() < profile.tau());
    }

    #[test]
    fn bank_update_equals_per_copy_updates(stream in stream_strategy(10), seed_base in any::<u64>()) {
        let profile = triangle_profile();
        let mut bank = EstimatorBank::new(Arc::clone(&profile), 4, seed_base).unwrap();
        for e in &stream {
            bank.update(e).unwrap();
        }
        for (i, copy) in bank.copies().iter().enumerate() {
            let lone = sketch_of_stream(&profile, seed_base.wrapping_add(i as u64), &stream);
            prop_assert_eq!(copy.accumulators(), lone.accumulators());
        }
    }
}
