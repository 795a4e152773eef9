//! Property tests for the spec-level invariants: stream-order independence
//! of summaries, percentile monotonicity, histogram conservation, and graph
//! serialization round-trips.

use proptest::prelude::*;
use redistrict_core::ensemble::summarize_values;
use redistrict_core::graph::{parse_graph, DualGraph, Unit};

fn value_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1000.0f64..1000.0, 1..200)
}

proptest! {
    #[test]
    fn summaries_ignore_record_order(values in value_vec(), enacted in -1000.0f64..1000.0, seed in 0u64..1000) {
        let mut shuffled = values.clone();
        // deterministic Fisher-Yates driven by the seed
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let a = summarize_values(&values, "x", enacted, 40).unwrap();
        let b = summarize_values(&shuffled, "x", enacted, 40).unwrap();
        prop_assert_eq!(a.count, b.count);
        prop_assert!((a.mean - b.mean).abs() <= 1e-9 * (1.0 + a.mean.abs()));
        prop_assert_eq!(a.min, b.min);
        prop_assert_eq!(a.max, b.max);
        prop_assert_eq!(a.enacted_percentile, b.enacted_percentile);
        let counts_a: Vec<u64> = a.histogram.iter().map(|h| h.count).collect();
        let counts_b: Vec<u64> = b.histogram.iter().map(|h| h.count).collect();
        prop_assert_eq!(counts_a, counts_b);
    }

    #[test]
    fn histogram_counts_partition_the_stream(values in value_vec(), bins in 1usize..100) {
        let s = summarize_values(&values, "x", 0.0, bins).unwrap();
        prop_assert_eq!(s.histogram.iter().map(|h| h.count).sum::<u64>(), values.len() as u64);
        for w in s.histogram.windows(2) {
            prop_assert_eq!(w[0].bin_high, w[1].bin_low);
        }
    }

    #[test]
    fn percentile_is_monotone_in_the_enacted_value(values in value_vec(), lo in -1000.0f64..1000.0, hi in -1000.0f64..1000.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let a = summarize_values(&values, "x", lo, 40).unwrap();
        let b = summarize_values(&values, "x", hi, 40).unwrap();
        prop_assert!(a.enacted_percentile <= b.enacted_percentile);
    }
}

type GraphSpec = (Vec<(u64, u8, f64)>, Vec<(usize, usize)>);

fn arbitrary_graph() -> impl Strategy<Value = GraphSpec> {
    // unit specs (pop, town id, votes) plus extra edges over a guaranteed
    // spanning chain
    (2usize..12).prop_flat_map(|n| {
        let units = prop::collection::vec((0u64..10_000, 0u8..4, 0.0f64..500.0), n..=n);
        let extra = prop::collection::vec((0usize..n, 0usize..n), 0..(n * 2));
        (units, extra)
    })
}

proptest! {
    #[test]
    fn graph_json_round_trips((specs, extra) in arbitrary_graph()) {
        let units: Vec<Unit> = specs
            .iter()
            .enumerate()
            .map(|(i, &(pop, town, votes))| Unit {
                id: format!("u{i}"),
                pop,
                vap_total: pop / 2,
                vap_white: pop / 4,
                vap_hispanic: pop / 8,
                vap_black: pop / 8,
                vap_asian: 0,
                town: format!("t{town}"),
                dem_votes: votes,
                rep_votes: votes / 3.0,
                incumbents: vec![],
            })
            .collect();
        let mut edges: Vec<(String, String)> = (1..units.len())
            .map(|i| (format!("u{}", i - 1), format!("u{i}")))
            .collect();
        for &(a, b) in &extra {
            if a != b {
                let (a, b) = (a.min(b), a.max(b));
                // skip duplicates of the chain and of earlier extras
                let e = (format!("u{a}"), format!("u{b}"));
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
        let graph = DualGraph::new(units, edges).unwrap();
        let reloaded = parse_graph(&graph.to_json().to_string(), "mem").unwrap();
        prop_assert_eq!(graph.units(), reloaded.units());
        prop_assert_eq!(graph.edges(), reloaded.edges());
    }
}
