//! Independent-oracle checks for the recombination machinery on small
//! grids: incremental plan updates against from-scratch rebuilds, and
//! proposal support against brute-force enumeration of balanced contiguous
//! bipartitions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use redistrict_core::partition::Plan;
use redistrict_core::recom::{propose, ChainConfig, TreePolicy};
use redistrict_fixtures::synthetic;
use std::collections::BTreeSet;

#[test]
fn incremental_updates_match_rebuild_on_6x6() {
    // votes and demographics vary per cell so the float aggregation order
    // actually matters
    let graph = synthetic::grid_with(6, 6, 2, 3, |r, c, mut u| {
        u.pop = 1 + ((r * 7 + c * 3) % 4) as u64;
        u.vap_total = u.pop;
        u.vap_white = u.pop / 2;
        u.vap_black = u.pop - u.pop / 2;
        u.dem_votes = (r as f64 + 1.0) * 0.37 + c as f64 * 0.113;
        u.rep_votes = (c as f64 + 1.0) * 0.29 + r as f64 * 0.071;
        u
    });
    let mut plan = synthetic::vertical_stripes(&graph, 6, 6, 3);
    let config = ChainConfig {
        epsilon: 0.3,
        max_tree_retries: 20,
        max_pair_retries: 20,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut applied = 0;
    while applied < 300 {
        let outcome = propose(&plan, &config, &mut rng);
        let mv = outcome.proposal.expect("grid always has proposals");
        let next = plan.apply_recom_move(&mv).expect("proposals apply cleanly");
        let rebuilt = Plan::from_labels(&graph, next.assignment().to_vec()).unwrap();
        assert_eq!(next, rebuilt, "incremental state diverged from rebuild");
        // conservation
        let total: u64 = next.district_labels().map(|d| next.aggregates(d).pop).sum();
        assert_eq!(total, graph.total_pop());
        let incumbents: usize = next
            .district_labels()
            .map(|d| next.aggregates(d).incumbent_count())
            .sum();
        assert_eq!(incumbents, graph.incumbents().len());
        plan = next;
        applied += 1;
    }
}

#[test]
fn proposal_support_matches_enumeration_on_4x4() {
    let graph = synthetic::grid(4, 4, 2, 2);
    let plan = synthetic::vertical_stripes(&graph, 4, 4, 2);
    let expected = synthetic::balanced_bipartitions(&graph, 8);
    let config = ChainConfig {
        epsilon: 0.001,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen: BTreeSet<BTreeSet<u32>> = BTreeSet::new();
    // tree cuts hit snaky bipartitions rarely; tens of thousands of draws
    // are needed to observe the full support
    for i in 0u32..50_000 {
        let outcome = propose(&plan, &config, &mut rng);
        let mv = outcome.proposal.expect("balanced splits always exist");
        let side: BTreeSet<u32> = if mv.new_units_a.contains(&0) {
            mv.new_units_a.iter().copied().collect()
        } else {
            mv.new_units_b.iter().copied().collect()
        };
        assert!(
            expected.contains(&side),
            "proposal outside the enumerated support"
        );
        seen.insert(side);
        // rebuild acts as the validity oracle on a sample of proposals
        if i.is_multiple_of(10) {
            let next = plan.apply_recom_move(&mv).expect("proposal must be valid");
            Plan::from_labels(&graph, next.assignment().to_vec()).unwrap();
        }
    }
    assert_eq!(
        seen, expected,
        "sampled proposals must cover every balanced contiguous bipartition"
    );
}

#[test]
fn region_aware_trees_prefer_within_town_edges() {
    // two 2×2 towns joined at a seam
    let graph = synthetic::grid(2, 4, 2, 2);
    let view = redistrict_core::recom::RegionView::from_units(&graph, (0..8).collect());
    let cross = |tree: &redistrict_core::recom::SpanningTree| {
        tree.edges
            .iter()
            .filter(|&&(a, b)| {
                graph.town_of(view.nodes[a as usize]) != graph.town_of(view.nodes[b as usize])
            })
            .count()
    };
    let draws = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut uniform_total = 0usize;
    for _ in 0..draws {
        let tree =
            redistrict_core::recom::random_spanning_tree(&view, TreePolicy::Uniform, &mut rng)
                .unwrap();
        uniform_total += cross(&tree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut aware_total = 0usize;
    for _ in 0..draws {
        let tree = redistrict_core::recom::random_spanning_tree(
            &view,
            TreePolicy::RegionAware { surcharge: 2.0 },
            &mut rng,
        )
        .unwrap();
        aware_total += cross(&tree);
    }
    let uniform_mean = uniform_total as f64 / draws as f64;
    let aware_mean = aware_total as f64 / draws as f64;
    assert!(
        aware_mean < uniform_mean,
        "region-aware mean {aware_mean} must be below uniform mean {uniform_mean}"
    );
    // both seams are forced into the tree only sometimes under the
    // surcharge; uniform trees take the second seam far more often
    assert!(uniform_mean > 1.2 && uniform_mean < 1.8, "uniform mean {uniform_mean}");
    assert!((1.0..1.2).contains(&aware_mean), "aware mean {aware_mean}");
}
