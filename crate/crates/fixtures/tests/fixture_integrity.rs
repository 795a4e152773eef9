//! The Connecticut fixtures must reproduce the published map statistics and
//! carry coherent prior-cycle assignments for plan comparison.

use redistrict_core::diff::{classify_change, diff_plans};
use redistrict_core::metrics;
use redistrict_fixtures::{house, senate};

#[test]
fn house_shape_and_extremes() {
    let f = house();
    assert_eq!(f.num_districts, 151);
    let pops: Vec<u64> = f
        .enacted
        .district_labels()
        .map(|d| f.enacted.aggregates(d).pop)
        .collect();
    assert_eq!(pops.iter().max(), Some(&24_850));
    assert_eq!(pops.iter().min(), Some(&22_842));
    // largest: district 122; smallest: district 1
    assert_eq!(f.enacted.aggregates(122).pop, 24_850);
    assert_eq!(f.enacted.aggregates(1).pop, 22_842);
}

#[test]
fn senate_shape_and_extremes() {
    let f = senate();
    assert_eq!(f.num_districts, 36);
    assert_eq!(f.enacted.aggregates(27).pop, 105_093);
    assert_eq!(f.enacted.aggregates(14).pop, 95_096);
}

#[test]
fn house_metrics_match_published_values() {
    let f = house();
    let dev = metrics::pop_deviation(&f.enacted);
    assert!((dev - 0.0841).abs() < 1e-4, "deviation {dev}");
    assert_eq!(metrics::town_splits(&f.enacted), 72);
    assert_eq!(
        metrics::majority_minority_count(&f.enacted, 0.5).unwrap(),
        36
    );
    let lean = metrics::partisan_lean(&f.enacted).unwrap().counts;
    assert_eq!((lean.safe_dem, lean.safe_rep, lean.competitive), (86, 11, 54));
    let inc = metrics::incumbent_distribution(&f.enacted);
    assert_eq!(inc.single, 150);
    assert_eq!(inc.zero, 1);
    assert_eq!(inc.multi, 0);
}

#[test]
fn senate_metrics_match_published_values() {
    let f = senate();
    let dev = metrics::pop_deviation(&f.enacted);
    assert!((dev - 0.0999).abs() < 1e-4, "deviation {dev}");
    assert_eq!(metrics::town_splits(&f.enacted), 38);
    assert_eq!(metrics::majority_minority_count(&f.enacted, 0.5).unwrap(), 7);
    let lean = metrics::partisan_lean(&f.enacted).unwrap().counts;
    assert_eq!((lean.safe_dem, lean.safe_rep, lean.competitive), (23, 1, 12));
    let inc = metrics::incumbent_distribution(&f.enacted);
    assert_eq!(inc.single, 36);
    assert_eq!(inc.single_frac, 1.0);
}

#[test]
fn house_competitive_changes_classify_as_encoded() {
    let f = house();
    let diff = diff_plans(&f.prior, &f.enacted).unwrap();
    for item in &f.items {
        let d = diff.district(item.district);
        let got = if d.is_empty() {
            redistrict_core::diff::Classification::Neutral
        } else {
            classify_change(&d, item.incumbent_party, 0.02).unwrap()
        };
        assert_eq!(
            got, item.expected,
            "district {} classified {:?}, expected {:?}",
            item.district, got, item.expected
        );
    }
    // the unchanged district really is unchanged
    assert!(diff.district(35).is_empty());
}

#[test]
fn house_district_90_changes_match_the_map() {
    let f = house();
    let diff = diff_plans(&f.prior, &f.enacted).unwrap();
    let d90 = diff.district(90);
    let town_of = |i: &u32| f.graph.unit(*i).town.clone();
    let added_towns: Vec<String> = d90.additions.iter().map(town_of).collect();
    // all of Middlefield plus part of Wallingford
    let middlefield_units = f
        .graph
        .units()
        .iter()
        .filter(|u| u.town == "Middlefield")
        .count();
    assert_eq!(
        added_towns.iter().filter(|t| *t == "Middlefield").count(),
        middlefield_units
    );
    assert!(added_towns.iter().any(|t| t == "Wallingford"));
    let removed_towns: Vec<String> = d90.subtractions.iter().map(town_of).collect();
    assert!(!removed_towns.is_empty());
    assert!(removed_towns.iter().all(|t| t == "Cheshire"));
}

#[test]
fn senate_competitive_changes_classify_as_encoded() {
    let f = senate();
    let diff = diff_plans(&f.prior, &f.enacted).unwrap();
    for item in &f.items {
        let d = diff.district(item.district);
        let got = if d.is_empty() {
            redistrict_core::diff::Classification::Neutral
        } else {
            classify_change(&d, item.incumbent_party, 0.02).unwrap()
        };
        assert_eq!(
            got, item.expected,
            "district {} classified {:?}, expected {:?}",
            item.district, got, item.expected
        );
    }
    // districts 20 and 18 are identical across cycles
    assert!(diff.district(20).is_empty());
    assert!(diff.district(18).is_empty());
}

#[test]
fn graph_json_round_trips() {
    let f = senate();
    let reloaded = redistrict_core::graph::parse_graph(&f.graph_json, "mem").unwrap();
    assert_eq!(reloaded.num_units(), f.graph.num_units());
    assert_eq!(reloaded.edges(), f.graph.edges());
    assert_eq!(reloaded.units(), f.graph.units());
}

#[test]
fn margins_tables_isolate_the_competitive_districts() {
    for (f, cut, expected) in [(house(), 0.025, 10), (senate(), 0.06, 9)] {
        let within = f
            .margins_csv
            .lines()
            .skip(1)
            .filter(|line| {
                let pct: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
                pct <= cut
            })
            .count();
        assert_eq!(within, expected, "{} margins", f.name);
    }
}
