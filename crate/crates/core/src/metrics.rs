//! Per-plan scalar and categorical metrics: population deviation, incumbent
//! distribution, town splits, majority-minority and partisan-lean counts.

use crate::partition::Plan;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("district {0} has zero voting-age population")]
    ZeroVapDistrict(u32),
    #[error("district {0} has zero two-party votes")]
    ZeroVotesDistrict(u32),
}

/// One chain step's metrics, NDJSON-serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub step: u64,
    pub accepted: bool,
    pub single_incumbent_frac: f64,
    pub districts_single_incumbent: u32,
    pub districts_zero_incumbent: u32,
    pub districts_multi_incumbent: u32,
    pub town_splits: u32,
    pub pop_deviation: f64,
    pub majority_minority_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lean_counts: Option<LeanCounts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeanCounts {
    pub safe_dem: u32,
    pub safe_rep: u32,
    pub competitive: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncumbentDistribution {
    pub zero: u32,
    pub single: u32,
    pub multi: u32,
    pub single_frac: f64,
}

/// Two-party lean classification with breakpoints at 45% and 55%: strictly
/// above 55% Democratic share is safe-D, strictly below 45% is safe-R,
/// everything between (inclusive) is competitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lean {
    SafeDem,
    SafeRep,
    Competitive,
}

pub fn classify_share(dem_share: f64) -> Lean {
    if dem_share > 0.55 {
        Lean::SafeDem
    } else if dem_share < 0.45 {
        Lean::SafeRep
    } else {
        Lean::Competitive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartisanLean {
    /// Democratic two-party share per district, indexed by `district - 1`.
    pub dem_shares: Vec<f64>,
    pub counts: LeanCounts,
}

/// Voting-age population groups selectable for majority-share counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VapGroup {
    White,
    Hispanic,
    Black,
    Asian,
    /// Everyone but the white group: the majority-minority definition.
    NonWhite,
}

/// (max district pop − min district pop) / ideal district pop.
pub fn pop_deviation(plan: &Plan) -> f64 {
    let mut max = u64::MIN;
    let mut min = u64::MAX;
    for d in plan.district_labels() {
        let p = plan.aggregates(d).pop;
        max = max.max(p);
        min = min.min(p);
    }
    (max - min) as f64 / plan.ideal_pop()
}

/// Counts districts by incumbent count: zero, exactly one, two or more.
pub fn incumbent_distribution(plan: &Plan) -> IncumbentDistribution {
    let (mut zero, mut single, mut multi) = (0u32, 0u32, 0u32);
    for d in plan.district_labels() {
        match plan.aggregates(d).incumbent_count() {
            0 => zero += 1,
            1 => single += 1,
            _ => multi += 1,
        }
    }
    IncumbentDistribution {
        zero,
        single,
        multi,
        single_frac: single as f64 / plan.num_districts() as f64,
    }
}

/// Number of towns whose units occupy two or more districts.
pub fn town_splits(plan: &Plan) -> u32 {
    let graph = plan.graph();
    let mut splits = 0;
    for t in 0..graph.num_towns() as u32 {
        let units = graph.town_units(t);
        let first = plan.label_of(units[0]);
        if units[1..].iter().any(|&u| plan.label_of(u) != first) {
            splits += 1;
        }
    }
    splits
}

/// Counts districts whose share of `group` voting-age population strictly
/// exceeds `threshold`.
pub fn vap_majority_count(plan: &Plan, group: VapGroup, threshold: f64) -> Result<u32, MetricsError> {
    let mut count = 0;
    for d in plan.district_labels() {
        let agg = plan.aggregates(d);
        if agg.vap_total == 0 {
            return Err(MetricsError::ZeroVapDistrict(d));
        }
        let members = match group {
            VapGroup::White => agg.vap_white,
            VapGroup::Hispanic => agg.vap_hispanic,
            VapGroup::Black => agg.vap_black,
            VapGroup::Asian => agg.vap_asian,
            VapGroup::NonWhite => agg.vap_total - agg.vap_white,
        };
        if members as f64 / agg.vap_total as f64 > threshold {
            count += 1;
        }
    }
    Ok(count)
}

/// Districts whose non-white voting-age share strictly exceeds `threshold`
/// (0.5 by default at call sites).
pub fn majority_minority_count(plan: &Plan, threshold: f64) -> Result<u32, MetricsError> {
    vap_majority_count(plan, VapGroup::NonWhite, threshold)
}

/// Per-district Democratic two-party share and the lean counts.
pub fn partisan_lean(plan: &Plan) -> Result<PartisanLean, MetricsError> {
    let mut dem_shares = Vec::with_capacity(plan.num_districts() as usize);
    let mut counts = LeanCounts {
        safe_dem: 0,
        safe_rep: 0,
        competitive: 0,
    };
    for d in plan.district_labels() {
        let agg = plan.aggregates(d);
        let total = agg.two_party_votes();
        if total <= 0.0 {
            return Err(MetricsError::ZeroVotesDistrict(d));
        }
        let share = agg.dem_votes / total;
        dem_shares.push(share);
        match classify_share(share) {
            Lean::SafeDem => counts.safe_dem += 1,
            Lean::SafeRep => counts.safe_rep += 1,
            Lean::Competitive => counts.competitive += 1,
        }
    }
    Ok(PartisanLean { dem_shares, counts })
}

/// Bundles all metrics for one chain step. Lean counts are omitted when the
/// graph carries no votes at all.
pub fn compute_record(plan: &Plan, step: u64, accepted: bool) -> Result<MetricRecord, MetricsError> {
    let inc = incumbent_distribution(plan);
    let lean_counts = if plan.graph().total_votes() > 0.0 {
        Some(partisan_lean(plan)?.counts)
    } else {
        None
    };
    Ok(MetricRecord {
        step,
        accepted,
        single_incumbent_frac: inc.single_frac,
        districts_single_incumbent: inc.single,
        districts_zero_incumbent: inc.zero,
        districts_multi_incumbent: inc.multi,
        town_splits: town_splits(plan),
        pop_deviation: pop_deviation(plan),
        majority_minority_count: majority_minority_count(plan, 0.5)?,
        lean_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DualGraph, IncumbentRef, Party, Unit};
    use crate::partition::Plan;
    use std::sync::Arc;

    fn unit(id: &str, pop: u64, town: &str) -> Unit {
        Unit {
            id: id.into(),
            pop,
            vap_total: pop,
            vap_white: pop,
            vap_hispanic: 0,
            vap_black: 0,
            vap_asian: 0,
            town: town.into(),
            dem_votes: 0.0,
            rep_votes: 0.0,
            incumbents: vec![],
        }
    }

    fn chain_graph(units: Vec<Unit>) -> Arc<DualGraph> {
        let ids: Vec<String> = units.iter().map(|u| u.id.clone()).collect();
        let edges = ids
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        Arc::new(DualGraph::new(units, edges).unwrap())
    }

    #[test]
    fn equal_pops_give_zero_deviation() {
        let g = chain_graph(vec![unit("a", 5, "t"), unit("b", 5, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        assert_eq!(pop_deviation(&plan), 0.0);
    }

    #[test]
    fn deviation_is_spread_over_ideal() {
        let g = chain_graph(vec![unit("a", 6, "t"), unit("b", 4, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        // (6 - 4) / 5
        assert!((pop_deviation(&plan) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn deviation_invariant_under_relabeling() {
        let g = chain_graph(vec![
            unit("a", 3, "t"),
            unit("b", 2, "t"),
            unit("c", 7, "t"),
        ]);
        let p1 = Plan::from_labels(&g, vec![1, 1, 2]).unwrap();
        let p2 = Plan::from_labels(&g, vec![2, 2, 1]).unwrap();
        assert_eq!(pop_deviation(&p1), pop_deviation(&p2));
    }

    #[test]
    fn incumbent_distribution_counts() {
        // 3 districts with incumbent counts [2, 1, 0].
        let mut a = unit("a", 1, "t");
        a.incumbents = vec![
            IncumbentRef {
                name: "i1".into(),
                party: Party::Dem,
                home_unit: "a".into(),
            },
            IncumbentRef {
                name: "i2".into(),
                party: Party::Rep,
                home_unit: "a".into(),
            },
        ];
        let mut b = unit("b", 1, "t");
        b.incumbents = vec![IncumbentRef {
            name: "i3".into(),
            party: Party::Dem,
            home_unit: "b".into(),
        }];
        let g = chain_graph(vec![a, b, unit("c", 1, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2, 3]).unwrap();
        let dist = incumbent_distribution(&plan);
        assert_eq!((dist.zero, dist.single, dist.multi), (1, 1, 1));
        assert!((dist.single_frac - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn no_incumbents_gives_zero_fraction() {
        let g = chain_graph(vec![unit("a", 1, "t"), unit("b", 1, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        let dist = incumbent_distribution(&plan);
        assert_eq!((dist.zero, dist.single, dist.multi), (2, 0, 0));
        assert_eq!(dist.single_frac, 0.0);
    }

    #[test]
    fn whole_town_districts_have_no_splits() {
        let g = chain_graph(vec![
            unit("a", 1, "x"),
            unit("b", 1, "x"),
            unit("c", 1, "y"),
            unit("d", 1, "y"),
        ]);
        let plan = Plan::from_labels(&g, vec![1, 1, 2, 2]).unwrap();
        assert_eq!(town_splits(&plan), 0);
    }

    #[test]
    fn split_counts_towns_not_pieces() {
        // One town straddling 3 districts is a single split.
        let g = chain_graph(vec![
            unit("a", 1, "x"),
            unit("b", 1, "x"),
            unit("c", 1, "x"),
            unit("d", 1, "y"),
        ]);
        let plan = Plan::from_labels(&g, vec![1, 2, 3, 3]).unwrap();
        assert_eq!(town_splits(&plan), 1);
    }

    #[test]
    fn majority_threshold_is_strict() {
        let mut a = unit("a", 100, "t");
        a.vap_total = 100;
        a.vap_white = 50; // minority share exactly 0.5: not counted
        let mut b = unit("b", 100, "t");
        b.vap_total = 100;
        b.vap_white = 18; // minority share 0.82: counted
        let g = chain_graph(vec![a, b]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        assert_eq!(majority_minority_count(&plan, 0.5).unwrap(), 1);
    }

    #[test]
    fn zero_vap_district_is_an_error() {
        let mut a = unit("a", 1, "t");
        a.vap_total = 0;
        a.vap_white = 0;
        let g = chain_graph(vec![a, unit("b", 1, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        assert!(matches!(
            majority_minority_count(&plan, 0.5),
            Err(MetricsError::ZeroVapDistrict(1))
        ));
    }

    #[test]
    fn lean_breakpoints() {
        assert_eq!(classify_share(0.90), Lean::SafeDem);
        assert_eq!(classify_share(0.56), Lean::SafeDem);
        assert_eq!(classify_share(0.55), Lean::Competitive);
        assert_eq!(classify_share(0.50), Lean::Competitive);
        assert_eq!(classify_share(0.45), Lean::Competitive);
        assert_eq!(classify_share(0.449), Lean::SafeRep);
    }

    #[test]
    fn partisan_lean_counts_districts() {
        let mut a = unit("a", 10, "t");
        a.dem_votes = 90.0;
        a.rep_votes = 10.0;
        let mut b = unit("b", 10, "t");
        b.dem_votes = 50.0;
        b.rep_votes = 50.0;
        let mut c = unit("c", 10, "t");
        c.dem_votes = 20.0;
        c.rep_votes = 80.0;
        let g = chain_graph(vec![a, b, c]);
        let plan = Plan::from_labels(&g, vec![1, 2, 3]).unwrap();
        let lean = partisan_lean(&plan).unwrap();
        assert_eq!(
            lean.counts,
            LeanCounts {
                safe_dem: 1,
                safe_rep: 1,
                competitive: 1
            }
        );
    }

    #[test]
    fn zero_votes_district_is_an_error() {
        let mut a = unit("a", 10, "t");
        a.dem_votes = 5.0;
        let g = chain_graph(vec![a, unit("b", 10, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        assert!(matches!(
            partisan_lean(&plan),
            Err(MetricsError::ZeroVotesDistrict(2))
        ));
    }

    #[test]
    fn record_omits_lean_on_voteless_graph() {
        let g = chain_graph(vec![unit("a", 1, "t"), unit("b", 1, "t")]);
        let plan = Plan::from_labels(&g, vec![1, 2]).unwrap();
        let rec = compute_record(&plan, 3, true).unwrap();
        assert!(rec.lean_counts.is_none());
        assert_eq!(
            rec.districts_single_incumbent + rec.districts_zero_incumbent
                + rec.districts_multi_incumbent,
            plan.num_districts()
        );
        let line = serde_json::to_string(&rec).unwrap();
        assert!(!line.contains("lean_counts"));
    }
}
