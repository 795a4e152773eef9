//! Plan comparison: per-district unit additions and subtractions, benefit
//! classification of the changes for an incumbent, and flagging of district
//! borders that hug an incumbent's home unit without following a town line.

use crate::graph::{IncumbentRef, Party};
use crate::partition::Plan;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("plans are over different graphs")]
    GraphMismatch,
    #[error("plans have different district counts ({0} vs {1})")]
    DistrictCountMismatch(u32, u32),
    #[error("changed units carry no votes")]
    NoVotesOnChangedUnits,
}

/// Unit movements for one district between two plans.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistrictDiff {
    /// Units in the district under the new plan but not the old, ascending.
    pub additions: Vec<u32>,
    /// Units in the district under the old plan but not the new, ascending.
    pub subtractions: Vec<u32>,
    pub added_dem: f64,
    pub added_rep: f64,
    pub removed_dem: f64,
    pub removed_rep: f64,
}

impl DistrictDiff {
    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.subtractions.is_empty()
    }
}

/// All changed districts between two plans. Districts absent from the map
/// are unchanged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanDiff {
    pub districts: BTreeMap<u32, DistrictDiff>,
}

impl PlanDiff {
    /// The diff for district `d`; empty when the district is unchanged.
    pub fn district(&self, d: u32) -> DistrictDiff {
        self.districts.get(&d).cloned().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.districts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Benefit,
    Disadvantage,
    Neutral,
}

fn same_graph(old: &Plan, new: &Plan) -> bool {
    if std::sync::Arc::ptr_eq(old.graph(), new.graph()) {
        return true;
    }
    let (g1, g2) = (old.graph(), new.graph());
    g1.num_units() == g2.num_units()
        && g1.edges() == g2.edges()
        && g1
            .units()
            .iter()
            .zip(g2.units().iter())
            .all(|(a, b)| a.id == b.id)
}

/// Computes per-district additions and subtractions from `old` to `new`,
/// with vote sums over each change set. District labels correspond by id.
pub fn diff_plans(old: &Plan, new: &Plan) -> Result<PlanDiff, DiffError> {
    if !same_graph(old, new) {
        return Err(DiffError::GraphMismatch);
    }
    if old.num_districts() != new.num_districts() {
        return Err(DiffError::DistrictCountMismatch(
            old.num_districts(),
            new.num_districts(),
        ));
    }
    let graph = old.graph();
    let mut districts: BTreeMap<u32, DistrictDiff> = BTreeMap::new();
    for i in 0..graph.num_units() as u32 {
        let from = old.label_of(i);
        let to = new.label_of(i);
        if from == to {
            continue;
        }
        let u = graph.unit(i);
        let gained = districts.entry(to).or_default();
        gained.additions.push(i);
        gained.added_dem += u.dem_votes;
        gained.added_rep += u.rep_votes;
        let lost = districts.entry(from).or_default();
        lost.subtractions.push(i);
        lost.removed_dem += u.dem_votes;
        lost.removed_rep += u.rep_votes;
    }
    Ok(PlanDiff { districts })
}

/// Classifies a district's changes for its incumbent.
///
/// The net effect is the vote-weighted shift toward the incumbent's party:
/// `(share_added − ½)·V_added − (share_removed − ½)·V_removed`, normalized
/// by the total changed votes. Beyond `neutral_band` it is a benefit; below
/// `−neutral_band` a disadvantage; otherwise neutral. An empty diff is
/// neutral.
pub fn classify_change(
    diff: &DistrictDiff,
    incumbent_party: Party,
    neutral_band: f64,
) -> Result<Classification, DiffError> {
    if diff.is_empty() {
        return Ok(Classification::Neutral);
    }
    let added_total = diff.added_dem + diff.added_rep;
    let removed_total = diff.removed_dem + diff.removed_rep;
    let changed = added_total + removed_total;
    if changed <= 0.0 {
        return Err(DiffError::NoVotesOnChangedUnits);
    }
    let party_votes = |dem: f64, rep: f64| match incumbent_party {
        Party::Dem => dem,
        Party::Rep => rep,
        // No two-party share to speak of; treat as balanced.
        Party::Other => (dem + rep) / 2.0,
    };
    let mut net = 0.0;
    if added_total > 0.0 {
        let share = party_votes(diff.added_dem, diff.added_rep) / added_total;
        net += (share - 0.5) * added_total;
    }
    if removed_total > 0.0 {
        let share = party_votes(diff.removed_dem, diff.removed_rep) / removed_total;
        net -= (share - 0.5) * removed_total;
    }
    let normalized = net / changed;
    Ok(if normalized > neutral_band {
        Classification::Benefit
    } else if normalized < -neutral_band {
        Classification::Disadvantage
    } else {
        Classification::Neutral
    })
}

/// A district border placed against an incumbent's home unit where the
/// border does not coincide with a town line.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderFlag {
    pub district: u32,
    pub incumbent: IncumbentRef,
    /// Cut edges incident to the home unit whose endpoints share a town,
    /// as unit-id pairs.
    pub offending_edges: Vec<(String, String)>,
}

/// Flags every incumbent whose home unit touches a cut edge that stays
/// within one town.
pub fn flag_borders(plan: &Plan) -> Vec<BorderFlag> {
    let graph = plan.graph();
    let mut flags = Vec::new();
    for (inc, home) in graph.incumbents() {
        let mut offending = Vec::new();
        for &ei in graph.incident_edges(*home) {
            if plan.is_cut(ei) && graph.edge_within_town(ei) {
                let (a, b) = graph.edges()[ei as usize];
                offending.push((graph.unit(a).id.clone(), graph.unit(b).id.clone()));
            }
        }
        if !offending.is_empty() {
            flags.push(BorderFlag {
                district: plan.label_of(*home),
                incumbent: inc.clone(),
                offending_edges: offending,
            });
        }
    }
    flags
}

/// Greedy maximum-population-overlap matching of `old` district labels onto
/// `new` labels, for comparing plans whose numbering does not correspond.
/// Returns `map[old_label - 1] = new_label`.
pub fn match_districts_by_overlap(old: &Plan, new: &Plan) -> Result<Vec<u32>, DiffError> {
    if !same_graph(old, new) {
        return Err(DiffError::GraphMismatch);
    }
    if old.num_districts() != new.num_districts() {
        return Err(DiffError::DistrictCountMismatch(
            old.num_districts(),
            new.num_districts(),
        ));
    }
    let n = old.num_districts() as usize;
    let graph = old.graph();
    let mut overlap = vec![0u64; n * n];
    for i in 0..graph.num_units() as u32 {
        let a = old.label_of(i) as usize - 1;
        let b = new.label_of(i) as usize - 1;
        overlap[a * n + b] += graph.unit(i).pop;
    }
    let mut pairs: Vec<(u64, usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| (overlap[a * n + b], a, b))
        .collect();
    // Highest overlap first; ties broken by labels for determinism.
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut map = vec![0u32; n];
    let mut old_used = vec![false; n];
    let mut new_used = vec![false; n];
    let mut assigned = 0;
    for (_, a, b) in pairs {
        if !old_used[a] && !new_used[b] {
            old_used[a] = true;
            new_used[b] = true;
            map[a] = b as u32 + 1;
            assigned += 1;
            if assigned == n {
                break;
            }
        }
    }
    Ok(map)
}

/// Relabels `old` so its district labels line up with `new` by population
/// overlap.
pub fn relabel_by_overlap(old: &Plan, new: &Plan) -> Result<Plan, DiffError> {
    let map = match_districts_by_overlap(old, new)?;
    let labels = old
        .assignment()
        .iter()
        .map(|&d| map[d as usize - 1])
        .collect();
    Ok(Plan::from_labels(old.graph(), labels).expect("relabeling preserves plan validity"))
}
