//! Plan state: a unit→district assignment with cached per-district
//! aggregates and cut-edge bookkeeping.
//!
//! Plans are immutable values. A ReCom move produces a successor plan; the
//! two touched districts are re-aggregated by scanning their member units in
//! ascending index order, which makes the result bit-identical to a
//! from-scratch rebuild (the conservation oracle the tests lean on).

use crate::graph::{DualGraph, IncumbentRef};
use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed assignment file: {0}")]
    MalformedAssignment(String),
    #[error("unit {0:?} is not assigned to any district")]
    UnassignedUnit(String),
    #[error("assignment names unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("unit {0:?} is assigned more than once")]
    DuplicateAssignment(String),
    #[error("district {0} has no assigned units (label gap)")]
    LabelGap(u32),
    #[error("district label {label} outside 1..={num_districts}")]
    LabelOutOfRange { label: u32, num_districts: u32 },
    #[error("district {0} is empty")]
    EmptyDistrict(u32),
    #[error("district {0} is not contiguous")]
    DiscontiguousDistrict(u32),
    #[error("invalid move: {0}")]
    InvalidMove(String),
}

/// Per-district sums over member units.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregates {
    pub pop: u64,
    pub vap_total: u64,
    pub vap_white: u64,
    pub vap_hispanic: u64,
    pub vap_black: u64,
    pub vap_asian: u64,
    pub dem_votes: f64,
    pub rep_votes: f64,
    /// Indices into [`DualGraph::incumbents`], ascending.
    pub incumbents: Vec<u32>,
}

impl Aggregates {
    fn add_unit(&mut self, g: &DualGraph, idx: u32) {
        let u = g.unit(idx);
        self.pop += u.pop;
        self.vap_total += u.vap_total;
        self.vap_white += u.vap_white;
        self.vap_hispanic += u.vap_hispanic;
        self.vap_black += u.vap_black;
        self.vap_asian += u.vap_asian;
        self.dem_votes += u.dem_votes;
        self.rep_votes += u.rep_votes;
    }

    pub fn incumbent_count(&self) -> usize {
        self.incumbents.len()
    }

    pub fn two_party_votes(&self) -> f64 {
        self.dem_votes + self.rep_votes
    }
}

/// A proposed recombination of two adjacent districts: the merged region is
/// repartitioned into `new_units_a`/`new_units_b` by cutting a spanning tree
/// at `cut_edge`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecomMove {
    pub district_a: u32,
    pub district_b: u32,
    /// Units assigned to `district_a` after the move, ascending unit indices.
    pub new_units_a: Vec<u32>,
    /// Units assigned to `district_b` after the move, ascending unit indices.
    pub new_units_b: Vec<u32>,
    /// The removed spanning-tree edge, as a pair of unit indices.
    pub cut_edge: (u32, u32),
}

/// An assignment of units to districts `1..=num_districts` with cached
/// aggregates and the set of cut edges.
#[derive(Debug, Clone)]
pub struct Plan {
    graph: Arc<DualGraph>,
    assignment: Vec<u32>,
    num_districts: u32,
    aggs: Vec<Aggregates>,
    cut: Vec<bool>,
}

impl PartialEq for Plan {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph)
            && self.assignment == other.assignment
            && self.num_districts == other.num_districts
            && self.aggs == other.aggs
            && self.cut == other.cut
    }
}

fn compute_aggs(graph: &DualGraph, assignment: &[u32], num_districts: u32) -> Vec<Aggregates> {
    let mut aggs = vec![Aggregates::default(); num_districts as usize];
    for (i, &d) in assignment.iter().enumerate() {
        aggs[(d - 1) as usize].add_unit(graph, i as u32);
    }
    for (k, &(_, home)) in graph.incumbents().iter().enumerate() {
        let d = assignment[home as usize];
        aggs[(d - 1) as usize].incumbents.push(k as u32);
    }
    aggs
}

fn compute_single_agg(graph: &DualGraph, members: &[u32], assignment: &[u32], d: u32) -> Aggregates {
    let mut agg = Aggregates::default();
    for &u in members {
        agg.add_unit(graph, u);
    }
    for (k, &(_, home)) in graph.incumbents().iter().enumerate() {
        if assignment[home as usize] == d {
            agg.incumbents.push(k as u32);
        }
    }
    agg
}

/// Whether `members` (ascending unit indices) induce a connected subgraph.
fn connected_subset(graph: &DualGraph, members: &[u32]) -> bool {
    if members.is_empty() {
        return false;
    }
    let member_set: std::collections::HashSet<u32> = members.iter().copied().collect();
    let mut seen = std::collections::HashSet::with_capacity(members.len());
    let mut stack = vec![members[0]];
    seen.insert(members[0]);
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if member_set.contains(&v) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.len() == members.len()
}

impl Plan {
    /// Builds a plan from a full per-unit label vector (labels `1..=n`).
    /// Aggregates and cut edges are computed from scratch; every district is
    /// checked nonempty and contiguous.
    pub fn from_labels(graph: &Arc<DualGraph>, assignment: Vec<u32>) -> Result<Plan, PlanError> {
        assert_eq!(
            assignment.len(),
            graph.num_units(),
            "assignment length must match unit count"
        );
        let num_districts = *assignment.iter().max().expect("graph has units");
        for &d in &assignment {
            if d == 0 {
                return Err(PlanError::LabelOutOfRange {
                    label: 0,
                    num_districts,
                });
            }
        }
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); num_districts as usize];
        for (i, &d) in assignment.iter().enumerate() {
            members[(d - 1) as usize].push(i as u32);
        }
        for (di, m) in members.iter().enumerate() {
            let d = di as u32 + 1;
            if m.is_empty() {
                return Err(PlanError::EmptyDistrict(d));
            }
            if !connected_subset(graph, m) {
                return Err(PlanError::DiscontiguousDistrict(d));
            }
        }
        let aggs = compute_aggs(graph, &assignment, num_districts);
        let cut = graph
            .edges()
            .iter()
            .map(|&(a, b)| assignment[a as usize] != assignment[b as usize])
            .collect();
        Ok(Plan {
            graph: Arc::clone(graph),
            assignment,
            num_districts,
            aggs,
            cut,
        })
    }

    /// Builds a plan from a unit-id → district map, as loaded from an
    /// assignment CSV.
    pub fn from_assignment_map(
        graph: &Arc<DualGraph>,
        map: &HashMap<String, u32>,
        num_districts: u32,
    ) -> Result<Plan, PlanError> {
        for id in map.keys() {
            if graph.index_of(id).is_none() {
                return Err(PlanError::UnknownUnit(id.clone()));
            }
        }
        let mut assignment = Vec::with_capacity(graph.num_units());
        for u in graph.units() {
            match map.get(&u.id) {
                Some(&d) => {
                    if d == 0 || d > num_districts {
                        return Err(PlanError::LabelOutOfRange {
                            label: d,
                            num_districts,
                        });
                    }
                    assignment.push(d);
                }
                None => return Err(PlanError::UnassignedUnit(u.id.clone())),
            }
        }
        let mut present = vec![false; num_districts as usize];
        for &d in &assignment {
            present[(d - 1) as usize] = true;
        }
        if let Some(gap) = present.iter().position(|p| !p) {
            return Err(PlanError::LabelGap(gap as u32 + 1));
        }
        Plan::from_labels(graph, assignment)
    }

    pub fn graph(&self) -> &Arc<DualGraph> {
        &self.graph
    }

    pub fn num_districts(&self) -> u32 {
        self.num_districts
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn label_of(&self, unit: u32) -> u32 {
        self.assignment[unit as usize]
    }

    /// Aggregates for district `d` (1-based).
    pub fn aggregates(&self, d: u32) -> &Aggregates {
        &self.aggs[(d - 1) as usize]
    }

    pub fn district_labels(&self) -> impl Iterator<Item = u32> {
        1..=self.num_districts
    }

    /// Member units of district `d`, ascending.
    pub fn district_units(&self, d: u32) -> Vec<u32> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == d)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Incumbents resident in district `d`.
    pub fn district_incumbents(&self, d: u32) -> Vec<&IncumbentRef> {
        self.aggregates(d)
            .incumbents
            .iter()
            .map(|&k| &self.graph.incumbents()[k as usize].0)
            .collect()
    }

    /// Ideal district population: total over the graph divided by the
    /// district count.
    pub fn ideal_pop(&self) -> f64 {
        self.graph.total_pop() as f64 / self.num_districts as f64
    }

    /// Indices of edges whose endpoints lie in different districts,
    /// ascending.
    pub fn cut_edges(&self) -> Vec<u32> {
        self.cut
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c)
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn is_cut(&self, edge: u32) -> bool {
        self.cut[edge as usize]
    }

    pub fn num_cut_edges(&self) -> usize {
        self.cut.iter().filter(|&&c| c).count()
    }

    /// District pairs `(i, j)`, `i < j`, joined by at least one cut edge.
    pub fn district_adjacency(&self) -> Vec<(u32, u32)> {
        let mut pairs = BTreeSet::new();
        for (ei, &(a, b)) in self.graph.edges().iter().enumerate() {
            if self.cut[ei] {
                let da = self.assignment[a as usize];
                let db = self.assignment[b as usize];
                pairs.insert((da.min(db), da.max(db)));
            }
        }
        pairs.into_iter().collect()
    }

    /// Applies a recombination move, returning the successor plan. Districts
    /// other than the move's two keep bit-identical aggregates; cut flags are
    /// refreshed only for edges incident to the merged region.
    pub fn apply_recom_move(&self, mv: &RecomMove) -> Result<Plan, PlanError> {
        let (a, b) = (mv.district_a, mv.district_b);
        if a == b || a == 0 || b == 0 || a > self.num_districts || b > self.num_districts {
            return Err(PlanError::InvalidMove(format!(
                "district pair ({a}, {b}) is not valid"
            )));
        }
        if mv.new_units_a.is_empty() {
            return Err(PlanError::EmptyDistrict(a));
        }
        if mv.new_units_b.is_empty() {
            return Err(PlanError::EmptyDistrict(b));
        }

        // The move must repartition exactly the current a∪b region.
        let mut merged: Vec<u32> = Vec::new();
        for (i, &d) in self.assignment.iter().enumerate() {
            if d == a || d == b {
                merged.push(i as u32);
            }
        }
        let mut proposed: Vec<u32> = Vec::with_capacity(merged.len());
        proposed.extend_from_slice(&mv.new_units_a);
        proposed.extend_from_slice(&mv.new_units_b);
        proposed.sort_unstable();
        if proposed.windows(2).any(|w| w[0] == w[1]) {
            return Err(PlanError::InvalidMove(
                "new district unit sets overlap".into(),
            ));
        }
        if proposed != merged {
            return Err(PlanError::InvalidMove(
                "move does not repartition exactly the two districts' units".into(),
            ));
        }

        if !connected_subset(&self.graph, &mv.new_units_a) {
            return Err(PlanError::DiscontiguousDistrict(a));
        }
        if !connected_subset(&self.graph, &mv.new_units_b) {
            return Err(PlanError::DiscontiguousDistrict(b));
        }

        let mut assignment = self.assignment.clone();
        for &u in &mv.new_units_a {
            assignment[u as usize] = a;
        }
        for &u in &mv.new_units_b {
            assignment[u as usize] = b;
        }

        let mut aggs = self.aggs.clone();
        aggs[(a - 1) as usize] = compute_single_agg(&self.graph, &mv.new_units_a, &assignment, a);
        aggs[(b - 1) as usize] = compute_single_agg(&self.graph, &mv.new_units_b, &assignment, b);

        let mut cut = self.cut.clone();
        let mut touched: Vec<u32> = merged
            .iter()
            .flat_map(|&u| self.graph.incident_edges(u).iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for ei in touched {
            let (x, y) = self.graph.edges()[ei as usize];
            cut[ei as usize] = assignment[x as usize] != assignment[y as usize];
        }

        Ok(Plan {
            graph: Arc::clone(&self.graph),
            assignment,
            num_districts: self.num_districts,
            aggs,
            cut,
        })
    }

    /// Renders the assignment CSV (`unit_id,district`), one row per unit in
    /// unit order.
    pub fn to_assignment_csv(&self) -> String {
        let mut out = String::from("unit_id,district\n");
        for (i, &d) in self.assignment.iter().enumerate() {
            out.push_str(&self.graph.unit(i as u32).id);
            out.push(',');
            out.push_str(&d.to_string());
            out.push('\n');
        }
        out
    }
}

/// Loads an assignment CSV (`unit_id,district` header) against `graph` and
/// builds the plan. Every graph unit must be assigned exactly once and the
/// labels must cover `1..=num_districts`.
pub fn load_assignment(
    path: impl AsRef<Path>,
    graph: &Arc<DualGraph>,
    num_districts: u32,
) -> Result<Plan, PlanError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| PlanError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_assignment(&text, graph, num_districts)
}

/// Parses assignment CSV text. See [`load_assignment`].
pub fn parse_assignment(
    text: &str,
    graph: &Arc<DualGraph>,
    num_districts: u32,
) -> Result<Plan, PlanError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    {
        let headers = reader
            .headers()
            .map_err(|e| PlanError::MalformedAssignment(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "unit_id" || &headers[1] != "district" {
            return Err(PlanError::MalformedAssignment(format!(
                "expected header `unit_id,district`, found {:?}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut map: HashMap<String, u32> = HashMap::with_capacity(graph.num_units());
    for row in reader.records() {
        let row = row.map_err(|e| PlanError::MalformedAssignment(e.to_string()))?;
        if row.len() != 2 {
            return Err(PlanError::MalformedAssignment(format!(
                "expected 2 fields, found {}",
                row.len()
            )));
        }
        let id = row[0].to_string();
        let d: u32 = row[1].parse().map_err(|_| {
            PlanError::MalformedAssignment(format!("bad district number {:?} for {id:?}", &row[1]))
        })?;
        if map.insert(id.clone(), d).is_some() {
            return Err(PlanError::DuplicateAssignment(id));
        }
    }
    Plan::from_assignment_map(graph, &map, num_districts)
}
