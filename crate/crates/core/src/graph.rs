//! The dual graph of geographic units and its on-disk formats.
//!
//! Vertices are geographic units (blocks, block groups, or precincts — the
//! engine does not care which) carrying population, voting-age population by
//! group, a town label, aggregated two-party vote tallies, and resident
//! incumbents. Edges join units that border each other. The graph is
//! immutable after construction and shared by reference everywhere else.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

/// Party affiliation of an incumbent, `"D"`/`"R"`/`"O"` on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "D")]
    Dem,
    #[serde(rename = "R")]
    Rep,
    #[serde(rename = "O")]
    Other,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Dem => write!(f, "D"),
            Party::Rep => write!(f, "R"),
            Party::Other => write!(f, "O"),
        }
    }
}

/// A sitting legislator, identified by residence unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncumbentRef {
    pub name: String,
    pub party: Party,
    pub home_unit: String,
}

/// One geographic unit: the attributes of a single dual-graph vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub id: String,
    pub pop: u64,
    pub vap_total: u64,
    pub vap_white: u64,
    pub vap_hispanic: u64,
    pub vap_black: u64,
    pub vap_asian: u64,
    pub town: String,
    pub dem_votes: f64,
    pub rep_votes: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incumbents: Vec<IncumbentRef>,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed file {path}: {detail}")]
    MalformedFile { path: String, detail: String },
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("duplicate unit id {0:?}")]
    DuplicateUnitId(String),
    #[error("edge endpoint {0:?} is not a defined unit")]
    DanglingEdge(String),
    #[error("graph is disconnected: unit {0:?} is unreachable from {1:?}")]
    DisconnectedGraph(String, String),
}

/// The immutable dual graph.
///
/// Unit ids map to dense indices at load time; all downstream structures
/// (plans, moves, metric computations) work in index space and only translate
/// back to string ids at the serialization boundary.
#[derive(Debug)]
pub struct DualGraph {
    units: Vec<Unit>,
    index_of: HashMap<String, u32>,
    /// Canonical edge list: `a < b`, sorted, no duplicates.
    edges: Vec<(u32, u32)>,
    neighbors: Vec<Vec<u32>>,
    /// Edge indices incident to each unit.
    incident_edges: Vec<Vec<u32>>,
    towns: Vec<String>,
    town_of: Vec<u32>,
    town_units: Vec<Vec<u32>>,
    /// Flattened `(incumbent, home unit index)` over all units.
    incumbents: Vec<(IncumbentRef, u32)>,
    total_pop: u64,
}

impl DualGraph {
    /// Validates units and edges and builds the indexed graph.
    pub fn new(units: Vec<Unit>, edge_ids: Vec<(String, String)>) -> Result<Self, GraphError> {
        let mut index_of = HashMap::with_capacity(units.len());
        for (i, u) in units.iter().enumerate() {
            if index_of.insert(u.id.clone(), i as u32).is_some() {
                return Err(GraphError::DuplicateUnitId(u.id.clone()));
            }
            if u.vap_total > u.pop {
                return Err(GraphError::SchemaViolation(format!(
                    "unit {:?}: vap_total {} exceeds pop {}",
                    u.id, u.vap_total, u.pop
                )));
            }
            for (name, v) in [
                ("vap_white", u.vap_white),
                ("vap_hispanic", u.vap_hispanic),
                ("vap_black", u.vap_black),
                ("vap_asian", u.vap_asian),
            ] {
                if v > u.vap_total {
                    return Err(GraphError::SchemaViolation(format!(
                        "unit {:?}: {} {} exceeds vap_total {}",
                        u.id, name, v, u.vap_total
                    )));
                }
            }
            if !u.dem_votes.is_finite()
                || !u.rep_votes.is_finite()
                || u.dem_votes < 0.0
                || u.rep_votes < 0.0
            {
                return Err(GraphError::SchemaViolation(format!(
                    "unit {:?}: negative or non-finite vote tally",
                    u.id
                )));
            }
        }

        let mut edges = Vec::with_capacity(edge_ids.len());
        for (a, b) in &edge_ids {
            let ia = *index_of
                .get(a)
                .ok_or_else(|| GraphError::DanglingEdge(a.clone()))?;
            let ib = *index_of
                .get(b)
                .ok_or_else(|| GraphError::DanglingEdge(b.clone()))?;
            if ia == ib {
                return Err(GraphError::SchemaViolation(format!(
                    "self-loop edge on unit {a:?}"
                )));
            }
            edges.push((ia.min(ib), ia.max(ib)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = w[0];
            return Err(GraphError::SchemaViolation(format!(
                "duplicate edge {:?}–{:?}",
                units[a as usize].id, units[b as usize].id
            )));
        }

        let n = units.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut incident_edges = vec![Vec::new(); n];
        for (ei, &(a, b)) in edges.iter().enumerate() {
            neighbors[a as usize].push(b);
            neighbors[b as usize].push(a);
            incident_edges[a as usize].push(ei as u32);
            incident_edges[b as usize].push(ei as u32);
        }

        // Town index: every unit lands in exactly one bucket.
        let mut towns: Vec<String> = Vec::new();
        let mut town_ids: HashMap<String, u32> = HashMap::new();
        let mut town_of = Vec::with_capacity(n);
        for u in &units {
            let t = *town_ids.entry(u.town.clone()).or_insert_with(|| {
                towns.push(u.town.clone());
                (towns.len() - 1) as u32
            });
            town_of.push(t);
        }
        let mut town_units = vec![Vec::new(); towns.len()];
        for (i, &t) in town_of.iter().enumerate() {
            town_units[t as usize].push(i as u32);
        }

        let mut incumbents = Vec::new();
        for (i, u) in units.iter().enumerate() {
            for inc in &u.incumbents {
                if !index_of.contains_key(&inc.home_unit) {
                    return Err(GraphError::SchemaViolation(format!(
                        "incumbent {:?}: home_unit {:?} is not a defined unit",
                        inc.name, inc.home_unit
                    )));
                }
                if inc.home_unit != u.id {
                    return Err(GraphError::SchemaViolation(format!(
                        "incumbent {:?}: home_unit {:?} does not match enclosing unit {:?}",
                        inc.name, inc.home_unit, u.id
                    )));
                }
                incumbents.push((inc.clone(), i as u32));
            }
        }

        let total_pop = units.iter().map(|u| u.pop).sum();
        let graph = DualGraph {
            units,
            index_of,
            edges,
            neighbors,
            incident_edges,
            towns,
            town_of,
            town_units,
            incumbents,
            total_pop,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let n = self.units.len();
        if n == 0 {
            return Err(GraphError::SchemaViolation("graph has no units".into()));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.neighbors[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count != n {
            let bad = seen.iter().position(|s| !s).unwrap();
            return Err(GraphError::DisconnectedGraph(
                self.units[bad].id.clone(),
                self.units[0].id.clone(),
            ));
        }
        Ok(())
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn unit(&self, idx: u32) -> &Unit {
        &self.units[idx as usize]
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index_of.get(id).copied()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, idx: u32) -> &[u32] {
        &self.neighbors[idx as usize]
    }

    pub fn incident_edges(&self, idx: u32) -> &[u32] {
        &self.incident_edges[idx as usize]
    }

    pub fn num_towns(&self) -> usize {
        self.towns.len()
    }

    pub fn town_name(&self, town: u32) -> &str {
        &self.towns[town as usize]
    }

    pub fn town_of(&self, idx: u32) -> u32 {
        self.town_of[idx as usize]
    }

    pub fn town_units(&self, town: u32) -> &[u32] {
        &self.town_units[town as usize]
    }

    /// All incumbents with their home unit index.
    pub fn incumbents(&self) -> &[(IncumbentRef, u32)] {
        &self.incumbents
    }

    pub fn total_pop(&self) -> u64 {
        self.total_pop
    }

    pub fn total_votes(&self) -> f64 {
        self.units.iter().map(|u| u.dem_votes + u.rep_votes).sum()
    }

    /// Whether the endpoints of edge `ei` lie in the same town.
    pub fn edge_within_town(&self, ei: u32) -> bool {
        let (a, b) = self.edges[ei as usize];
        self.town_of[a as usize] == self.town_of[b as usize]
    }

    /// Serializes back to the graph JSON document. Reloading the result
    /// yields an identical graph.
    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<[&str; 2]> = self
            .edges
            .iter()
            .map(|&(a, b)| [self.units[a as usize].id.as_str(), self.units[b as usize].id.as_str()])
            .collect();
        serde_json::json!({ "units": self.units, "edges": edges })
    }
}

#[derive(Deserialize)]
struct GraphDoc {
    units: Vec<Unit>,
    edges: Vec<(String, String)>,
}

/// Loads and validates a graph JSON file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<Arc<DualGraph>, GraphError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_graph(&text, &path.display().to_string())
}

/// Parses a graph JSON document from a string.
///
/// JSON syntax errors map to [`GraphError::MalformedFile`]; structural
/// problems (missing fields, wrong types, negative counts) map to
/// [`GraphError::SchemaViolation`].
pub fn parse_graph(text: &str, path: &str) -> Result<Arc<DualGraph>, GraphError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| GraphError::MalformedFile {
            path: path.to_string(),
            detail: e.to_string(),
        })?;
    let doc: GraphDoc = serde_json::from_value(value)
        .map_err(|e| GraphError::SchemaViolation(e.to_string()))?;
    Ok(Arc::new(DualGraph::new(doc.units, doc.edges)?))
}
