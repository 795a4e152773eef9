//! `compare`: diff two assignments over one graph and classify each
//! competitive district's changes for its incumbent.

use crate::CliError;
use redistrict_core::diff::{classify_change, diff_plans, relabel_by_overlap, DistrictDiff};
use redistrict_core::graph::{DualGraph, Party};
use redistrict_core::load_graph;
use serde_json::json;
use std::collections::BTreeMap;
use std::path::Path;

struct MarginRow {
    margin_votes: i64,
    margin_pct: f64,
    incumbent_party: Party,
}

fn read_margins(path: &Path) -> Result<BTreeMap<u32, MarginRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if record.len() != 4 {
            return Err(CliError::Input(format!(
                "{}: expected 4 fields per row",
                path.display()
            )));
        }
        let parse_err =
            |field: &str| CliError::Input(format!("{}: bad {field} {record:?}", path.display()));
        let district: u32 = record[0].parse().map_err(|_| parse_err("district"))?;
        let margin_votes: i64 = record[1].parse().map_err(|_| parse_err("margin_votes"))?;
        let margin_pct: f64 = record[2].parse().map_err(|_| parse_err("margin_pct"))?;
        let incumbent_party = match &record[3] {
            "D" => Party::Dem,
            "R" => Party::Rep,
            "O" => Party::Other,
            _ => return Err(parse_err("incumbent_party")),
        };
        rows.insert(
            district,
            MarginRow {
                margin_votes,
                margin_pct,
                incumbent_party,
            },
        );
    }
    Ok(rows)
}

/// Groups a change set's units by town; a rollup is "whole town" when every
/// unit of that town moved.
fn town_rollup(graph: &DualGraph, units: &[u32]) -> Vec<serde_json::Value> {
    let mut by_town: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for &u in units {
        let unit = graph.unit(u);
        by_town
            .entry(unit.town.clone())
            .or_default()
            .push(unit.id.clone());
    }
    by_town
        .into_iter()
        .map(|(town, ids)| {
            let town_size = graph
                .units()
                .iter()
                .filter(|u| u.town == town)
                .count();
            json!({
                "town": town,
                "units": ids,
                "whole_town": ids.len() == town_size,
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    graph_path: &Path,
    old_path: &Path,
    new_path: &Path,
    margins_path: &Path,
    margin_cut: f64,
    neutral_band: f64,
    match_by_overlap: bool,
    out_dir: Option<&Path>,
) -> Result<(), CliError> {
    let graph = load_graph(graph_path)?;
    let new_plan = crate::load_plan(&graph, new_path, None)?;
    let old_plan = crate::load_plan(&graph, old_path, Some(new_plan.num_districts()))?;
    let old_plan = if match_by_overlap {
        relabel_by_overlap(&old_plan, &new_plan)?
    } else {
        old_plan
    };
    let margins = read_margins(margins_path)?;
    let diff = diff_plans(&old_plan, &new_plan)?;

    let mut reported: Vec<(u32, &MarginRow)> = margins
        .iter()
        .filter(|(_, m)| m.margin_pct.abs() <= margin_cut)
        .map(|(&d, m)| (d, m))
        .collect();
    reported.sort_by(|a, b| {
        a.1.margin_pct
            .abs()
            .partial_cmp(&b.1.margin_pct.abs())
            .expect("margins are finite")
            .then(a.0.cmp(&b.0))
    });

    let mut entries = Vec::new();
    for (d, margin) in &reported {
        let district_diff: DistrictDiff = diff.district(*d);
        let classification = if district_diff.is_empty() {
            "neutral".to_string()
        } else {
            match classify_change(&district_diff, margin.incumbent_party, neutral_band) {
                Ok(c) => serde_json::to_value(c)
                    .expect("classification serializes")
                    .as_str()
                    .expect("classification is a string")
                    .to_string(),
                Err(redistrict_core::diff::DiffError::NoVotesOnChangedUnits) => {
                    "insufficient_data".to_string()
                }
                Err(e) => return Err(e.into()),
            }
        };
        println!(
            "district {d}: margin {:.2}% ({} votes, {} incumbent) -> {classification}",
            margin.margin_pct * 100.0,
            margin.margin_votes,
            margin.incumbent_party
        );
        entries.push(json!({
            "district": d,
            "margin_votes": margin.margin_votes,
            "margin_pct": margin.margin_pct,
            "incumbent_party": margin.incumbent_party.to_string(),
            "classification": classification,
            "additions": {
                "units": district_diff.additions.iter().map(|&u| graph.unit(u).id.clone()).collect::<Vec<_>>(),
                "towns": town_rollup(&graph, &district_diff.additions),
                "dem_votes": district_diff.added_dem,
                "rep_votes": district_diff.added_rep,
            },
            "subtractions": {
                "units": district_diff.subtractions.iter().map(|&u| graph.unit(u).id.clone()).collect::<Vec<_>>(),
                "towns": town_rollup(&graph, &district_diff.subtractions),
                "dem_votes": district_diff.removed_dem,
                "rep_votes": district_diff.removed_rep,
            },
        }));
    }
    println!("{} districts within margin cut {margin_cut}", reported.len());

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let doc = json!({
            "graph": graph_path.display().to_string(),
            "old": old_path.display().to_string(),
            "new": new_path.display().to_string(),
            "margin_cut": margin_cut,
            "neutral_band": neutral_band,
            "match_by_overlap": match_by_overlap,
            "districts": entries,
        });
        std::fs::write(
            dir.join("compare.json"),
            serde_json::to_string_pretty(&doc).expect("compare doc serializes"),
        )?;
    }
    Ok(())
}
