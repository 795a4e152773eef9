//! `audit`: one-shot metrics of an enacted plan, as a human table on stdout
//! and an optional JSON summary.

use crate::CliError;
use redistrict_core::diff::flag_borders;
use redistrict_core::metrics::{
    incumbent_distribution, majority_minority_count, partisan_lean, pop_deviation, town_splits,
};
use redistrict_core::{load_graph, Plan};
use serde_json::json;
use std::collections::BTreeSet;
use std::path::Path;

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn lean_label(dem_share: f64) -> String {
    if dem_share >= 0.5 {
        format!("{:.0}% D", dem_share * 100.0)
    } else {
        format!("{:.0}% R", (1.0 - dem_share) * 100.0)
    }
}

pub fn run(
    graph_path: &Path,
    assignment_path: &Path,
    districts: Option<u32>,
    out_dir: Option<&Path>,
) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let graph = load_graph(graph_path)?;
    let plan = crate::load_plan(&graph, assignment_path, districts)?;

    let deviation = pop_deviation(&plan);
    let splits = town_splits(&plan);
    let mm = majority_minority_count(&plan, 0.5)?;
    let inc = incumbent_distribution(&plan);
    let has_votes = graph.total_votes() > 0.0;
    let lean = if has_votes {
        Some(partisan_lean(&plan)?)
    } else {
        None
    };
    let flags = flag_borders(&plan);

    println!(
        "districts: {}   units: {}   towns: {}",
        plan.num_districts(),
        graph.num_units(),
        graph.num_towns()
    );
    println!("population deviation: {:.2}%", deviation * 100.0);
    println!("town splits: {splits}");
    println!("majority-minority districts: {mm}");
    println!(
        "incumbents: single {}, none {}, multiple {} (single fraction {:.1}%)",
        inc.single,
        inc.zero,
        inc.multi,
        inc.single_frac * 100.0
    );
    if let Some(lean) = &lean {
        println!(
            "partisan lean: {} safe D, {} safe R, {} competitive",
            lean.counts.safe_dem, lean.counts.safe_rep, lean.counts.competitive
        );
    }
    println!("border flags: {}", flags.len());
    println!();

    if has_votes {
        println!("district      pop  vap_w%  vap_h%  vap_b%  vap_a%   lean  towns");
    } else {
        println!("district      pop  vap_w%  vap_h%  vap_b%  vap_a%  towns");
    }
    let mut district_rows = Vec::new();
    for d in plan.district_labels() {
        let agg = plan.aggregates(d);
        let vap = agg.vap_total as f64;
        let shares = [
            agg.vap_white as f64 / vap,
            agg.vap_hispanic as f64 / vap,
            agg.vap_black as f64 / vap,
            agg.vap_asian as f64 / vap,
        ];
        let towns: BTreeSet<&str> = plan
            .district_units(d)
            .iter()
            .map(|&u| graph.town_name(graph.town_of(u)))
            .collect();
        let towns = towns.into_iter().collect::<Vec<_>>().join(", ");
        let dem_share = lean.as_ref().map(|l| l.dem_shares[(d - 1) as usize]);
        match dem_share {
            Some(s) => println!(
                "{d:>8}  {:>7}  {:>5.1}%  {:>5.1}%  {:>5.1}%  {:>5.1}%  {:>5}  {towns}",
                thousands(agg.pop),
                shares[0] * 100.0,
                shares[1] * 100.0,
                shares[2] * 100.0,
                shares[3] * 100.0,
                lean_label(s),
            ),
            None => println!(
                "{d:>8}  {:>7}  {:>5.1}%  {:>5.1}%  {:>5.1}%  {:>5.1}%  {towns}",
                thousands(agg.pop),
                shares[0] * 100.0,
                shares[1] * 100.0,
                shares[2] * 100.0,
                shares[3] * 100.0,
            ),
        }
        district_rows.push(district_json(&plan, d, dem_share, &towns));
    }
    eprintln!("audit completed in {:.3}s", start.elapsed().as_secs_f64());

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let doc = json!({
            "graph": graph_path.display().to_string(),
            "assignment": assignment_path.display().to_string(),
            "num_districts": plan.num_districts(),
            "num_units": graph.num_units(),
            "pop_deviation": deviation,
            "town_splits": splits,
            "majority_minority_count": mm,
            "incumbents": {
                "single": inc.single,
                "zero": inc.zero,
                "multi": inc.multi,
                "single_frac": inc.single_frac,
            },
            "lean_counts": lean.as_ref().map(|l| json!({
                "safe_dem": l.counts.safe_dem,
                "safe_rep": l.counts.safe_rep,
                "competitive": l.counts.competitive,
            })),
            "districts": district_rows,
            "border_flags": flags.iter().map(|f| json!({
                "district": f.district,
                "incumbent": f.incumbent.name,
                "party": f.incumbent.party.to_string(),
                "home_unit": f.incumbent.home_unit,
                "offending_edges": f.offending_edges,
            })).collect::<Vec<_>>(),
        });
        std::fs::write(
            dir.join("audit.json"),
            serde_json::to_string_pretty(&doc).expect("audit doc serializes"),
        )?;
    }
    Ok(())
}

fn district_json(plan: &Plan, d: u32, dem_share: Option<f64>, towns: &str) -> serde_json::Value {
    let agg = plan.aggregates(d);
    json!({
        "district": d,
        "pop": agg.pop,
        "vap_total": agg.vap_total,
        "vap_white": agg.vap_white,
        "vap_hispanic": agg.vap_hispanic,
        "vap_black": agg.vap_black,
        "vap_asian": agg.vap_asian,
        "dem_votes": agg.dem_votes,
        "rep_votes": agg.rep_votes,
        "dem_share": dem_share,
        "incumbents": plan.district_incumbents(d).iter().map(|i| i.name.clone()).collect::<Vec<_>>(),
        "towns": towns,
    })
}
