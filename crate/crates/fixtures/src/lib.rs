//! Connecticut 2022 Assembly map fixtures.
//!
//! The builders here turn the published district tables (district populations,
//! voting-age composition, partisan lean) and the town → district
//! cross-reference into unit-level dual graphs the engine can ingest: one
//! unit per half of each town–district intersection, district-chain and
//! town-chain adjacency, vote tallies solved so every district reproduces its
//! printed two-party share, and a prior-cycle assignment over the same units
//! for plan comparison. Synthetic grids for chain testing live in
//! [`synthetic`].

pub mod synthetic;
mod tables;

pub use tables::{DistrictRow, TownRow};

use redistrict_core::diff::Classification;
use redistrict_core::graph::{DualGraph, IncumbentRef, Party, Unit};
use redistrict_core::partition::{parse_assignment, Plan};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chamber {
    House,
    Senate,
}

/// One of the most competitive districts, with its 2020 margin and the
/// change classification the fixture's vote data encodes.
#[derive(Debug, Clone)]
pub struct CompetitiveItem {
    pub district: u32,
    pub margin_votes: i64,
    pub margin_pct: f64,
    pub incumbent_party: Party,
    pub expected: Classification,
}

/// The ten House districts decided by margins within 2.5% in 2020.
pub fn house_items() -> Vec<CompetitiveItem> {
    use Classification::*;
    use Party::*;
    [
        (90, 7, 0.0005, Rep, Benefit),
        (103, 120, 0.0095, Dem, Benefit),
        (119, 153, 0.011, Rep, Benefit),
        (37, 200, 0.014, Rep, Benefit),
        (123, 235, 0.017, Rep, Benefit),
        (35, 274, 0.019, Dem, Neutral),
        (132, 293, 0.020, Dem, Benefit),
        (43, 295, 0.020, Rep, Benefit),
        (38, 345, 0.024, Rep, Benefit),
        (55, 366, 0.024, Rep, Disadvantage),
    ]
    .into_iter()
    .map(
        |(district, margin_votes, margin_pct, incumbent_party, expected)| CompetitiveItem {
            district,
            margin_votes,
            margin_pct,
            incumbent_party,
            expected,
        },
    )
    .collect()
}

/// The nine Senate districts decided by margins within 6.0% in 2020.
pub fn senate_items() -> Vec<CompetitiveItem> {
    use Classification::*;
    use Party::*;
    [
        (35, 625, 0.011, Rep, Benefit),
        (20, 1177, 0.023, Rep, Neutral),
        (36, -1562, 0.028, Rep, Benefit),
        (28, 2098, 0.034, Rep, Benefit),
        (17, 2076, 0.043, Dem, Benefit),
        (29, 1878, 0.047, Dem, Benefit),
        (18, 2435, 0.048, Rep, Neutral),
        (8, 2883, 0.050, Rep, Benefit),
        (13, 2602, 0.055, Dem, Benefit),
    ]
    .into_iter()
    .map(
        |(district, margin_votes, margin_pct, incumbent_party, expected)| CompetitiveItem {
            district,
            margin_votes,
            margin_pct,
            incumbent_party,
            expected,
        },
    )
    .collect()
}

/// A complete on-disk-ready fixture: graph, enacted (2022) and prior (2012)
/// assignments, and the competitive-margin table.
pub struct Fixture {
    pub name: &'static str,
    pub num_districts: u32,
    pub graph: Arc<DualGraph>,
    pub graph_json: String,
    pub enacted_csv: String,
    pub prior_csv: String,
    pub margins_csv: String,
    pub enacted: Plan,
    pub prior: Plan,
    pub items: Vec<CompetitiveItem>,
}

pub fn house() -> Fixture {
    let towns = tables::towns();
    build(BuildSpec {
        name: "house",
        districts: tables::house_districts(),
        town_new: towns
            .values()
            .map(|t| (t.name.clone(), t.house_2022.clone()))
            .collect(),
        town_old: towns
            .values()
            .map(|t| (t.name.clone(), t.house_2012.clone()))
            .collect(),
        // 2012 → 2022 boundary shifts inside the most competitive districts,
        // at town-part granularity: (town, 2022 district, part, 2012 district).
        overrides: vec![
            ("Wallingford", 90, 'b', 86),
            ("Cheshire", 103, 'b', 90),
            ("Orange", 119, 'b', 117),
            ("Trumbull", 123, 'b', 122),
            ("Trumbull", 112, 'a', 123),
            ("Fairfield", 132, 'b', 133),
            ("Fairfield", 133, 'b', 132),
            ("Montville", 38, 'b', 42),
            ("Montville", 139, 'b', 38),
        ],
        // Democratic share pinned on the moved town parts so each
        // competitive district's changes favor (or harm) its incumbent the
        // way the 2020 precinct results did.
        pins: vec![
            ("Middlefield", 90, 'a', 0.44),
            ("Middlefield", 90, 'b', 0.44),
            ("Wallingford", 90, 'b', 0.44),
            ("Cheshire", 83, 'a', 0.56),
            ("Cheshire", 83, 'b', 0.56),
            ("Hamden", 103, 'a', 0.56),
            ("Hamden", 103, 'b', 0.56),
            ("Cheshire", 103, 'b', 0.50),
            ("Southington", 22, 'a', 0.44),
            ("Southington", 22, 'b', 0.44),
            ("Orange", 119, 'b', 0.44),
            ("Montville", 37, 'a', 0.40),
            ("Montville", 37, 'b', 0.40),
            ("Salem", 34, 'a', 0.47),
            ("Salem", 34, 'b', 0.47),
            ("Trumbull", 123, 'b', 0.44),
            ("Trumbull", 112, 'a', 0.56),
            ("Fairfield", 132, 'b', 0.60),
            ("Fairfield", 133, 'b', 0.53),
            ("Ledyard", 43, 'a', 0.44),
            ("Ledyard", 43, 'b', 0.44),
            ("Stonington", 41, 'a', 0.56),
            ("Stonington", 41, 'b', 0.56),
            ("Montville", 38, 'b', 0.50),
            ("Montville", 139, 'b', 0.58),
            ("Glastonbury", 55, 'a', 0.56),
            ("Glastonbury", 55, 'b', 0.56),
            ("Bolton", 8, 'a', 0.44),
            ("Bolton", 8, 'b', 0.44),
        ],
        items: house_items(),
        // District 42 relocated across the state; its seat was open.
        no_incumbent: Some(42),
        incumbent_prefix: 'H',
    })
}

pub fn senate() -> Fixture {
    let towns = tables::towns();
    build(BuildSpec {
        name: "senate",
        districts: tables::senate_districts(),
        town_new: towns
            .values()
            .map(|t| (t.name.clone(), t.senate_2022.clone()))
            .collect(),
        town_old: towns
            .values()
            .map(|t| (t.name.clone(), t.senate_2012.clone()))
            .collect(),
        overrides: vec![
            ("New Canaan", 36, 'b', 26),
            ("Stamford", 26, 'a', 36),
            ("Weston", 26, 'b', 28),
            ("Westport", 26, 'b', 28),
            ("Hamden", 17, 'b', 11),
            ("Harwinton", 8, 'b', 31),
            ("Middletown", 13, 'b', 9),
        ],
        pins: vec![
            ("Thompson", 35, 'a', 0.44),
            ("Thompson", 35, 'b', 0.44),
            ("Pomfret", 29, 'a', 0.56),
            ("Pomfret", 29, 'b', 0.56),
            ("New Canaan", 36, 'b', 0.44),
            ("Stamford", 26, 'a', 0.56),
            ("Bethel", 28, 'a', 0.50),
            ("Bethel", 28, 'b', 0.50),
            ("Brookfield", 28, 'a', 0.44),
            ("Brookfield", 28, 'b', 0.44),
            ("Weston", 26, 'b', 0.58),
            ("Westport", 26, 'b', 0.58),
            ("Hamden", 17, 'b', 0.56),
            ("Harwinton", 8, 'b', 0.44),
            ("Norfolk", 30, 'a', 0.50),
            ("Norfolk", 30, 'b', 0.50),
            ("Middletown", 13, 'b', 0.56),
            ("Middlefield", 12, 'a', 0.44),
            ("Middlefield", 12, 'b', 0.44),
        ],
        items: senate_items(),
        no_incumbent: None,
        incumbent_prefix: 'S',
    })
}

pub struct FixturePaths {
    pub graph: PathBuf,
    pub enacted: PathBuf,
    pub prior: PathBuf,
    pub margins: PathBuf,
}

/// Writes the fixture's four files into `dir` as
/// `{name}_graph.json`, `{name}_enacted.csv`, `{name}_prior.csv`,
/// `{name}_margins.csv`.
pub fn write_fixture(fixture: &Fixture, dir: &Path) -> std::io::Result<FixturePaths> {
    std::fs::create_dir_all(dir)?;
    let paths = FixturePaths {
        graph: dir.join(format!("{}_graph.json", fixture.name)),
        enacted: dir.join(format!("{}_enacted.csv", fixture.name)),
        prior: dir.join(format!("{}_prior.csv", fixture.name)),
        margins: dir.join(format!("{}_margins.csv", fixture.name)),
    };
    std::fs::write(&paths.graph, &fixture.graph_json)?;
    std::fs::write(&paths.enacted, &fixture.enacted_csv)?;
    std::fs::write(&paths.prior, &fixture.prior_csv)?;
    std::fs::write(&paths.margins, &fixture.margins_csv)?;
    Ok(paths)
}

struct BuildSpec {
    name: &'static str,
    districts: Vec<DistrictRow>,
    town_new: BTreeMap<String, Vec<u32>>,
    town_old: BTreeMap<String, Vec<u32>>,
    overrides: Vec<(&'static str, u32, char, u32)>,
    pins: Vec<(&'static str, u32, char, f64)>,
    items: Vec<CompetitiveItem>,
    no_incumbent: Option<u32>,
    incumbent_prefix: char,
}

#[derive(Debug, Clone)]
struct Key {
    town: String,
    district: u32,
    copy: char,
}

fn unit_id(k: &Key) -> String {
    format!("{}:{:03}{}", k.town, k.district, k.copy)
}

fn build(spec: BuildSpec) -> Fixture {
    let n = spec.districts.len() as u32;

    // Two units per town–district intersection, town-major order.
    let mut keys: Vec<Key> = Vec::new();
    for (town, districts) in &spec.town_new {
        for &d in districts {
            assert!(d >= 1 && d <= n, "district {d} out of range in {town}");
            for copy in ['a', 'b'] {
                keys.push(Key {
                    town: town.clone(),
                    district: d,
                    copy,
                });
            }
        }
    }
    let index: HashMap<(String, u32, char), usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| ((k.town.clone(), k.district, k.copy), i))
        .collect();
    let lookup = |town: &str, d: u32, copy: char| -> usize {
        *index
            .get(&(town.to_string(), d, copy))
            .unwrap_or_else(|| panic!("no unit {town}:{d}{copy}"))
    };

    let mut district_units: Vec<Vec<usize>> = vec![Vec::new(); n as usize];
    for (i, k) in keys.iter().enumerate() {
        district_units[(k.district - 1) as usize].push(i);
    }

    // Populations: the district total split near-evenly over its units.
    let mut pop = vec![0u64; keys.len()];
    for row in &spec.districts {
        let units = &district_units[(row.district - 1) as usize];
        assert!(!units.is_empty(), "district {} has no towns", row.district);
        let base = row.pop / units.len() as u64;
        let rem = (row.pop % units.len() as u64) as usize;
        for (j, &u) in units.iter().enumerate() {
            pop[u] = base + u64::from(j < rem);
        }
    }

    // Voting-age population: 78% of total, groups per the printed shares.
    let mut vap = vec![[0u64; 5]; keys.len()]; // total, white, hispanic, black, asian
    for row in &spec.districts {
        let tenths: Vec<u64> = row
            .vap_pct
            .iter()
            .map(|p| (p * 10.0).round() as u64)
            .collect();
        for &u in &district_units[(row.district - 1) as usize] {
            let total = pop[u] * 78 / 100;
            vap[u][0] = total;
            for g in 0..4 {
                vap[u][g + 1] = (total * tenths[g] + 500) / 1000;
            }
        }
    }

    // Votes: every unit carries pop/2 two-party votes. Pinned units hold the
    // share encoded for the competitive-district changes; the rest of each
    // district is solved so the district share matches its printed lean.
    let votes: Vec<f64> = pop.iter().map(|&p| p as f64 * 0.5).collect();
    let mut pin_of: HashMap<usize, f64> = HashMap::new();
    for &(town, d, copy, share) in &spec.pins {
        let u = lookup(town, d, copy);
        if let Some(prev) = pin_of.insert(u, share) {
            assert_eq!(prev, share, "conflicting pins on {town}:{d}{copy}");
        }
    }
    let mut dem = vec![0.0f64; keys.len()];
    for row in &spec.districts {
        let units = &district_units[(row.district - 1) as usize];
        let vd: f64 = units.iter().map(|&u| votes[u]).sum();
        let target = row.dem_share() * vd;
        let pinned_dem: f64 = units
            .iter()
            .filter_map(|u| pin_of.get(u).map(|s| s * votes[*u]))
            .sum();
        let unpinned_votes: f64 = units
            .iter()
            .filter(|u| !pin_of.contains_key(u))
            .map(|&u| votes[u])
            .sum();
        let rest_share = if unpinned_votes > 0.0 {
            (target - pinned_dem) / unpinned_votes
        } else {
            assert!(
                (pinned_dem - target).abs() < 1e-6,
                "district {} fully pinned away from its lean",
                row.district
            );
            0.0
        };
        assert!(
            (-1e-9..=1.0 + 1e-9).contains(&rest_share),
            "district {}: unpinned share {} out of range",
            row.district,
            rest_share
        );
        for &u in units {
            dem[u] = votes[u] * pin_of.get(&u).copied().unwrap_or(rest_share);
        }
    }

    // Margins table; parties double as the graph's incumbent parties.
    let mut margin_of: BTreeMap<u32, (i64, f64, Party)> = spec
        .districts
        .iter()
        .map(|row| {
            let party = if row.dem_share() >= 0.5 {
                Party::Dem
            } else {
                Party::Rep
            };
            (row.district, (5000, 0.10, party))
        })
        .collect();
    for item in &spec.items {
        margin_of.insert(
            item.district,
            (item.margin_votes, item.margin_pct, item.incumbent_party),
        );
    }

    // Prior-cycle assignment: parts stay with their district where it
    // remained in the town; parts of districts new to a town map onto the
    // districts that left it (round-robin), plus the explicit overrides.
    let mut old = vec![0u32; keys.len()];
    for (town, new_list) in &spec.town_new {
        let old_list = &spec.town_old[town];
        let departed: Vec<u32> = old_list
            .iter()
            .copied()
            .filter(|d| !new_list.contains(d))
            .collect();
        let mut rr = 0usize;
        for &d in new_list {
            for copy in ['a', 'b'] {
                let u = lookup(town, d, copy);
                old[u] = if old_list.contains(&d) {
                    d
                } else if !departed.is_empty() {
                    let x = departed[rr % departed.len()];
                    rr += 1;
                    x
                } else {
                    old_list[0]
                };
            }
        }
    }
    for &(town, d, copy, od) in &spec.overrides {
        assert!(
            spec.town_old[town].contains(&od),
            "{town} was never in district {od}"
        );
        old[lookup(town, d, copy)] = od;
    }
    let mut covered = vec![false; n as usize];
    for &o in &old {
        covered[(o - 1) as usize] = true;
    }
    let missing: Vec<u32> = (1..=n).filter(|&d| !covered[(d - 1) as usize]).collect();
    assert!(missing.is_empty(), "prior plan lost districts {missing:?}");

    // Adjacency: chains through each district (both cycles) keep every
    // district contiguous; chains through each town put the within-town
    // borders on the graph; bridges between consecutive districts keep the
    // whole graph connected.
    let mut edge_set: std::collections::BTreeSet<(usize, usize)> =
        std::collections::BTreeSet::new();
    fn add_edge(set: &mut std::collections::BTreeSet<(usize, usize)>, a: usize, b: usize) {
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    for units in &district_units {
        for w in units.windows(2) {
            add_edge(&mut edge_set, w[0], w[1]);
        }
    }
    let mut old_units: Vec<Vec<usize>> = vec![Vec::new(); n as usize];
    for (i, &o) in old.iter().enumerate() {
        old_units[(o - 1) as usize].push(i);
    }
    for units in &old_units {
        for w in units.windows(2) {
            add_edge(&mut edge_set, w[0], w[1]);
        }
    }
    let mut start = 0;
    while start < keys.len() {
        let town = &keys[start].town;
        let mut end = start;
        while end < keys.len() && &keys[end].town == town {
            end += 1;
        }
        for i in start..end - 1 {
            add_edge(&mut edge_set, i, i + 1);
        }
        start = end;
    }
    for d in 1..n {
        let last = *district_units[(d - 1) as usize].last().unwrap();
        let first = district_units[d as usize][0];
        add_edge(&mut edge_set, last, first);
    }

    // Materialize the graph.
    let units: Vec<Unit> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let id = unit_id(k);
            let incumbents = {
                let d = k.district;
                let home = district_units[(d - 1) as usize][0];
                if home == i && spec.no_incumbent != Some(d) {
                    let (_, _, party) = margin_of[&d];
                    vec![IncumbentRef {
                        name: format!("{}-{:03}", spec.incumbent_prefix, d),
                        party,
                        home_unit: id.clone(),
                    }]
                } else {
                    Vec::new()
                }
            };
            Unit {
                id,
                pop: pop[i],
                vap_total: vap[i][0],
                vap_white: vap[i][1],
                vap_hispanic: vap[i][2],
                vap_black: vap[i][3],
                vap_asian: vap[i][4],
                town: k.town.clone(),
                dem_votes: dem[i],
                rep_votes: votes[i] - dem[i],
                incumbents,
            }
        })
        .collect();
    let edge_ids: Vec<(String, String)> = edge_set
        .iter()
        .map(|&(a, b)| (unit_id(&keys[a]), unit_id(&keys[b])))
        .collect();
    let graph = Arc::new(DualGraph::new(units, edge_ids).expect("fixture graph is valid"));
    let graph_json = graph.to_json().to_string();

    let mut enacted_csv = String::from("unit_id,district\n");
    let mut prior_csv = String::from("unit_id,district\n");
    for (i, k) in keys.iter().enumerate() {
        enacted_csv.push_str(&format!("{},{}\n", unit_id(k), k.district));
        prior_csv.push_str(&format!("{},{}\n", unit_id(k), old[i]));
    }
    let mut margins_csv = String::from("district,margin_votes,margin_pct,incumbent_party\n");
    for (d, (votes, pct, party)) in &margin_of {
        margins_csv.push_str(&format!("{d},{votes},{pct},{party}\n"));
    }

    let enacted = parse_assignment(&enacted_csv, &graph, n).expect("enacted plan is valid");
    let prior = parse_assignment(&prior_csv, &graph, n).expect("prior plan is valid");

    Fixture {
        name: spec.name,
        num_districts: n,
        graph,
        graph_json,
        enacted_csv,
        prior_csv,
        margins_csv,
        enacted,
        prior,
        items: spec.items,
    }
}
