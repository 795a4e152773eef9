//! Embedded data tables for the Connecticut 2022 Assembly maps: per-district
//! population, voting-age composition and partisan lean, and the town →
//! district cross-reference for the 2022 and prior 2012 cycles.

use std::collections::BTreeMap;

const HOUSE_DISTRICTS: &str = include_str!("../data/house_districts.csv");
const SENATE_DISTRICTS: &str = include_str!("../data/senate_districts.csv");
const TOWNS: &str = include_str!("../data/towns.csv");

#[derive(Debug, Clone)]
pub struct DistrictRow {
    pub district: u32,
    pub pop: u64,
    /// Voting-age shares in percent: white, hispanic, black, asian.
    pub vap_pct: [f64; 4],
    /// Partisan lean as printed, e.g. `90D`, `51R`, `50`.
    pub lean: String,
}

impl DistrictRow {
    /// Democratic two-party share encoded by the lean label. Values at the
    /// 55/45 classification breakpoints are nudged half a tenth toward even
    /// so the rounded label round-trips to its own class.
    pub fn dem_share(&self) -> f64 {
        let (pct, party) = if let Some(p) = self.lean.strip_suffix('D') {
            (p.parse::<f64>().unwrap(), 'D')
        } else if let Some(p) = self.lean.strip_suffix('R') {
            (p.parse::<f64>().unwrap(), 'R')
        } else {
            (self.lean.parse::<f64>().unwrap(), '-')
        };
        let winner_share = if (pct - 55.0).abs() < 1e-9 {
            0.5495
        } else {
            pct / 100.0
        };
        match party {
            'R' => 1.0 - winner_share,
            _ => winner_share,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TownRow {
    pub name: String,
    pub pop: u64,
    pub house_2022: Vec<u32>,
    pub senate_2022: Vec<u32>,
    pub house_2012: Vec<u32>,
    pub senate_2012: Vec<u32>,
}

fn parse_list(s: &str) -> Vec<u32> {
    if s.is_empty() {
        return Vec::new();
    }
    let mut v: Vec<u32> = s.split(';').map(|x| x.parse().unwrap()).collect();
    v.sort_unstable();
    v
}

pub fn district_rows(text: &str) -> Vec<DistrictRow> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            DistrictRow {
                district: r[0].parse().unwrap(),
                pop: r[1].parse().unwrap(),
                vap_pct: [
                    r[2].parse().unwrap(),
                    r[3].parse().unwrap(),
                    r[4].parse().unwrap(),
                    r[5].parse().unwrap(),
                ],
                lean: r[6].to_string(),
            }
        })
        .collect()
}

pub fn house_districts() -> Vec<DistrictRow> {
    district_rows(HOUSE_DISTRICTS)
}

pub fn senate_districts() -> Vec<DistrictRow> {
    district_rows(SENATE_DISTRICTS)
}

/// All 169 towns, keyed by name (sorted).
pub fn towns() -> BTreeMap<String, TownRow> {
    let mut reader = csv::Reader::from_reader(TOWNS.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let row = TownRow {
                name: r[0].to_string(),
                pop: r[1].parse().unwrap(),
                house_2022: parse_list(&r[2]),
                senate_2022: parse_list(&r[3]),
                house_2012: parse_list(&r[4]),
                senate_2012: parse_list(&r[5]),
            };
            (row.name.clone(), row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shapes() {
        assert_eq!(house_districts().len(), 151);
        assert_eq!(senate_districts().len(), 36);
        assert_eq!(towns().len(), 169);
    }

    #[test]
    fn every_district_has_a_town() {
        let towns = towns();
        for n in 1..=151u32 {
            assert!(
                towns.values().any(|t| t.house_2022.contains(&n)),
                "house district {n} missing from town table"
            );
            assert!(
                towns.values().any(|t| t.house_2012.contains(&n)),
                "prior house district {n} missing from town table"
            );
        }
        for n in 1..=36u32 {
            assert!(towns.values().any(|t| t.senate_2022.contains(&n)));
            assert!(towns.values().any(|t| t.senate_2012.contains(&n)));
        }
    }

    #[test]
    fn lean_shares_classify_as_printed() {
        let rows = house_districts();
        let d1 = rows.iter().find(|r| r.district == 1).unwrap();
        assert_eq!(d1.lean, "90D");
        assert!((d1.dem_share() - 0.90).abs() < 1e-12);
        let d22 = rows.iter().find(|r| r.district == 22).unwrap();
        assert_eq!(d22.lean, "51R");
        assert!((d22.dem_share() - 0.49).abs() < 1e-12);
        let d48 = rows.iter().find(|r| r.district == 48).unwrap();
        assert_eq!(d48.lean, "50");
        // breakpoint labels stay inside the competitive band
        let d23 = rows.iter().find(|r| r.district == 23).unwrap();
        assert_eq!(d23.lean, "55D");
        assert!(d23.dem_share() < 0.55 && d23.dem_share() > 0.54);
    }
}
