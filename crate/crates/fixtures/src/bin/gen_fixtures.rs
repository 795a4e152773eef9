//! Writes the Connecticut House and Senate fixtures to a directory.
//!
//! Usage: `gen-fixtures [OUT_DIR]` (default `fixtures-out`).

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures-out".to_string())
        .into();
    for fixture in [redistrict_fixtures::house(), redistrict_fixtures::senate()] {
        let paths = redistrict_fixtures::write_fixture(&fixture, &dir)?;
        println!(
            "{}: {} units, {} districts -> {}",
            fixture.name,
            fixture.graph.num_units(),
            fixture.num_districts,
            paths.graph.display()
        );
    }
    Ok(())
}
