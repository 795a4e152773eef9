//! `report`: summarize metric NDJSON streams and score enacted values
//! against the ensemble distribution.

use crate::CliError;
use redistrict_core::ensemble::{histogram_csv, outlier_verdict, summarize, Verdict};
use redistrict_core::metrics::MetricRecord;
use std::path::Path;

fn read_records(path: &Path, burn_in: usize) -> Result<Vec<MetricRecord>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: MetricRecord = serde_json::from_str(line).map_err(|e| {
            CliError::Input(format!("{}:{}: bad record: {e}", path.display(), lineno + 1))
        })?;
        records.push(rec);
    }
    Ok(records.split_off(burn_in.min(records.len())))
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    ndjson: &[std::path::PathBuf],
    metrics: &[String],
    enacted: &[f64],
    bins: usize,
    burn_in: usize,
    percentile_cut: f64,
    out_dir: &Path,
) -> Result<(), CliError> {
    if metrics.len() != enacted.len() {
        return Err(CliError::Input(format!(
            "{} metrics but {} enacted values",
            metrics.len(),
            enacted.len()
        )));
    }
    let mut records = Vec::new();
    for path in ndjson {
        records.extend(read_records(path, burn_in)?);
    }
    std::fs::create_dir_all(out_dir)?;
    for (metric, &value) in metrics.iter().zip(enacted) {
        let summary = summarize(&records, metric, value, bins)?;
        let verdict = outlier_verdict(&summary, percentile_cut);
        println!(
            "{metric}: count={} mean={:.6} stddev={:.6} enacted={} percentile={:.2} z={} verdict={}",
            summary.count,
            summary.mean,
            summary.stddev,
            summary.enacted_value,
            summary.enacted_percentile,
            summary
                .z_score
                .map(|z| format!("{z:.3}"))
                .unwrap_or_else(|| "undefined".into()),
            match verdict {
                Verdict::Outlier => "Outlier",
                Verdict::NotOutlier => "NotOutlier",
            }
        );
        let doc = serde_json::json!({
            "summary": summary,
            "percentile_cut": percentile_cut,
            "verdict": verdict,
            "burn_in": burn_in,
        });
        std::fs::write(
            out_dir.join(format!("summary_{metric}.json")),
            serde_json::to_string_pretty(&doc).expect("summary serializes"),
        )?;
        std::fs::write(out_dir.join(format!("hist_{metric}.csv")), histogram_csv(&summary))?;
    }
    Ok(())
}
