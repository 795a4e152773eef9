//! Distribution summaries over chain metric streams and outlier scoring of
//! an enacted plan against them.

use crate::metrics::MetricRecord;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SummaryError {
    #[error("metric stream is empty")]
    EmptyStream,
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("metric {0:?} is absent from the stream")]
    MetricAbsent(String),
}

/// Metric names accepted by [`summarize`].
pub const METRIC_NAMES: &[&str] = &[
    "single_incumbent_frac",
    "districts_single_incumbent",
    "districts_zero_incumbent",
    "districts_multi_incumbent",
    "town_splits",
    "pop_deviation",
    "majority_minority_count",
    "safe_dem",
    "safe_rep",
    "competitive",
];

/// Extracts a named scalar from a record. `None` when the record does not
/// carry the metric (lean counts on voteless graphs).
pub fn metric_value(rec: &MetricRecord, metric: &str) -> Result<Option<f64>, SummaryError> {
    let v = match metric {
        "single_incumbent_frac" => Some(rec.single_incumbent_frac),
        "districts_single_incumbent" => Some(rec.districts_single_incumbent as f64),
        "districts_zero_incumbent" => Some(rec.districts_zero_incumbent as f64),
        "districts_multi_incumbent" => Some(rec.districts_multi_incumbent as f64),
        "town_splits" => Some(rec.town_splits as f64),
        "pop_deviation" => Some(rec.pop_deviation),
        "majority_minority_count" => Some(rec.majority_minority_count as f64),
        "safe_dem" => rec.lean_counts.map(|l| l.safe_dem as f64),
        "safe_rep" => rec.lean_counts.map(|l| l.safe_rep as f64),
        "competitive" => rec.lean_counts.map(|l| l.competitive as f64),
        other => return Err(SummaryError::UnknownMetric(other.to_string())),
    };
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: u64,
}

/// Distribution summary of one metric over an ensemble, with the enacted
/// plan's value scored against it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub metric: String,
    pub count: u64,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Vec<HistogramBin>,
    pub enacted_value: f64,
    /// Mid-rank percentile in [0, 100]: ties with the enacted value count
    /// half.
    pub enacted_percentile: f64,
    /// `None` when the ensemble is degenerate (zero standard deviation).
    pub z_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Outlier,
    NotOutlier,
}

/// Summarizes `metric` over the record stream and scores `enacted` against
/// it. Population mean/stddev; equal-width histogram over `[min, max]`.
pub fn summarize(
    records: &[MetricRecord],
    metric: &str,
    enacted: f64,
    bins: usize,
) -> Result<EnsembleSummary, SummaryError> {
    let mut values = Vec::with_capacity(records.len());
    for rec in records {
        match metric_value(rec, metric)? {
            Some(v) => values.push(v),
            None => return Err(SummaryError::MetricAbsent(metric.to_string())),
        }
    }
    summarize_values(&values, metric, enacted, bins)
}

/// [`summarize`] over already-extracted values.
pub fn summarize_values(
    values: &[f64],
    metric: &str,
    enacted: f64,
    bins: usize,
) -> Result<EnsembleSummary, SummaryError> {
    if values.is_empty() {
        return Err(SummaryError::EmptyStream);
    }
    let count = values.len() as u64;
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    let stddev = var.sqrt();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let histogram = if min == max {
        vec![HistogramBin {
            bin_low: min,
            bin_high: max,
            count,
        }]
    } else {
        let bins = bins.max(1);
        let width = (max - min) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = (((v - min) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| HistogramBin {
                bin_low: min + i as f64 * width,
                bin_high: if i + 1 == bins {
                    max
                } else {
                    min + (i + 1) as f64 * width
                },
                count: c,
            })
            .collect()
    };

    let below = values.iter().filter(|&&v| v < enacted).count() as f64;
    let equal = values.iter().filter(|&&v| v == enacted).count() as f64;
    let enacted_percentile = 100.0 * (below + 0.5 * equal) / count as f64;
    let z_score = if stddev > 0.0 {
        Some((enacted - mean) / stddev)
    } else {
        None
    };

    Ok(EnsembleSummary {
        metric: metric.to_string(),
        count,
        mean,
        stddev,
        min,
        max,
        histogram,
        enacted_value: enacted,
        enacted_percentile,
        z_score,
    })
}

/// Outlier iff the enacted percentile reaches either tail, inclusive.
pub fn outlier_verdict(summary: &EnsembleSummary, percentile_cut: f64) -> Verdict {
    if summary.enacted_percentile >= percentile_cut
        || summary.enacted_percentile <= 100.0 - percentile_cut
    {
        Verdict::Outlier
    } else {
        Verdict::NotOutlier
    }
}

/// Renders the histogram CSV (`bin_low,bin_high,count`).
pub fn histogram_csv(summary: &EnsembleSummary) -> String {
    let mut out = String::from("bin_low,bin_high,count\n");
    for bin in &summary.histogram {
        out.push_str(&format!("{},{},{}\n", bin.bin_low, bin.bin_high, bin.count));
    }
    out
}
