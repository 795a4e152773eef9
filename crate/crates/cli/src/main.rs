//! Command-line surface for the redistricting ensemble engine.
//!
//! Subcommands: `audit` (one-shot metrics of an enacted plan), `chain`
//! (ReCom ensemble runs emitting metric NDJSON plus a run manifest),
//! `report` (distribution summaries and outlier verdicts over metric
//! streams), and `compare` (assignment diffs with incumbent benefit
//! classification).
//!
//! Exit codes: 0 success, 2 input error, 3 constraint violation.

mod audit;
mod chain;
mod compare;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use redistrict_core::recom::{AcceptancePolicy, TreePolicy, DEFAULT_SURCHARGE};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Constraint(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Constraint(_) => 3,
        }
    }
}

impl From<redistrict_core::GraphError> for CliError {
    fn from(e: redistrict_core::GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<redistrict_core::PlanError> for CliError {
    fn from(e: redistrict_core::PlanError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<redistrict_core::diff::DiffError> for CliError {
    fn from(e: redistrict_core::diff::DiffError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<redistrict_core::ensemble::SummaryError> for CliError {
    fn from(e: redistrict_core::ensemble::SummaryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<redistrict_core::metrics::MetricsError> for CliError {
    fn from(e: redistrict_core::metrics::MetricsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<redistrict_core::recom::ChainError> for CliError {
    fn from(e: redistrict_core::recom::ChainError) -> Self {
        match e {
            redistrict_core::recom::ChainError::UnbalancedInitialPlan(_) => {
                CliError::Constraint(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TreeArg {
    Uniform,
    RegionAware,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AcceptanceArg {
    Always,
    SplitBounded,
    SplitStrict,
}

#[derive(Parser)]
#[command(name = "redistrict", version, about = "ReCom ensemble analysis for district plans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-shot metrics and per-district table for an enacted plan.
    Audit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        /// District count; inferred from the assignment when omitted.
        #[arg(long)]
        districts: Option<u32>,
        /// Directory for audit.json (stdout table is always printed).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run ReCom chains, streaming metric records as NDJSON.
    Chain {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        districts: Option<u32>,
        #[arg(long, default_value_t = 20_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-district population tolerance around ideal.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = TreeArg::Uniform)]
        tree: TreeArg,
        /// Town-crossing edge weight surcharge for --tree region-aware.
        #[arg(long, default_value_t = DEFAULT_SURCHARGE)]
        surcharge: f64,
        #[arg(long, value_enum, default_value_t = AcceptanceArg::SplitBounded)]
        acceptance: AcceptanceArg,
        #[arg(long, default_value_t = 50)]
        max_tree_retries: u32,
        #[arg(long, default_value_t = 100)]
        max_pair_retries: u32,
        /// Independent seeded chains (seed, seed+1, ...), one output file each.
        #[arg(long, default_value_t = 1)]
        chains: u32,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Summarize metric streams and score enacted values against them.
    Report {
        /// Metric NDJSON files; multiple files are concatenated.
        #[arg(required = true)]
        ndjson: Vec<PathBuf>,
        /// Metric name; repeat for several metrics.
        #[arg(long = "metric", required = true)]
        metrics: Vec<String>,
        /// Enacted value per metric, in the same order.
        #[arg(long = "enacted", required = true)]
        enacted: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Records dropped from the start of each input file.
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, default_value_t = 99.0)]
        percentile_cut: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Diff two assignments and classify changes in competitive districts.
    Compare {
        #[arg(long)]
        graph: PathBuf,
        /// Prior-cycle assignment CSV.
        #[arg(long)]
        old: PathBuf,
        /// New-cycle assignment CSV.
        #[arg(long)]
        new: PathBuf,
        /// Margins CSV: district,margin_votes,margin_pct,incumbent_party.
        #[arg(long)]
        margins: PathBuf,
        /// Report districts with 2020 margins at or below this fraction.
        #[arg(long, default_value_t = 0.025)]
        margin_cut: f64,
        /// Net vote-share band treated as neutral.
        #[arg(long, default_value_t = 0.02)]
        neutral_band: f64,
        /// Match district labels by population overlap instead of by id.
        #[arg(long)]
        match_by_overlap: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

impl TreeArg {
    fn to_policy(self, surcharge: f64) -> TreePolicy {
        match self {
            TreeArg::Uniform => TreePolicy::Uniform,
            TreeArg::RegionAware => TreePolicy::RegionAware { surcharge },
        }
    }
}

impl AcceptanceArg {
    fn to_policy(self) -> AcceptancePolicy {
        match self {
            AcceptanceArg::Always => AcceptancePolicy::AlwaysAccept,
            AcceptanceArg::SplitBounded => AcceptancePolicy::SplitBounded,
            AcceptanceArg::SplitStrict => AcceptancePolicy::SplitStrict,
        }
    }
}

/// Loads an assignment whose district count may need inferring from the
/// file's own labels.
fn load_plan(
    graph: &std::sync::Arc<redistrict_core::DualGraph>,
    path: &std::path::Path,
    districts: Option<u32>,
) -> Result<redistrict_core::Plan, CliError> {
    let n = match districts {
        Some(n) => n,
        None => infer_districts(path)?,
    };
    Ok(redistrict_core::load_assignment(path, graph, n)?)
}

fn infer_districts(path: &std::path::Path) -> Result<u32, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut max = 0;
    for line in text.lines().skip(1) {
        if let Some(d) = line.rsplit(',').next().and_then(|s| s.trim().parse::<u32>().ok()) {
            max = max.max(d);
        }
    }
    if max == 0 {
        return Err(CliError::Input(format!(
            "no district labels found in {}",
            path.display()
        )));
    }
    Ok(max)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Audit {
            graph,
            assignment,
            districts,
            out_dir,
        } => audit::run(&graph, &assignment, districts, out_dir.as_deref()),
        Command::Chain {
            graph,
            assignment,
            districts,
            steps,
            seed,
            epsilon,
            tree,
            surcharge,
            acceptance,
            max_tree_retries,
            max_pair_retries,
            chains,
            out_dir,
        } => {
            let config = redistrict_core::ChainConfig {
                steps,
                epsilon,
                seed,
                tree_policy: tree.to_policy(surcharge),
                acceptance: acceptance.to_policy(),
                max_tree_retries,
                max_pair_retries,
            };
            chain::run(&graph, &assignment, districts, config, chains, &out_dir)
        }
        Command::Report {
            ndjson,
            metrics,
            enacted,
            bins,
            burn_in,
            percentile_cut,
            out_dir,
        } => report::run(
            &ndjson,
            &metrics,
            &enacted,
            bins,
            burn_in,
            percentile_cut,
            &out_dir,
        ),
        Command::Compare {
            graph,
            old,
            new,
            margins,
            margin_cut,
            neutral_band,
            match_by_overlap,
            out_dir,
        } => compare::run(
            &graph,
            &old,
            &new,
            &margins,
            margin_cut,
            neutral_band,
            match_by_overlap,
            out_dir.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
