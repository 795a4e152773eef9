//! Ensemble analysis engine for legislative redistricting.
//!
//! The engine samples the space of contiguous, population-balanced district
//! plans with a ReCom (recombination) Markov chain over a dual graph of
//! geographic units, computes per-plan metrics (incumbent pairing, town
//! splits, population deviation, demographic and partisan composition), and
//! scores an enacted plan against the sampled distribution to detect
//! incumbent-protection outliers.

pub mod diff;
pub mod ensemble;
pub mod graph;
pub mod metrics;
pub mod partition;
pub mod recom;

pub use diff::{classify_change, diff_plans, flag_borders, Classification, PlanDiff};
pub use ensemble::{outlier_verdict, summarize, EnsembleSummary, Verdict};
pub use graph::{load_graph, DualGraph, GraphError, IncumbentRef, Party, Unit};
pub use metrics::{compute_record, MetricRecord};
pub use partition::{load_assignment, Plan, PlanError, RecomMove};
pub use recom::{propose, run_chain, AcceptancePolicy, ChainConfig, ChainReport, TreePolicy};
