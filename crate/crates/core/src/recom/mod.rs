//! The ReCom chain: merge two adjacent districts, draw a random spanning
//! tree over the merged region, cut it at a population-balanced edge, and
//! accept or reject the resulting plan under the configured town-split
//! policy.

mod spanning_tree;

pub use spanning_tree::{
    balanced_cut_candidates, random_spanning_tree, RegionView, SpanningTree, TreeError, TreePolicy,
};

use crate::metrics::{self, MetricRecord, MetricsError};
use crate::partition::{Plan, PlanError, RecomMove};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io;
use thiserror::Error;

/// Identifier of the generator backing chain runs, recorded in report
/// headers for reproducibility. One seeded stream drives an entire chain.
pub const RNG_KIND: &str = "chacha8";

/// Acceptance policy applied to each proposed plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptancePolicy {
    /// Accept every valid proposal.
    AlwaysAccept,
    /// Accept iff the proposal has no more town splits than the current
    /// plan. The default: a strictly-decreasing rule deadlocks at the first
    /// local minimum.
    SplitBounded,
    /// Accept iff the proposal has strictly fewer town splits.
    SplitStrict,
}

/// All sampling knobs for a chain run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Number of steps; each step contributes one record to the ensemble.
    pub steps: u64,
    /// Per-district population tolerance around ideal, in (0, 1).
    pub epsilon: f64,
    pub seed: u64,
    pub tree_policy: TreePolicy,
    pub acceptance: AcceptancePolicy,
    /// Spanning trees drawn per district pair before re-picking the pair.
    pub max_tree_retries: u32,
    /// District pairs tried before the step yields no proposal.
    pub max_pair_retries: u32,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            steps: 20_000,
            epsilon: 0.05,
            seed: 0,
            tree_policy: TreePolicy::Uniform,
            acceptance: AcceptancePolicy::SplitBounded,
            max_tree_retries: 50,
            max_pair_retries: 100,
        }
    }
}

/// The default surcharge for `--tree region-aware`.
pub const DEFAULT_SURCHARGE: f64 = 2.0;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("initial plan violates the population tolerance in districts {0:?}")]
    UnbalancedInitialPlan(Vec<u32>),
    #[error("config: {0}")]
    BadConfig(String),
    #[error("proposal could not be applied: {0}")]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("metric sink: {0}")]
    Sink(#[from] io::Error),
}

/// Counters and the full record stream for one chain run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub rng_kind: String,
    pub accepted_steps: u64,
    pub rejected_proposals: u64,
    pub no_proposal_steps: u64,
    pub failed_tree_draws: u64,
    pub failed_pair_draws: u64,
    #[serde(skip)]
    pub records: Vec<MetricRecord>,
}

/// Result of one proposal attempt.
#[derive(Debug, Clone)]
pub struct ProposalOutcome {
    pub proposal: Option<RecomMove>,
    pub tree_failures: u64,
    pub pair_failures: u64,
}

/// Consumes metric records as the chain emits them.
pub trait MetricSink {
    fn record(&mut self, rec: &MetricRecord) -> io::Result<()>;
}

/// Discards every record; the chain report still retains them.
pub struct NullSink;

impl MetricSink for NullSink {
    fn record(&mut self, _rec: &MetricRecord) -> io::Result<()> {
        Ok(())
    }
}

/// Writes one JSON object per line.
pub struct NdjsonSink<W: io::Write> {
    writer: W,
}

impl<W: io::Write> NdjsonSink<W> {
    pub fn new(writer: W) -> Self {
        NdjsonSink { writer }
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

impl<W: io::Write> MetricSink for NdjsonSink<W> {
    fn record(&mut self, rec: &MetricRecord) -> io::Result<()> {
        serde_json::to_writer(&mut self.writer, rec)?;
        self.writer.write_all(b"\n")
    }
}

/// Draws one ReCom proposal: a uniformly random adjacent district pair, then
/// spanning trees until a balanced cut exists (re-picking the pair after
/// `max_tree_retries` failures, up to `max_pair_retries` pairs).
pub fn propose(plan: &Plan, config: &ChainConfig, rng: &mut ChaCha8Rng) -> ProposalOutcome {
    let mut outcome = ProposalOutcome {
        proposal: None,
        tree_failures: 0,
        pair_failures: 0,
    };
    let pairs = plan.district_adjacency();
    if pairs.is_empty() {
        return outcome;
    }
    let ideal = plan.ideal_pop();
    for _ in 0..config.max_pair_retries {
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let view = RegionView::merged(plan, a, b);
        let mut found = false;
        for _ in 0..config.max_tree_retries {
            let tree = match random_spanning_tree(&view, config.tree_policy, rng) {
                Ok(t) => t,
                Err(_) => break, // cannot happen for adjacent districts
            };
            let cands = balanced_cut_candidates(&tree, &view.pops, ideal, config.epsilon);
            if cands.is_empty() {
                outcome.tree_failures += 1;
                continue;
            }
            let cut = cands[rng.gen_range(0..cands.len())];
            let side = tree.side_of_cut(cut);
            let mut in_side = vec![false; view.len()];
            for &v in &side {
                in_side[v as usize] = true;
            }
            // The component holding the cut edge's first endpoint keeps the
            // smaller district label.
            let (lo, hi) = (a.min(b), a.max(b));
            let mut new_units_a = Vec::with_capacity(view.len() - side.len());
            let mut new_units_b = Vec::with_capacity(side.len());
            for (i, &unit) in view.nodes.iter().enumerate() {
                if in_side[i] {
                    new_units_b.push(unit);
                } else {
                    new_units_a.push(unit);
                }
            }
            let (tu, tv) = tree.edges[cut];
            outcome.proposal = Some(RecomMove {
                district_a: lo,
                district_b: hi,
                new_units_a,
                new_units_b,
                cut_edge: (view.nodes[tu as usize], view.nodes[tv as usize]),
            });
            found = true;
            break;
        }
        if found {
            return outcome;
        }
        outcome.pair_failures += 1;
    }
    outcome
}

fn check_balance(plan: &Plan, epsilon: f64) -> Result<(), ChainError> {
    let ideal = plan.ideal_pop();
    let offenders: Vec<u32> = plan
        .district_labels()
        .filter(|&d| (plan.aggregates(d).pop as f64 - ideal).abs() > epsilon * ideal)
        .collect();
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(ChainError::UnbalancedInitialPlan(offenders))
    }
}

/// Runs the chain for `config.steps` steps, emitting one record per step.
///
/// A rejected proposal (or a step with no proposal) re-records the current
/// plan, so a run of `n` steps always yields `n` samples. Identical
/// `(graph, config)` inputs yield bit-identical reports.
pub fn run_chain(
    initial: &Plan,
    config: &ChainConfig,
    sink: &mut dyn MetricSink,
) -> Result<ChainReport, ChainError> {
    if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return Err(ChainError::BadConfig(format!(
            "epsilon {} outside (0, 1)",
            config.epsilon
        )));
    }
    check_balance(initial, config.epsilon)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = ChainReport {
        rng_kind: RNG_KIND.to_string(),
        accepted_steps: 0,
        rejected_proposals: 0,
        no_proposal_steps: 0,
        failed_tree_draws: 0,
        failed_pair_draws: 0,
        records: Vec::with_capacity(config.steps as usize),
    };
    let mut current = initial.clone();
    let mut current_splits = metrics::town_splits(&current);

    for step in 1..=config.steps {
        let outcome = propose(&current, config, &mut rng);
        report.failed_tree_draws += outcome.tree_failures;
        report.failed_pair_draws += outcome.pair_failures;
        let accepted = match outcome.proposal {
            None => {
                report.no_proposal_steps += 1;
                false
            }
            Some(mv) => {
                let candidate = current.apply_recom_move(&mv)?;
                let candidate_splits = metrics::town_splits(&candidate);
                let accept = match config.acceptance {
                    AcceptancePolicy::AlwaysAccept => true,
                    AcceptancePolicy::SplitBounded => candidate_splits <= current_splits,
                    AcceptancePolicy::SplitStrict => candidate_splits < current_splits,
                };
                if accept {
                    current = candidate;
                    current_splits = candidate_splits;
                    report.accepted_steps += 1;
                } else {
                    report.rejected_proposals += 1;
                }
                accept
            }
        };
        let rec = metrics::compute_record(&current, step, accepted)?;
        sink.record(&rec)?;
        report.records.push(rec);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DualGraph, Unit};
    use std::sync::Arc;

    fn unit(id: &str, pop: u64, town: &str) -> Unit {
        Unit {
            id: id.into(),
            pop,
            vap_total: pop,
            vap_white: pop,
            vap_hispanic: 0,
            vap_black: 0,
            vap_asian: 0,
            town: town.into(),
            dem_votes: 0.0,
            rep_votes: 0.0,
            incumbents: vec![],
        }
    }

    fn path4() -> Arc<DualGraph> {
        Arc::new(
            DualGraph::new(
                vec![
                    unit("a", 1, "t"),
                    unit("b", 1, "t"),
                    unit("c", 1, "t"),
                    unit("d", 1, "t"),
                ],
                vec![
                    ("a".into(), "b".into()),
                    ("b".into(), "c".into()),
                    ("c".into(), "d".into()),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn proposal_on_path_recreates_balanced_split() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 1, 2, 2]).unwrap();
        let cfg = ChainConfig {
            epsilon: 0.001, // exact balance on unit pops
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let out = propose(&plan, &cfg, &mut rng);
            let mv = out.proposal.expect("path always has a balanced split");
            assert_eq!(mv.new_units_a, vec![0, 1]);
            assert_eq!(mv.new_units_b, vec![2, 3]);
        }
    }

    #[test]
    fn single_district_yields_no_proposal() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 1, 1, 1]).unwrap();
        let cfg = ChainConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(propose(&plan, &cfg, &mut rng).proposal.is_none());
    }

    #[test]
    fn zero_steps_gives_empty_report() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 1, 2, 2]).unwrap();
        let cfg = ChainConfig {
            steps: 0,
            ..Default::default()
        };
        let report = run_chain(&plan, &cfg, &mut NullSink).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.accepted_steps, 0);
        assert_eq!(report.rejected_proposals, 0);
        assert_eq!(report.no_proposal_steps, 0);
    }

    #[test]
    fn path_chain_holds_balance_and_splits() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 1, 2, 2]).unwrap();
        let cfg = ChainConfig {
            steps: 100,
            epsilon: 0.001,
            seed: 5,
            ..Default::default()
        };
        let report = run_chain(&plan, &cfg, &mut NullSink).unwrap();
        assert_eq!(report.records.len(), 100);
        for rec in &report.records {
            assert_eq!(rec.pop_deviation, 0.0);
            assert_eq!(rec.town_splits, report.records[0].town_splits);
        }
    }

    #[test]
    fn unbalanced_initial_plan_is_rejected() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 2, 2, 2]).unwrap();
        let cfg = ChainConfig {
            epsilon: 0.05,
            ..Default::default()
        };
        match run_chain(&plan, &cfg, &mut NullSink) {
            Err(ChainError::UnbalancedInitialPlan(ds)) => assert_eq!(ds, vec![1, 2]),
            other => panic!("expected unbalanced error, got {other:?}"),
        }
    }

    #[test]
    fn counters_account_for_every_step() {
        let g = path4();
        let plan = Plan::from_labels(&g, vec![1, 1, 2, 2]).unwrap();
        let cfg = ChainConfig {
            steps: 200,
            epsilon: 0.001,
            seed: 9,
            acceptance: AcceptancePolicy::SplitStrict,
            ..Default::default()
        };
        let report = run_chain(&plan, &cfg, &mut NullSink).unwrap();
        assert_eq!(
            report.accepted_steps + report.rejected_proposals + report.no_proposal_steps,
            200
        );
    }
}
