//! `chain`: run one or more independently seeded ReCom chains, streaming
//! metric NDJSON and writing a reproducibility manifest.

use crate::CliError;
use redistrict_core::recom::{run_chain, ChainReport, NdjsonSink, RNG_KIND};
use redistrict_core::{load_graph, ChainConfig};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn rfc3339_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn run(
    graph_path: &Path,
    assignment_path: &Path,
    districts: Option<u32>,
    config: ChainConfig,
    chains: u32,
    out_dir: &Path,
) -> Result<(), CliError> {
    if chains == 0 {
        return Err(CliError::Input("--chains must be at least 1".into()));
    }
    let started_at = rfc3339_now();
    let start = std::time::Instant::now();
    let graph_bytes = std::fs::read(graph_path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", graph_path.display())))?;
    let graph_sha256 = sha256_hex(&graph_bytes);
    let graph = load_graph(graph_path)?;
    let initial = crate::load_plan(&graph, assignment_path, districts)?;
    std::fs::create_dir_all(out_dir)?;

    let mut outputs: Vec<PathBuf> = Vec::new();
    for i in 0..chains {
        outputs.push(out_dir.join(format!("metrics_{i:03}.ndjson")));
    }

    // Chains are independent: one seeded stream each, no shared state.
    let reports: Vec<Result<ChainReport, CliError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for i in 0..chains {
            let mut cfg = config.clone();
            cfg.seed = config.seed + i as u64;
            let initial = initial.clone();
            let path = outputs[i as usize].clone();
            handles.push(scope.spawn(move || {
                let file = std::fs::File::create(&path)?;
                let mut sink = NdjsonSink::new(BufWriter::new(file));
                let report = run_chain(&initial, &cfg, &mut sink)?;
                use std::io::Write;
                sink.into_inner().flush()?;
                Ok(report)
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    });
    let mut runs = Vec::new();
    for (i, report) in reports.into_iter().enumerate() {
        let report = report?;
        println!(
            "chain {i}: accepted {}, rejected {}, no-proposal {}, tree failures {}, pair failures {}",
            report.accepted_steps,
            report.rejected_proposals,
            report.no_proposal_steps,
            report.failed_tree_draws,
            report.failed_pair_draws
        );
        runs.push(json!({
            "seed": config.seed + i as u64,
            "accepted_steps": report.accepted_steps,
            "rejected_proposals": report.rejected_proposals,
            "no_proposal_steps": report.no_proposal_steps,
            "failed_tree_draws": report.failed_tree_draws,
            "failed_pair_draws": report.failed_pair_draws,
            "output": outputs[i].display().to_string(),
        }));
    }

    let manifest = json!({
        "command": "chain",
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_KIND,
        "config": config,
        "chains": chains,
        "graph_path": graph_path.display().to_string(),
        "graph_sha256": graph_sha256,
        "assignment_path": assignment_path.display().to_string(),
        "started_at": started_at,
        "finished_at": rfc3339_now(),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "runs": runs,
    });
    // Written to a temp file first so the manifest appears atomically.
    let manifest_path = out_dir.join("manifest.json");
    let tmp_path = out_dir.join("manifest.json.tmp");
    std::fs::write(
        &tmp_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    std::fs::rename(&tmp_path, &manifest_path)?;
    println!("manifest: {}", manifest_path.display());
    Ok(())
}
