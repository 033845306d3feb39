//! Compares the pipeline with the exhaustive search on small graphs.

use std::time::Instant;

use twosheet::generators::corpus_manifest;
use twosheet::pipeline::{run_pipeline, RunOptions};
use twosheet::verify::{brute_force_cdc, verify_cdc, OracleLimits};

fn main() {
    for (name, g) in corpus_manifest().iter().filter(|(_, g)| g.edge_count() <= 20) {
        let t = Instant::now();
        let oracle = brute_force_cdc(g, OracleLimits::default());
        let took = t.elapsed();
        let pipeline = run_pipeline(g, RunOptions::default()).map(|o| o.is_verified());
        let oracle = match oracle {
            Ok(Some(c)) => format!("found {} cycles, verified {}", c.cycles.len(), verify_cdc(g, &c).ok),
            Ok(None) => "no cover".to_string(),
            Err(e) => format!("skipped: {e}"),
        };
        println!(
            "{name:<12} |E|={:<3} pipeline={:?}  oracle: {oracle} in {took:.1?}",
            g.edge_count(),
            pipeline
        );
    }
}
