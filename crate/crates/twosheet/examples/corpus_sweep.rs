//! Runs the pipeline over the bundled corpus and prints one line per graph.

use std::time::Instant;

use twosheet::generators::corpus_manifest;
use twosheet::pipeline::{run_pipeline, RunOptions, Status};

fn main() {
    let start = Instant::now();
    let mut verified = 0;
    let corpus = corpus_manifest();
    for (name, g) in &corpus {
        let t = Instant::now();
        let out = run_pipeline(g, RunOptions::default()).expect("corpus graphs are valid inputs");
        let audits = &out.report.audits;
        let status = match out.status {
            Status::Success if out.is_verified() => {
                verified += 1;
                "ok".to_string()
            }
            Status::Success => "UNVERIFIED".to_string(),
            Status::NonTermination => format!("STOPPED ({})", out.report.reason.as_ref().unwrap()),
        };
        println!(
            "{name:<12} |E|={:<3} cycles={:<3} rounds={:<3} audits={:<5} {:>7.1?}  {status}",
            g.edge_count(),
            out.cycles.len(),
            out.iterations,
            if audits.clean() { "clean" } else { "FAIL" },
            t.elapsed(),
        );
        if !audits.clean() {
            println!("    failed audits: {:?}", audits.failures());
        }
    }
    println!("{verified}/{} verified in {:.2?}", corpus.len(), start.elapsed());
}
