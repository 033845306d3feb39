//! Prints each decomposition stage for one graph: its sets and coverage.
//!
//! `cargo run --example stage_trace -- prism:3`

use twosheet::generators::{make, FamilySpec};
use twosheet::pipeline::{run_pipeline, RunOptions};

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "prism:3".into());
    let spec: FamilySpec = arg.parse().expect("family spec");
    let g = make(&spec).expect("graph");
    let opts = RunOptions {
        trace: true,
        ..RunOptions::default()
    };
    let out = run_pipeline(&g, opts).expect("valid input");
    for stage in out.report.trace.iter().flatten() {
        println!("{}  coverage {:?}", stage.stage, stage.histogram);
        for item in &stage.items {
            println!(
                "  {:<5} x{} {:?} {:?}",
                item.set, item.multiplicity, item.kind, item.walk
            );
        }
    }
    println!("{:?} after {} rounds", out.status, out.iterations);
}
