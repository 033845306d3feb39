//! Builds a cycle double cover for one graph family and prints it.
//!
//! `cargo run --example double_cover -- petersen`

use twosheet::generators::{make, FamilySpec};
use twosheet::pipeline::{run_pipeline, RunOptions};

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "petersen".into());
    let spec: FamilySpec = arg.parse().expect("family spec");
    let g = make(&spec).expect("graph");
    let out = run_pipeline(&g, RunOptions::default()).expect("valid input");
    println!(
        "{}: {} vertices, {} edges",
        spec.name(),
        g.vertex_count(),
        g.edge_count()
    );
    println!("status {:?}, {} elimination rounds", out.status, out.iterations);
    for c in &out.cycles {
        println!("  {c:?}");
    }
    if let Some(v) = &out.report.verify {
        println!("verified: {} (coverage histogram {:?})", v.ok, v.histogram);
    }
}
