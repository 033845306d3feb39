//! Sweeps random bridgeless cubic graphs and reports how many reduce fully.
//!
//! Usage: `cargo run --release --example random_cubic -- [n] [seeds]`

use twosheet::generators::random_cubic_bridgeless;
use twosheet::pipeline::{run_pipeline, RunOptions};

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(20) as usize;
    let seeds = args.next().unwrap_or(200);
    let mut verified = 0;
    for seed in 1..=seeds {
        let g = random_cubic_bridgeless(n, seed).expect("even n >= 4");
        let out = run_pipeline(&g, RunOptions::default()).expect("generated graphs are bridgeless");
        if out.is_verified() {
            verified += 1;
        } else {
            let why = out
                .report
                .reason
                .map(|r| r.to_string())
                .unwrap_or_else(|| "verifier rejected".into());
            println!("seed {seed}: {why}");
            println!("{}", g.to_edge_list());
        }
    }
    println!("n = {n}: {verified}/{seeds} verified");
}
