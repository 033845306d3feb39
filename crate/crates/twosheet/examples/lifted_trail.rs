//! Builds the two-sheet lift of a graph and its Eulerian trail.

use twosheet::generators::{make, FamilySpec};
use twosheet::lift::{build_lift, eulerian_trail, project};

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "theta:1,2,2".into());
    let spec: FamilySpec = arg.parse().expect("family spec");
    let g = make(&spec).expect("graph");
    let lg = build_lift(&g).expect("lift");
    println!(
        "{} base edges, {} lifted edges, open case: {}",
        g.edge_count(),
        lg.edge_count(),
        lg.is_open_case()
    );
    let t = eulerian_trail(&lg).expect("trail");
    print!("{}", t.to_text());
    println!("auxiliary steps: {}", t.aux_count());
    println!("projection: {:?}", project(&t).vertices);
}
