//! Checks hand-written cycle lists against K4.

use twosheet::generators::complete;
use twosheet::verify::{verify_cdc, CdcCandidate};

fn main() {
    let k4 = complete(4).unwrap();
    let faces = CdcCandidate {
        cycles: vec![vec![0, 1, 2, 0], vec![0, 1, 3, 0], vec![0, 2, 3, 0], vec![1, 2, 3, 1]],
    };
    let short = CdcCandidate {
        cycles: vec![vec![0, 1, 2, 0], vec![0, 1, 3, 0], vec![0, 2, 3, 0]],
    };
    let walk = CdcCandidate {
        cycles: vec![vec![0, 1, 2, 0, 3, 2, 1, 3, 0]],
    };
    for (name, c) in [("faces", &faces), ("missing one", &short), ("not a cycle", &walk)] {
        let r = verify_cdc(&k4, c);
        println!(
            "{name:<12} ok={} under={:?} over={:?} malformed={:?}",
            r.ok, r.under, r.over, r.malformed
        );
    }
}
