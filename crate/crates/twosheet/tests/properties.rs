use std::collections::BTreeMap;

use proptest::prelude::*;

use twosheet::audit::Recorder;
use twosheet::decompose::decompose;
use twosheet::embedding::{face_trace, RotationSystem};
use twosheet::generators::random_cubic_bridgeless;
use twosheet::graph::{components, find_bridges, is_valid_input, Edge, Graph, Vertex};
use twosheet::pipeline::{run_pipeline, RunOptions, Status};
use twosheet::verify::{brute_force_cdc, enumerate_cycles, verify_cdc, CdcCandidate, OracleLimits};
use twosheet::walk::{classify_walk, Walk};

/// Simple graph on `n` vertices from an edge mask over all pairs.
fn masked_graph(n: usize, mask: &[bool]) -> Graph {
    let mut es = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask[k] {
                es.push((i, j));
            }
            k += 1;
        }
    }
    Graph::new(0..n, es).unwrap()
}

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.6), n * (n - 1) / 2)
            .prop_map(move |mask| masked_graph(n, &mask))
    })
}

fn valid_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    small_graph(max_n).prop_filter("bridgeless input", |g| is_valid_input(g).is_accept())
}

fn cubic() -> impl Strategy<Value = Graph> {
    (2usize..=9, any::<u64>()).prop_map(|(half, seed)| random_cubic_bridgeless(2 * half, seed).unwrap())
}

fn closed(mut core: Vec<Vertex>) -> Vec<Vertex> {
    core.push(core[0]);
    core
}

/// Fisher-Yates driven by xorshift, so shuffles depend only on the seed.
fn shuffle<T>(xs: &mut [T], seed: u64) {
    let mut s = seed | 1;
    for i in (1..xs.len()).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        xs.swap(i, (s % (i as u64 + 1)) as usize);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn conservation_at_every_stage(g in prop_oneof![valid_graph(8), cubic()]) {
        let mut rec = Recorder::new(false);
        decompose(&g, &mut rec).unwrap();
        prop_assert!(rec.audits.conservation_ok(), "{:?}", rec.audits.conservation);
    }

    #[test]
    fn cubic_graphs_are_covered(g in cubic()) {
        let out = run_pipeline(&g, RunOptions::default()).unwrap();
        prop_assert!(out.is_verified(), "{:?} {:?}", g, out.report.reason);
        prop_assert!(out.report.audits.clean(), "{:?}", out.report.audits.failures());
    }

    // Outside the cubic class a run may stop, but only with a stated reason.
    #[test]
    fn success_is_always_verified(g in valid_graph(8)) {
        let out = run_pipeline(&g, RunOptions::default()).unwrap();
        match out.status {
            Status::Success => prop_assert!(out.is_verified()),
            Status::NonTermination => {
                prop_assert!(out.report.reason.is_some());
                prop_assert!(out.report.snapshot.is_some());
                prop_assert!(out.cycles.is_empty());
            }
        }
    }

    #[test]
    fn runs_are_deterministic(g in cubic()) {
        let opts = RunOptions { trace: true, ..RunOptions::default() };
        let a = serde_json::to_string(&run_pipeline(&g, opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_pipeline(&g, opts).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn oracle_agrees(g in valid_graph(6)) {
        let c = brute_force_cdc(&g, OracleLimits::default()).unwrap().expect("bridgeless graphs have covers");
        prop_assert!(verify_cdc(&g, &c).ok);
        let out = run_pipeline(&g, RunOptions::default()).unwrap();
        prop_assert!(out.status == Status::NonTermination || out.is_verified());
    }

    #[test]
    fn classification_ignores_rotation_and_direction(g in prop_oneof![valid_graph(7), cubic()], shift in 0usize..64) {
        let out = run_pipeline(&g, RunOptions { trace: true, ..RunOptions::default() }).unwrap();
        for stage in out.report.trace.iter().flatten() {
            for item in &stage.items {
                let core = &item.walk[..item.walk.len() - 1];
                let k = classify_walk(&g, &Walk::new(item.walk.clone())).unwrap();
                let mut rotated = core.to_vec();
                rotated.rotate_left(shift % core.len());
                let mut reversed = core.to_vec();
                reversed.reverse();
                prop_assert_eq!(classify_walk(&g, &Walk::new(closed(rotated))).unwrap(), k);
                prop_assert_eq!(classify_walk(&g, &Walk::new(closed(reversed))).unwrap(), k);
            }
        }
    }

    #[test]
    fn bridges_match_removal(g in small_graph(8)) {
        let base = components(&g).len();
        let got = find_bridges(&g);
        for &e in g.edges() {
            let rest: Vec<(Vertex, Vertex)> = g.edges().iter().filter(|&&f| f != e).map(|f| (f.0, f.1)).collect();
            let h = Graph::new(g.vertices(), rest).unwrap();
            prop_assert_eq!(components(&h).len() > base, got.contains(&e), "edge {:?}", e);
        }
    }

    #[test]
    fn short_cycles_match_matrix_traces(g in small_graph(7)) {
        let n = g.id_bound();
        let mut a = vec![vec![0i64; n]; n];
        for e in g.edges() {
            a[e.0][e.1] = 1;
            a[e.1][e.0] = 1;
        }
        let mul = |x: &Vec<Vec<i64>>, y: &Vec<Vec<i64>>| {
            let mut z = vec![vec![0i64; n]; n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        z[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            z
        };
        let a2 = mul(&a, &a);
        let a3 = mul(&a2, &a);
        let a4 = mul(&a3, &a);
        let tr = |m: &Vec<Vec<i64>>| (0..n).map(|i| m[i][i]).sum::<i64>();
        let m = g.edge_count() as i64;
        let deg2: i64 = g.vertices().map(|v| (g.degree(v) * g.degree(v)) as i64).sum();
        // closed 4-walks that are not 4-cycles backtrack along one or two edges
        let c3 = tr(&a3) / 6;
        let c4 = (tr(&a4) - 2 * deg2 + 2 * m) / 8;
        let cycles = enumerate_cycles(&g, 7, 1_000_000).unwrap();
        let count = |len: usize| cycles.iter().filter(|c| c.len() == len + 1).count() as i64;
        prop_assert_eq!(count(3), c3);
        prop_assert_eq!(count(4), c4);
    }

    #[test]
    fn verification_ignores_labels_and_order(g in valid_graph(6), seed in any::<u64>(), rot in 0usize..16) {
        let cover = brute_force_cdc(&g, OracleLimits::default()).unwrap().unwrap();
        let mut perm: Vec<Vertex> = (0..g.id_bound()).collect();
        shuffle(&mut perm, seed);
        let h = Graph::new(g.vertices().map(|v| perm[v]), g.edges().iter().map(|e| (perm[e.0], perm[e.1]))).unwrap();
        let mut cycles: Vec<Vec<Vertex>> = cover.cycles.iter().map(|c| c.iter().map(|&v| perm[v]).collect()).collect();
        let len = cycles.len();
        cycles.rotate_left(rot % len);
        let full = verify_cdc(&h, &CdcCandidate { cycles: cycles.clone() });
        prop_assert!(full.ok);
        cycles.pop();
        let short = verify_cdc(&h, &CdcCandidate { cycles });
        prop_assert!(!short.ok);
    }

    #[test]
    fn face_lengths_sum_to_twice_the_edges(g in small_graph(7), seed in any::<u64>()) {
        prop_assume!(components(&g).len() == 1 && g.edge_count() > 0);
        let mut rotation = BTreeMap::new();
        for (i, v) in g.vertices().enumerate() {
            let mut nb = g.neighbors(v).to_vec();
            shuffle(&mut nb, seed.wrapping_add(i as u64));
            rotation.insert(v, nb);
        }
        let rs = RotationSystem::from_rotation(rotation).unwrap();
        let fs = face_trace(&rs).unwrap();
        let total: usize = fs.faces.iter().map(|f| f.len() - 1).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
        let chi = g.vertex_count() as i64 - g.edge_count() as i64 + fs.faces.len() as i64;
        prop_assert_eq!(fs.chi, chi);
        prop_assert_eq!(chi % 2, 0);
        prop_assert!(fs.genus >= 0);
        // every dart is used by exactly one face
        let mut darts: Vec<Edge> = fs.faces.iter().flat_map(|f| f.windows(2).map(|w| Edge(w[0], w[1])).collect::<Vec<_>>()).collect();
        darts.sort();
        darts.dedup();
        prop_assert_eq!(darts.len(), 2 * g.edge_count());
    }
}
