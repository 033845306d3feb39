//! Acceptance checks. One PASS/FAIL line per criterion; exits non-zero on any FAIL.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use twosheet::audit::Recorder;
use twosheet::decompose::decompose;
use twosheet::embedding::{
    face_trace, faces_as_cdc, inductive_complete_embedding, k5_torus_faces, k5_torus_fixture, repeated_edges,
};
use twosheet::generators::{complete, corpus_manifest};
use twosheet::graph::{Edge, Graph};
use twosheet::pipeline::{run_pipeline, CdcOutcome, RunOptions, Status};
use twosheet::verify::{brute_force_cdc, verify_cdc, CdcCandidate, OracleLimits};
use twosheet::walk::canonical_sorted;

const CORPUS_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_MAX_EDGES: usize = 20;
const EMBED_BUDGET: Duration = Duration::from_secs(1);

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn conservation(corpus: &[(String, Graph)]) -> (bool, String) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut stages = 0;
    for (name, g) in corpus {
        let mut rec = Recorder::new(false);
        let ok = decompose(g, &mut rec).is_ok() && rec.audits.conservation_ok();
        // reduction rounds add their own checks
        let run = run_pipeline(g, RunOptions::default()).map(|o| o.report.audits.conservation_ok());
        stages += rec.audits.conservation.len();
        if !ok || run != Ok(true) {
            bad.push(name.clone());
        }
    }
    let took = start.elapsed();
    (
        bad.is_empty() && took < CORPUS_BUDGET,
        format!(
            "{} graphs, {stages} decomposition stage checks, failures {bad:?}, {took:.2?} (limit {CORPUS_BUDGET:?})",
            corpus.len()
        ),
    )
}

fn end_to_end(runs: &[(String, CdcOutcome)]) -> (bool, String) {
    let verified = runs.iter().filter(|(_, o)| o.is_verified()).count();
    let false_claims: Vec<&str> = runs
        .iter()
        .filter(|(_, o)| o.status == Status::Success && !o.is_verified())
        .map(|(n, _)| n.as_str())
        .collect();
    let stopped: Vec<String> = runs
        .iter()
        .filter(|(_, o)| o.status == Status::NonTermination)
        .map(|(n, o)| {
            format!(
                "{n} ({})",
                o.report.reason.as_ref().map_or(String::new(), |r| r.to_string())
            )
        })
        .collect();
    (
        verified == runs.len(),
        format!(
            "{verified}/{} verified, unverified successes {false_claims:?}, non-termination {stopped:?}",
            runs.len()
        ),
    )
}

fn audits(runs: &[(String, CdcOutcome)]) -> (bool, String) {
    let mut bad = Vec::new();
    let (mut segments, mut forks, mut branches, mut surgeries, mut aux, mut greedy) = (0, 0, 0, 0, 0, 0);
    for (name, o) in runs {
        let a = &o.report.audits;
        segments += a.segments_checked;
        forks += a.forks_checked;
        branches += a.branches_checked;
        surgeries += a.surgeries;
        aux += a.aux_counts_checked;
        greedy += a.h1_greedy_blocks;
        if !a.clean() {
            bad.push(format!("{name} {:?}", a.failures()));
        }
    }
    (
        bad.is_empty(),
        format!(
            "{aux} lifted cycles, {segments} segments, {forks} forks, {branches} branches, {surgeries} surgeries checked; \
             {greedy} greedy fork blocks; failures {bad:?}"
        ),
    )
}

fn oracle(corpus: &[(String, Graph)], runs: &[(String, CdcOutcome)]) -> (bool, String) {
    let limits = OracleLimits {
        max_edges: ORACLE_MAX_EDGES,
        ..OracleLimits::default()
    };
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut slowest = Duration::ZERO;
    for ((name, g), (_, run)) in corpus.iter().zip(runs) {
        if g.edge_count() > ORACLE_MAX_EDGES {
            continue;
        }
        checked += 1;
        let t = Instant::now();
        let found = brute_force_cdc(g, limits);
        let took = t.elapsed();
        slowest = slowest.max(took);
        let ok = matches!(&found, Ok(Some(c)) if verify_cdc(g, c).ok);
        // a pipeline cover on an instance the oracle cannot cover would be a contradiction
        if !ok || took >= ORACLE_BUDGET || (run.is_verified() && !matches!(found, Ok(Some(_)))) {
            bad.push(name.clone());
        }
    }
    (
        bad.is_empty() && checked > 0,
        format!("{checked} graphs with |E| <= {ORACLE_MAX_EDGES}, slowest {slowest:.2?} (limit {ORACLE_BUDGET:?}), failures {bad:?}"),
    )
}

fn k5_fixture() -> (bool, String) {
    let k5 = complete(5).unwrap();
    // two Hamiltonian cycles of K5 that are edge-disjoint
    let pair = CdcCandidate {
        cycles: vec![vec![3, 0, 2, 1, 4, 3], vec![3, 2, 4, 0, 1, 3]],
    };
    let r = verify_cdc(&k5, &pair);
    let once = r.histogram.get(&1) == Some(&10) && r.histogram.len() == 1 && !r.ok;
    let run = run_pipeline(&k5, RunOptions::default()).unwrap();
    let ok = once && run.report.shortcut && run.is_verified();
    (
        ok,
        format!(
            "two Hamiltonian cycles give coverage {:?}; pipeline shortcut={} verified={} with {} cycles",
            r.histogram,
            run.report.shortcut,
            run.is_verified(),
            run.cycles.len()
        ),
    )
}

fn embedding_table() -> (bool, String) {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut ok = true;
    for k in 3..=8i64 {
        let rs = inductive_complete_embedding(k as usize).unwrap();
        let fs = face_trace(&rs).unwrap();
        let genus = (k - 3) * (k - 4) / 2;
        let chi = 2 - (k - 3) * (k - 4);
        ok &= fs.genus == genus && fs.chi == chi;
        rows.push(format!("K{k}: g={} chi={}", fs.genus, fs.chi));
    }
    let took = start.elapsed();
    (
        ok && took < EMBED_BUDGET,
        format!("{}; {took:.2?} (limit {EMBED_BUDGET:?})", rows.join(", ")),
    )
}

fn torus_faces() -> (bool, String) {
    let rs = k5_torus_fixture();
    let fs = face_trace(&rs).unwrap();
    let same = canonical_sorted(&fs.faces) == canonical_sorted(k5_torus_faces());
    let r = faces_as_cdc(rs.host(), &fs);
    let doubled: Vec<BTreeSet<Edge>> = r.malformed.iter().map(|&i| repeated_edges(&fs.faces[i])).collect();
    // v4v5 and v2v3 in the 1-indexed labels
    let expected = BTreeSet::from([Edge::new(3, 4), Edge::new(1, 2)]);
    let ok = same && doubled.len() == 1 && doubled[0] == expected;
    (
        ok,
        format!(
            "faces match={same}, non-cycle faces {}, doubled edges {doubled:?}",
            doubled.len()
        ),
    )
}

fn determinism() -> (bool, String) {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cdc"))
            .args(["run", "--corpus", "--seed", "1"])
            .output()
            .expect("cdc binary runs")
    };
    let a = run();
    let b = run();
    let ok = a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    (
        ok,
        format!(
            "exit {:?}, {} bytes, {} lines, identical={}",
            a.status.code(),
            a.stdout.len(),
            a.stdout.iter().filter(|&&c| c == b'\n').count(),
            a.stdout == b.stdout
        ),
    )
}

fn main() {
    let corpus = corpus_manifest();
    let runs: Vec<(String, CdcOutcome)> = corpus
        .iter()
        .map(|(n, g)| {
            (
                n.clone(),
                run_pipeline(g, RunOptions::default()).expect("corpus graphs are valid"),
            )
        })
        .collect();

    let mut report = Report { failed: 0 };
    let (ok, d) = conservation(&corpus);
    report.line("conservation", ok, d);
    let (ok, d) = end_to_end(&runs);
    report.line("end-to-end", ok, d);
    let (ok, d) = audits(&runs);
    report.line("structural audits", ok, d);
    let (ok, d) = oracle(&corpus, &runs);
    report.line("oracle equivalence", ok, d);
    let (ok, d) = k5_fixture();
    report.line("K5 fixture", ok, d);
    let (ok, d) = embedding_table();
    report.line("embedding table", ok, d);
    let (ok, d) = torus_faces();
    report.line("torus faces", ok, d);
    let (ok, d) = determinism();
    report.line("determinism", ok, d);

    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        std::process::exit(1);
    }
}
