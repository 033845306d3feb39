//! The `cdc` command line: corpus generation, pipeline runs, verification,
//! the search oracle, the embedding suite and summary reports.
//!
//! Reports go to standard output, one JSON record per line unless a text
//! format is asked for. Diagnostics go to standard error. Exit codes: 0 on
//! success, 1 on input errors, 2 when a run stops without a cover, 3 when a
//! cover fails verification.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::decompose::Seq;
use crate::embedding::{
    face_trace, faces_as_cdc, genus_bound, inductive_complete_embedding, k5_torus_fixture, repeated_edges,
    RotationSystem,
};
use crate::generators::{corpus_specs_with_seed, make, FamilySpec};
use crate::graph::{parse_edge_list, Graph};
use crate::pipeline::{run_pipeline, CdcOutcome, PipelineError, RunOptions, Status};
use crate::verify::{brute_force_cdc, verify_cdc, CdcCandidate, OracleLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_STOPPED: i32 = 2;
pub const EXIT_UNVERIFIED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cdc", version, about = "Cycle double covers through a two-sheet lift")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print graphs from a family or the corpus.
    Gen {
        #[command(flatten)]
        input: GenInput,
        /// Output format.
        #[arg(long, value_enum, default_value_t = GraphFormat::EdgeList)]
        format: GraphFormat,
    },
    /// Run the decomposition pipeline and verify the result.
    Run {
        #[command(flatten)]
        input: Input,
        /// Elimination rounds allowed (default: four per edge).
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Include stage dumps in each record.
        #[arg(long)]
        trace: bool,
        /// Also run the search oracle on graphs small enough for it.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Check a list of cycles against a graph.
    Verify {
        /// Graph in edge-list format.
        #[arg(long)]
        file: PathBuf,
        /// Cycles as JSON (`{"cycles": [...]}` or a bare array) or one cycle per line.
        #[arg(long)]
        cycles: PathBuf,
    },
    /// Search exhaustively for a cover.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Edge bound for the search.
        #[arg(long, default_value_t = 20)]
        max_edges: usize,
    },
    /// Face tracing of complete-graph embeddings.
    Embed {
        /// Embed the complete graph on this many vertices.
        #[arg(long, group = "what")]
        k: Option<usize>,
        /// Use a fixed embedding.
        #[arg(long, value_enum, group = "what")]
        fixture: Option<Fixture>,
        /// Genus table for k = 3..8.
        #[arg(long, group = "what")]
        table: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Summarize pipeline runs over the input.
    Report {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

/// Exactly one input source.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Graph in edge-list format.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Family spec such as `petersen`, `complete:5`, `random-cubic:12`.
    #[arg(long)]
    pub family: Option<String>,
    /// The bundled corpus.
    #[arg(long)]
    pub corpus: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    #[command(flatten)]
    pub source: Source,
    /// Seed for random families; for the corpus, the first random seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GenSource {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub corpus: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GenInput {
    #[command(flatten)]
    pub source: GenSource,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    EdgeList,
    Json,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    K5Torus,
}

/// A named input graph, or the reason it could not be built.
struct Named {
    name: String,
    graph: Graph,
}

fn resolve_family(text: &str, seed: Option<u64>) -> Result<FamilySpec, String> {
    let mut spec: FamilySpec = text.parse().map_err(|e| format!("--family {text}: {e}"))?;
    if let FamilySpec::RandomCubic { seed: s, .. } = &mut spec {
        let params = text.split_once(':').map_or("", |(_, p)| p);
        let explicit = params.split([',', ':']).filter(|t| !t.trim().is_empty()).count() >= 2;
        match (explicit, seed) {
            (_, Some(x)) => *s = x,
            (true, None) => {}
            (false, None) => return Err(format!("--family {text}: random families need --seed")),
        }
    }
    Ok(spec)
}

fn read_graph(path: &Path) -> Result<Named, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let graph = parse_edge_list(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path
        .file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Named { name, graph })
}

fn load(file: Option<&Path>, family: Option<&str>, corpus: bool, seed: Option<u64>) -> Result<Vec<Named>, String> {
    if let Some(p) = file {
        return Ok(vec![read_graph(p)?]);
    }
    let specs = if let Some(f) = family {
        vec![resolve_family(f, seed)?]
    } else if corpus {
        corpus_specs_with_seed(seed.unwrap_or(1))
    } else {
        return Err("no input given".into());
    };
    specs
        .iter()
        .map(|s| {
            let graph = make(s).map_err(|e| format!("{s}: {e}"))?;
            Ok(Named { name: s.name(), graph })
        })
        .collect()
}

fn load_input(input: &Input) -> Result<Vec<Named>, String> {
    let s = &input.source;
    load(s.file.as_deref(), s.family.as_deref(), s.corpus, input.seed)
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) {
    let line = serde_json::to_string(value).expect("reports serialize");
    writeln!(out, "{line}").expect("write to stdout");
}

/// Parses and runs `args` (including the program name).
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen { input, format } => cmd_gen(&input, format, out),
        Command::Run {
            input,
            max_iterations,
            trace,
            oracle,
            format,
        } => cmd_run(&input, RunOptions { max_iterations, trace }, oracle, format, out, err),
        Command::Verify { file, cycles } => cmd_verify(&file, &cycles, out),
        Command::Oracle { input, max_edges } => cmd_oracle(&input, max_edges, out),
        Command::Embed {
            k,
            fixture,
            table,
            format,
        } => cmd_embed(k, fixture, table, format, out),
        Command::Report {
            input,
            max_iterations,
            format,
        } => cmd_report(&input, max_iterations, format, out, err),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn cmd_gen(input: &GenInput, format: GraphFormat, out: &mut dyn Write) -> Result<i32, String> {
    let graphs = load(None, input.source.family.as_deref(), input.source.corpus, input.seed)?;
    for n in &graphs {
        match format {
            GraphFormat::EdgeList => {
                writeln!(out, "# {}", n.name).expect("write to stdout");
                write!(out, "{}", n.graph.to_edge_list()).expect("write to stdout");
            }
            GraphFormat::Dot => {
                let dot = n.graph.to_dot().replacen("graph {", &format!("graph {} {{", n.name), 1);
                write!(out, "{dot}").expect("write to stdout");
            }
            GraphFormat::Json => emit(
                out,
                &json!({
                    "graph": n.name,
                    "vertices": n.graph.vertices().collect::<Vec<_>>(),
                    "edges": n.graph.edges().iter().map(|e| [e.0, e.1]).collect::<Vec<_>>(),
                }),
            ),
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleRecord {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    /// Pipeline success implies the oracle finds a cover.
    agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn oracle_record(g: &Graph, pipeline_ok: bool, max_edges: usize) -> OracleRecord {
    let limits = OracleLimits {
        max_edges,
        ..OracleLimits::default()
    };
    match brute_force_cdc(g, limits) {
        Ok(Some(c)) => OracleRecord {
            status: "found",
            verified: Some(verify_cdc(g, &c).ok),
            agrees: true,
            detail: None,
        },
        Ok(None) => OracleRecord {
            status: "exhausted",
            verified: None,
            agrees: !pipeline_ok,
            detail: None,
        },
        Err(e) => OracleRecord {
            status: "skipped",
            verified: None,
            agrees: true,
            detail: Some(e.to_string()),
        },
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    graph: &'a str,
    #[serde(flatten)]
    outcome: &'a CdcOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleRecord>,
}

/// Worst exit code wins: input errors, then failed verification, then stops.
fn combine(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_INPUT => 3,
        EXIT_UNVERIFIED => 2,
        EXIT_STOPPED => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn outcome_code(o: &CdcOutcome) -> i32 {
    match o.status {
        Status::Success if o.is_verified() => EXIT_OK,
        Status::Success => EXIT_UNVERIFIED,
        Status::NonTermination => EXIT_STOPPED,
    }
}

fn cmd_run(
    input: &Input,
    opts: RunOptions,
    oracle: bool,
    format: ReportFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let graphs = load_input(input)?;
    let mut code = EXIT_OK;
    for n in &graphs {
        let outcome = match run_pipeline(&n.graph, opts) {
            Ok(o) => o,
            Err(e) => {
                code = combine(code, EXIT_INPUT);
                report_rejection(&n.name, &e, format, out, err);
                continue;
            }
        };
        code = combine(code, outcome_code(&outcome));
        let oracle = oracle.then(|| oracle_record(&n.graph, outcome.is_verified(), OracleLimits::default().max_edges));
        match format {
            ReportFormat::Json => emit(
                out,
                &RunRecord {
                    graph: &n.name,
                    outcome: &outcome,
                    oracle,
                },
            ),
            ReportFormat::Text => {
                let status = match outcome.status {
                    Status::Success if outcome.is_verified() => "verified".to_string(),
                    Status::Success => "UNVERIFIED".to_string(),
                    Status::NonTermination => {
                        format!(
                            "stopped: {}",
                            outcome.report.reason.as_ref().expect("stopped runs carry a reason")
                        )
                    }
                };
                let oracle = oracle.map_or(String::new(), |o| format!(" oracle={}", o.status));
                writeln!(
                    out,
                    "{} edges={} cycles={} rounds={} {status}{oracle}",
                    n.name,
                    n.graph.edge_count(),
                    outcome.cycles.len(),
                    outcome.iterations
                )
                .expect("write to stdout");
                for c in &outcome.cycles {
                    writeln!(out, "  {}", join(c)).expect("write to stdout");
                }
            }
        }
    }
    Ok(code)
}

fn report_rejection(name: &str, e: &PipelineError, format: ReportFormat, out: &mut dyn Write, err: &mut dyn Write) {
    let _ = writeln!(err, "{name}: {e}");
    match (e, format) {
        (PipelineError::Input(r), ReportFormat::Json) => emit(
            out,
            &json!({"graph": name, "status": "invalid_input", "verdict": r, "message": r.to_string()}),
        ),
        (PipelineError::Input(r), ReportFormat::Text) => {
            writeln!(out, "{name} invalid input: {r}").expect("write to stdout");
        }
        (other, ReportFormat::Json) => emit(
            out,
            &json!({"graph": name, "status": "error", "message": other.to_string()}),
        ),
        (other, ReportFormat::Text) => writeln!(out, "{name} error: {other}").expect("write to stdout"),
    }
}

fn join(c: &[usize]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Cycles from JSON or from whitespace-separated lines.
pub fn parse_cycles(text: &str) -> Result<CdcCandidate, String> {
    let t = text.trim_start();
    if t.starts_with('{') {
        return serde_json::from_str::<CdcCandidate>(t).map_err(|e| format!("cycles: {e}"));
    }
    if t.starts_with('[') {
        let cycles: Vec<Seq> = serde_json::from_str(t).map_err(|e| format!("cycles: {e}"))?;
        return Ok(CdcCandidate { cycles });
    }
    let mut cycles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let c: Result<Seq, _> = body.split_whitespace().map(|x| x.parse::<usize>()).collect();
        let c = c.map_err(|_| format!("cycles line {}: expected vertex ids, got {raw:?}", i + 1))?;
        cycles.push(c);
    }
    Ok(CdcCandidate { cycles })
}

fn cmd_verify(file: &Path, cycles: &Path, out: &mut dyn Write) -> Result<i32, String> {
    let g = read_graph(file)?.graph;
    let text = std::fs::read_to_string(cycles).map_err(|e| format!("{}: {e}", cycles.display()))?;
    let c = parse_cycles(&text)?;
    let report = verify_cdc(&g, &c);
    emit(out, &report);
    Ok(if report.ok { EXIT_OK } else { EXIT_UNVERIFIED })
}

fn cmd_oracle(input: &Input, max_edges: usize, out: &mut dyn Write) -> Result<i32, String> {
    let graphs = load_input(input)?;
    let limits = OracleLimits {
        max_edges,
        ..OracleLimits::default()
    };
    let mut code = EXIT_OK;
    for n in &graphs {
        let rec = match brute_force_cdc(&n.graph, limits) {
            Ok(Some(c)) => {
                let ok = verify_cdc(&n.graph, &c).ok;
                if !ok {
                    code = combine(code, EXIT_UNVERIFIED);
                }
                json!({"graph": n.name, "status": "found", "verified": ok, "cycles": c.cycles})
            }
            Ok(None) => {
                code = combine(code, EXIT_STOPPED);
                json!({"graph": n.name, "status": "exhausted"})
            }
            Err(e) => {
                if input.source.corpus {
                    json!({"graph": n.name, "status": "skipped", "message": e.to_string()})
                } else {
                    code = combine(code, EXIT_INPUT);
                    json!({"graph": n.name, "status": "error", "message": e.to_string()})
                }
            }
        };
        emit(out, &rec);
    }
    Ok(code)
}

fn embed_record(label: &str, rs: &RotationSystem, bound: Option<(i64, i64)>) -> serde_json::Value {
    let fs = face_trace(rs).expect("embeddings here are connected");
    let verdict = faces_as_cdc(rs.host(), &fs);
    let non_cycle: Vec<serde_json::Value> = verdict
        .malformed
        .iter()
        .map(|&i| json!({"face": fs.faces[i], "repeated_edges": repeated_edges(&fs.faces[i])}))
        .collect();
    json!({
        "embedding": label,
        "vertices": rs.host().vertex_count(),
        "edges": rs.host().edge_count(),
        "faces": fs.faces.len(),
        "chi": fs.chi,
        "genus": fs.genus,
        "bound": bound.map(|(g, c)| json!({"genus": g, "chi": c})),
        "rotation": rs,
        "face_walks": fs.faces,
        "faces_as_cdc": verdict,
        "non_cycle_faces": non_cycle,
    })
}

fn cmd_embed(
    k: Option<usize>,
    fixture: Option<Fixture>,
    table: bool,
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let mut records = Vec::new();
    if table {
        for k in 3..=8 {
            let rs = inductive_complete_embedding(k).map_err(|e| e.to_string())?;
            records.push(embed_record(&format!("K{k}"), &rs, genus_bound(k).ok()));
        }
    } else if let Some(k) = k {
        let bound = genus_bound(k).map_err(|e| e.to_string())?;
        let rs = inductive_complete_embedding(k).map_err(|e| e.to_string())?;
        records.push(embed_record(&format!("K{k}"), &rs, Some(bound)));
    } else if let Some(Fixture::K5Torus) = fixture {
        records.push(embed_record("k5-torus", &k5_torus_fixture(), None));
    } else {
        return Err("embed needs --k, --fixture or --table".into());
    }
    for r in &records {
        match format {
            ReportFormat::Json => emit(out, r),
            ReportFormat::Text => {
                writeln!(
                    out,
                    "{} faces={} chi={} genus={} faces_form_cdc={}",
                    r["embedding"].as_str().unwrap_or(""),
                    r["faces"],
                    r["chi"],
                    r["genus"],
                    r["faces_as_cdc"]["ok"]
                )
                .expect("write to stdout");
                for f in r["face_walks"].as_array().into_iter().flatten() {
                    let vs: Vec<String> = f.as_array().into_iter().flatten().map(|v| v.to_string()).collect();
                    writeln!(out, "  {}", vs.join(" ")).expect("write to stdout");
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_report(
    input: &Input,
    max_iterations: Option<usize>,
    format: ReportFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let graphs = load_input(input)?;
    let opts = RunOptions {
        max_iterations,
        trace: false,
    };
    let mut code = EXIT_OK;
    let (mut verified, mut unverified, mut stopped, mut invalid, mut clean) = (0, 0, 0, 0, 0);
    let mut rounds = 0;
    let mut cycles = 0;
    let mut findings = Vec::new();
    for n in &graphs {
        match run_pipeline(&n.graph, opts) {
            Ok(o) => {
                code = combine(code, outcome_code(&o));
                match outcome_code(&o) {
                    EXIT_OK => verified += 1,
                    EXIT_UNVERIFIED => unverified += 1,
                    _ => {
                        stopped += 1;
                        findings.push(json!({"graph": n.name, "reason": o.report.reason}));
                    }
                }
                if o.report.audits.clean() {
                    clean += 1;
                }
                rounds += o.iterations;
                cycles += o.cycles.len();
            }
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", n.name);
                code = combine(code, EXIT_INPUT);
                invalid += 1;
            }
        }
    }
    let summary = json!({
        "graphs": graphs.len(),
        "verified": verified,
        "unverified": unverified,
        "non_termination": stopped,
        "invalid_input": invalid,
        "audits_clean": clean,
        "elimination_rounds": rounds,
        "cycles": cycles,
        "findings": findings,
    });
    match format {
        ReportFormat::Json => emit(out, &summary),
        ReportFormat::Text => {
            writeln!(
                out,
                "graphs {}\nverified {verified}\nunverified {unverified}\nnon-termination {stopped}\ninvalid input {invalid}\naudits clean {clean}\nelimination rounds {rounds}\ncycles {cycles}",
                graphs.len()
            )
            .expect("write to stdout");
        }
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_formats() {
        let a = parse_cycles("0 1 2 0\n# comment\n0 1 2 0\n").unwrap();
        let b = parse_cycles("[[0,1,2,0],[0,1,2,0]]").unwrap();
        let c = parse_cycles(r#"{"cycles": [[0,1,2,0],[0,1,2,0]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(parse_cycles("0 1 x").is_err());
        assert!(parse_cycles("[[0,1").is_err());
    }

    #[test]
    fn family_seeds() {
        assert!(resolve_family("random-cubic:10", None).is_err());
        assert_eq!(
            resolve_family("random-cubic:10", Some(4)).unwrap(),
            FamilySpec::RandomCubic { n: 10, seed: 4 }
        );
        assert_eq!(
            resolve_family("random-cubic:10:2", None).unwrap(),
            FamilySpec::RandomCubic { n: 10, seed: 2 }
        );
        assert_eq!(
            resolve_family("random-cubic:10,2", None).unwrap(),
            FamilySpec::RandomCubic { n: 10, seed: 2 }
        );
        assert_eq!(resolve_family("petersen", Some(9)).unwrap(), FamilySpec::Petersen);
    }

    #[test]
    fn exit_code_order() {
        assert_eq!(combine(EXIT_STOPPED, EXIT_OK), EXIT_STOPPED);
        assert_eq!(combine(EXIT_STOPPED, EXIT_UNVERIFIED), EXIT_UNVERIFIED);
        assert_eq!(combine(EXIT_UNVERIFIED, EXIT_INPUT), EXIT_INPUT);
    }
}
