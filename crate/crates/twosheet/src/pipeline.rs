//! End-to-end run: validate, lift, decompose, reduce, verify.

use serde::Serialize;
use thiserror::Error;

use crate::audit::{Audits, Recorder, StageDump};
use crate::decompose::{decompose, DecomposeError, Decomposed, Decomposition, Seq};
use crate::graph::{is_valid_input, Graph, Rejection, Verdict};
use crate::reduce::{run_reduction, NonTermination, Reduction, ReductionState};
use crate::verify::{verify_cdc, CdcCandidate, VerifyReport};
use crate::walk::canonical_sorted;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Elimination rounds allowed; `None` means four per edge.
    pub max_iterations: Option<usize>,
    pub trace: bool,
}

impl RunOptions {
    pub fn cap(&self, g: &Graph) -> usize {
        self.max_iterations.unwrap_or(4 * g.edge_count())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Input(Rejection),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    NonTermination,
}

/// State at the point a run stopped.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub decomposition: Option<Decomposition>,
    pub state: ReductionState,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeReport {
    /// The all-even case, finished without reduction.
    pub shortcut: bool,
    pub verify: Option<VerifyReport>,
    pub audits: Audits,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<NonTermination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Box<Snapshot>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<StageDump>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CdcOutcome {
    pub status: Status,
    /// Canonical cycles; empty unless the run succeeded.
    pub cycles: Vec<Seq>,
    pub iterations: usize,
    pub report: OutcomeReport,
}

impl CdcOutcome {
    /// Succeeded and the independent verifier accepted the cycles.
    pub fn is_verified(&self) -> bool {
        self.status == Status::Success && self.report.verify.as_ref().is_some_and(|v| v.ok)
    }
}

/// Audits that make the later stages meaningless when they fail.
fn fatal_failures(a: &Audits) -> Vec<String> {
    let mut out = Vec::new();
    if !a.conservation_ok() {
        out.push("conservation".to_string());
    }
    if !a.odd_aux_cycles.is_empty() {
        out.push("aux_parity".to_string());
    }
    if !a.segment_even_ends.is_empty() {
        out.push("segment_ends_odd".to_string());
    }
    out
}

pub fn run_pipeline(g: &Graph, opts: RunOptions) -> Result<CdcOutcome, PipelineError> {
    if let Verdict::Reject(r) = is_valid_input(g) {
        return Err(PipelineError::Input(r));
    }
    let mut rec = Recorder::new(opts.trace);
    let d = match decompose(g, &mut rec)? {
        Decomposed::Shortcut { cycles, .. } => {
            return Ok(finish(g, rec, canonical_sorted(&cycles), 0, true));
        }
        Decomposed::Staged(d) => d,
    };
    let start = ReductionState::from_decomposition(&d);
    let fatal = fatal_failures(&rec.audits);
    if !fatal.is_empty() {
        return Ok(stopped(
            rec,
            NonTermination::InvariantViolation { audits: fatal },
            0,
            Some(*d),
            start,
        ));
    }
    match run_reduction(g, start, opts.cap(g), &mut rec) {
        Reduction::Done { cycles, iterations } => Ok(finish(g, rec, cycles, iterations, false)),
        Reduction::Stopped {
            why,
            iterations,
            snapshot,
        } => Ok(stopped(rec, why, iterations, Some(*d), *snapshot)),
    }
}

fn finish(g: &Graph, rec: Recorder, cycles: Vec<Seq>, iterations: usize, shortcut: bool) -> CdcOutcome {
    let verify = verify_cdc(g, &CdcCandidate { cycles: cycles.clone() });
    CdcOutcome {
        status: Status::Success,
        cycles,
        iterations,
        report: OutcomeReport {
            shortcut,
            verify: Some(verify),
            audits: rec.audits,
            reason: None,
            snapshot: None,
            trace: rec.trace,
        },
    }
}

fn stopped(
    rec: Recorder,
    why: NonTermination,
    iterations: usize,
    decomposition: Option<Decomposition>,
    state: ReductionState,
) -> CdcOutcome {
    CdcOutcome {
        status: Status::NonTermination,
        cycles: Vec::new(),
        iterations,
        report: OutcomeReport {
            shortcut: false,
            verify: None,
            audits: rec.audits,
            reason: Some(why),
            snapshot: Some(Box::new(Snapshot { decomposition, state })),
            trace: rec.trace,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, petersen, prism, theta};

    #[test]
    fn small_graphs_succeed() {
        for g in [
            complete(3).unwrap(),
            complete(4).unwrap(),
            complete(5).unwrap(),
            theta(1, 2, 2).unwrap(),
            prism(3).unwrap(),
            petersen(),
            cycle(6).unwrap(),
        ] {
            let out = run_pipeline(&g, RunOptions::default()).unwrap();
            assert!(out.is_verified(), "{g:?}: {:?}", out.report.reason);
            assert!(out.report.audits.clean(), "{:?}", out.report.audits.kind_mismatches);
        }
    }

    #[test]
    fn all_even_shortcut() {
        let out = run_pipeline(&complete(5).unwrap(), RunOptions::default()).unwrap();
        assert!(out.report.shortcut);
        assert_eq!(out.iterations, 0);
        assert!(out.is_verified());
    }

    #[test]
    fn rejects_bridges() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(matches!(
            run_pipeline(&g, RunOptions::default()),
            Err(PipelineError::Input(Rejection::Bridge { .. }))
        ));
    }

    #[test]
    fn json_shape() {
        let out = run_pipeline(&complete(3).unwrap(), RunOptions::default()).unwrap();
        let v = serde_json::to_value(&out).unwrap();
        assert_eq!(v["status"], "success");
        assert_eq!(v["cycles"], serde_json::json!([[0, 1, 2, 0], [0, 1, 2, 0]]));
        assert_eq!(v["iterations"], 0);
        assert_eq!(v["report"]["verify"]["ok"], true);
    }
}
