//! Invariant audits and stage dumps collected during a pipeline run.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{Graph, Vertex};
use crate::walk::{canonical, classify_seq, CoverageMap, WalkKind};

/// Conservation check of one stage: does the live multiset cover every edge twice?
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCheck {
    pub stage: String,
    pub ok: bool,
}

/// Counters and violation lists. An empty violation list is a passed audit.
#[derive(Clone, Debug, Serialize)]
pub struct Audits {
    pub conservation: Vec<StageCheck>,
    pub aux_counts_checked: usize,
    /// Projections of lifted cycles with an odd number of auxiliary edges.
    pub odd_aux_cycles: Vec<Vec<Vertex>>,
    pub lifted_consistent: bool,
    pub segments_checked: usize,
    /// Maximal segments with an ending vertex of even degree.
    pub segment_even_ends: Vec<(Vec<Vertex>, Vertex)>,
    /// Vertices where two maximal segments still end together.
    pub segments_not_maximal: usize,
    pub forks_checked: usize,
    /// Bifurcation vertices whose degree in their fork is not 3.
    pub bifurcation_degree: Vec<(Vertex, usize)>,
    /// Fork blocks without disjoint T-joins, whose cycles were chosen greedily.
    pub h1_greedy_blocks: usize,
    /// Residual component counts of forks whose residual is not one closed walk.
    pub branch_splits: Vec<usize>,
    pub branches_checked: usize,
    /// Branches whose twice-covered edges differ from their cut edges.
    pub branch_cut_edges: Vec<Vec<Vertex>>,
    pub surgeries: usize,
    pub surgery_violations: Vec<String>,
    /// Elements whose stored kind does not re-derive from the sequence.
    pub kind_mismatches: Vec<String>,
}

impl Default for Audits {
    fn default() -> Audits {
        Audits {
            conservation: Vec::new(),
            aux_counts_checked: 0,
            odd_aux_cycles: Vec::new(),
            lifted_consistent: true,
            segments_checked: 0,
            segment_even_ends: Vec::new(),
            segments_not_maximal: 0,
            forks_checked: 0,
            bifurcation_degree: Vec::new(),
            h1_greedy_blocks: 0,
            branch_splits: Vec::new(),
            branches_checked: 0,
            branch_cut_edges: Vec::new(),
            surgeries: 0,
            surgery_violations: Vec::new(),
            kind_mismatches: Vec::new(),
        }
    }
}

impl Audits {
    pub fn conservation_ok(&self) -> bool {
        self.conservation.iter().all(|c| c.ok)
    }

    /// Every exact audit passed. Branch splits and greedy blocks are reported, not failed.
    pub fn clean(&self) -> bool {
        self.conservation_ok()
            && self.odd_aux_cycles.is_empty()
            && self.lifted_consistent
            && self.segment_even_ends.is_empty()
            && self.segments_not_maximal == 0
            && self.bifurcation_degree.is_empty()
            && self.branch_cut_edges.is_empty()
            && self.surgery_violations.is_empty()
            && self.kind_mismatches.is_empty()
    }

    /// Names of the audits that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.conservation_ok() {
            out.push("conservation");
        }
        if !self.odd_aux_cycles.is_empty() {
            out.push("aux_parity");
        }
        if !self.lifted_consistent {
            out.push("lifted_consistency");
        }
        if !self.segment_even_ends.is_empty() {
            out.push("segment_ends_odd");
        }
        if self.segments_not_maximal > 0 {
            out.push("segment_maximality");
        }
        if !self.bifurcation_degree.is_empty() {
            out.push("bifurcation_degree");
        }
        if !self.branch_cut_edges.is_empty() {
            out.push("branch_cut_edges");
        }
        if !self.surgery_violations.is_empty() {
            out.push("surgery_multiset");
        }
        if !self.kind_mismatches.is_empty() {
            out.push("kinds");
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceItem {
    pub set: String,
    pub kind: WalkKind,
    pub multiplicity: u32,
    pub walk: Vec<Vertex>,
}

/// One stage of the decomposition: its elements and the coverage histogram.
#[derive(Clone, Debug, Serialize)]
pub struct StageDump {
    pub stage: String,
    pub items: Vec<TraceItem>,
    /// Coverage value to number of edges with it.
    pub histogram: BTreeMap<u32, usize>,
}

/// Collects audits, and stage dumps when tracing.
#[derive(Debug, Default)]
pub struct Recorder {
    pub audits: Audits,
    pub trace: Option<Vec<StageDump>>,
}

/// Kinds each named set may hold.
fn expected_kinds(set: &str) -> &'static [WalkKind] {
    match set {
        "L" | "Q1" | "D" | "H1" | "H2" | "pool" => &[WalkKind::Cycle],
        "R" => &[WalkKind::Cycle, WalkKind::Circuit],
        "M" => &[
            WalkKind::Cycle,
            WalkKind::Circuit,
            WalkKind::Segment,
            WalkKind::Fork,
            WalkKind::DoubleCycle,
            WalkKind::Branch,
            WalkKind::Walk,
        ],
        "Q2" | "S_T" | "S" | "BF" => &[WalkKind::Segment],
        "F" => &[WalkKind::Fork, WalkKind::Segment],
        // a branch with no once-covered edges is a doubled tree
        "B" => &[
            WalkKind::Branch,
            WalkKind::Cycle,
            WalkKind::Circuit,
            WalkKind::Segment,
            WalkKind::Fork,
        ],
        _ => &[],
    }
}

impl Recorder {
    pub fn new(trace: bool) -> Recorder {
        Recorder {
            audits: Audits::default(),
            trace: trace.then(Vec::new),
        }
    }

    pub fn check_coverage(&mut self, stage: &str, g: &Graph, cov: &CoverageMap) {
        self.audits.conservation.push(StageCheck {
            stage: stage.to_string(),
            ok: cov.is_constant_on(g, 2),
        });
    }

    /// Records the conservation check and kind checks for a stage, and a dump
    /// when tracing. Sets are `(name, closed walks, multiplicity)`.
    pub fn dump(&mut self, g: &Graph, stage: &str, sets: &[(&str, &Vec<Vec<Vertex>>, u32)]) {
        let mut cov = CoverageMap::new();
        let mut items = Vec::new();
        for &(name, walks, times) in sets {
            let allowed = expected_kinds(name);
            for w in walks {
                cov.add_seq(w, times);
                let kind = classify_seq(w);
                if !allowed.is_empty() && !allowed.contains(&kind) {
                    self.audits
                        .kind_mismatches
                        .push(format!("{stage}/{name}: {w:?} is {kind}"));
                }
                if self.trace.is_some() {
                    items.push(TraceItem {
                        set: name.to_string(),
                        kind,
                        multiplicity: times,
                        walk: canonical(w),
                    });
                }
            }
        }
        self.check_coverage(stage, g, &cov);
        if let Some(t) = self.trace.as_mut() {
            t.push(StageDump {
                stage: stage.to_string(),
                items,
                histogram: cov.histogram(g),
            });
        }
    }
}
