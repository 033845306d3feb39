//! Walks as vertex sequences, their classification, and edge coverage.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge_graph, find_bridges, Edge, Graph, Vertex};

/// A vertex sequence. A walk is closed when it has at least two entries and
/// its first and last entries agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Walk {
    pub vertices: Vec<Vertex>,
}

impl Walk {
    pub fn new(vertices: Vec<Vertex>) -> Walk {
        Walk { vertices }
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.len() >= 2 && self.vertices.first() == self.vertices.last()
    }

    /// Number of edge traversals.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn steps(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn canonical(&self) -> Walk {
        Walk::new(canonical(&self.vertices))
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl From<Vec<Vertex>> for Walk {
    fn from(v: Vec<Vertex>) -> Walk {
        Walk::new(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Walk,
    Trail,
    Circuit,
    Path,
    Cycle,
    Fork,
    Segment,
    DoubleCycle,
    Branch,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WalkKind::Walk => "walk",
            WalkKind::Trail => "trail",
            WalkKind::Circuit => "circuit",
            WalkKind::Path => "path",
            WalkKind::Cycle => "cycle",
            WalkKind::Fork => "fork",
            WalkKind::Segment => "segment",
            WalkKind::DoubleCycle => "double_cycle",
            WalkKind::Branch => "branch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("empty walk")]
    Empty,
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(Vertex, Vertex),
    #[error("expected a fork or segment, found {0}")]
    Kind(WalkKind),
}

/// Per-edge traversal counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageMap {
    pub counts: BTreeMap<Edge, u32>,
}

impl CoverageMap {
    pub fn new() -> CoverageMap {
        CoverageMap::default()
    }

    pub fn get(&self, e: Edge) -> u32 {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    pub fn add_edge(&mut self, e: Edge, k: u32) {
        if k > 0 {
            *self.counts.entry(e).or_insert(0) += k;
        }
    }

    /// Adds `times` copies of every traversal of `seq`.
    pub fn add_seq(&mut self, seq: &[Vertex], times: u32) {
        for w in seq.windows(2) {
            self.add_edge(Edge::new(w[0], w[1]), times);
        }
    }

    pub fn add_map(&mut self, other: &CoverageMap) {
        for (&e, &k) in &other.counts {
            self.add_edge(e, k);
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&k| k as u64).sum()
    }

    pub fn edges_with(&self, k: u32) -> BTreeSet<Edge> {
        self.counts.iter().filter(|&(_, &c)| c == k).map(|(&e, _)| e).collect()
    }

    pub fn support(&self) -> BTreeSet<Edge> {
        self.counts.iter().filter(|&(_, &c)| c > 0).map(|(&e, _)| e).collect()
    }

    /// True when every edge of `g` has count `k` and nothing else is counted.
    pub fn is_constant_on(&self, g: &Graph, k: u32) -> bool {
        g.edges().iter().all(|&e| self.get(e) == k)
            && self.counts.iter().all(|(e, &c)| c == 0 || g.edge_index(*e).is_some())
    }

    /// Map from coverage value to number of edges of `g` with it.
    pub fn histogram(&self, g: &Graph) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for &e in g.edges() {
            *h.entry(self.get(e)).or_insert(0) += 1;
        }
        h
    }
}

pub fn seq_coverage(seq: &[Vertex]) -> CoverageMap {
    let mut c = CoverageMap::new();
    c.add_seq(seq, 1);
    c
}

pub fn walk_coverage(w: &Walk) -> CoverageMap {
    seq_coverage(&w.vertices)
}

/// Canonical representative: closed sequences take the smallest rotation over
/// both directions; open sequences the smaller of the two directions.
pub fn canonical(seq: &[Vertex]) -> Vec<Vertex> {
    let closed = seq.len() >= 2 && seq.first() == seq.last();
    if !closed {
        let rev: Vec<Vertex> = seq.iter().rev().copied().collect();
        return if rev < seq.to_vec() { rev } else { seq.to_vec() };
    }
    let body = &seq[..seq.len() - 1];
    let n = body.len();
    let mut best: Option<Vec<Vertex>> = None;
    let rev: Vec<Vertex> = body.iter().rev().copied().collect();
    for src in [body, rev.as_slice()] {
        for i in 0..n {
            let cand: Vec<Vertex> = src[i..].iter().chain(&src[..i]).copied().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    let mut out = best.unwrap_or_default();
    out.push(out[0]);
    out
}

/// Canonical ordering of walks: shorter first, then lexicographic.
pub fn canonical_cmp(a: &[Vertex], b: &[Vertex]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Sorts canonical forms of `walks` in canonical order.
pub fn canonical_sorted<I, W>(walks: I) -> Vec<Vec<Vertex>>
where
    I: IntoIterator<Item = W>,
    W: AsRef<[Vertex]>,
{
    let mut out: Vec<Vec<Vertex>> = walks.into_iter().map(|w| canonical(w.as_ref())).collect();
    out.sort_by(|a, b| canonical_cmp(a, b));
    out
}

pub(crate) fn vertex_counts(body: &[Vertex]) -> BTreeMap<Vertex, usize> {
    let mut m = BTreeMap::new();
    for &v in body {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

/// True when `seq` is a closed walk with no repeated vertex and at least 3 edges.
pub fn is_cycle_seq(seq: &[Vertex]) -> bool {
    if seq.len() < 4 || seq.first() != seq.last() {
        return false;
    }
    let body = &seq[..seq.len() - 1];
    let set: BTreeSet<_> = body.iter().collect();
    set.len() == body.len()
}

/// True when no edge is traversed twice.
pub fn is_trail_seq(seq: &[Vertex]) -> bool {
    let mut seen = BTreeSet::new();
    seq.windows(2).all(|w| seen.insert(Edge::new(w[0], w[1])))
}

fn is_single_cycle(es: &BTreeSet<Edge>) -> bool {
    if es.len() < 3 {
        return false;
    }
    let h = edge_graph(es);
    h.vertices().all(|v| h.degree(v) == 2) && crate::graph::is_connected(&h)
}

/// Most specific kind of `w` in `g`.
pub fn classify_walk(g: &Graph, w: &Walk) -> Result<WalkKind, WalkError> {
    if w.vertices.is_empty() {
        return Err(WalkError::Empty);
    }
    for p in w.vertices.windows(2) {
        if !g.has_edge(p[0], p[1]) {
            return Err(WalkError::NotAdjacent(p[0], p[1]));
        }
    }
    if w.vertices.len() == 1 {
        return if g.contains_vertex(w.vertices[0]) {
            Ok(WalkKind::Path)
        } else {
            Err(WalkError::Empty)
        };
    }
    Ok(classify_seq(&w.vertices))
}

/// Classification of an already adjacency-checked sequence.
pub(crate) fn classify_seq(seq: &[Vertex]) -> WalkKind {
    let cov = seq_coverage(seq);
    let max = cov.counts.values().copied().max().unwrap_or(0);
    let closed = seq.len() >= 2 && seq.first() == seq.last();
    if !closed {
        let distinct: BTreeSet<_> = seq.iter().collect();
        return if distinct.len() == seq.len() {
            WalkKind::Path
        } else if max <= 1 {
            WalkKind::Trail
        } else {
            WalkKind::Walk
        };
    }
    let body = &seq[..seq.len() - 1];
    if max == 1 {
        return if is_cycle_seq(seq) {
            WalkKind::Cycle
        } else {
            WalkKind::Circuit
        };
    }
    let min = cov.counts.values().copied().min().unwrap_or(0);
    if min == 2 && max == 2 {
        if is_single_cycle(&cov.support()) {
            return WalkKind::DoubleCycle;
        }
        return if vertex_counts(body).values().all(|&k| k <= 2) {
            WalkKind::Segment
        } else {
            WalkKind::Fork
        };
    }
    if min == 1 && max == 2 && is_branch_coverage(&cov) {
        return WalkKind::Branch;
    }
    WalkKind::Walk
}

/// Branch shape: once-covered edges form an even subgraph, twice-covered edges
/// are exactly the cut edges of the support.
pub(crate) fn is_branch_coverage(cov: &CoverageMap) -> bool {
    let support = cov.support();
    let bridges = find_bridges(&edge_graph(&support));
    let once = cov.edges_with(1);
    let twice = cov.edges_with(2);
    let even = {
        let mut deg: BTreeMap<Vertex, usize> = BTreeMap::new();
        for e in &once {
            *deg.entry(e.0).or_insert(0) += 1;
            *deg.entry(e.1).or_insert(0) += 1;
        }
        deg.values().all(|d| d % 2 == 0)
    };
    even && twice == bridges && once.is_disjoint(&bridges)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ForkRoles {
    pub ending: BTreeSet<Vertex>,
    pub inner: BTreeSet<Vertex>,
    pub bifurcation: BTreeSet<Vertex>,
}

/// Roles by how often the closed traversal passes each vertex: once, twice, more.
pub fn fork_vertex_roles(w: &Walk) -> Result<ForkRoles, WalkError> {
    let kind = if w.is_closed() {
        classify_seq(&w.vertices)
    } else {
        WalkKind::Walk
    };
    if !matches!(kind, WalkKind::Fork | WalkKind::Segment) {
        return Err(WalkError::Kind(kind));
    }
    Ok(closed_roles(&w.vertices))
}

pub(crate) fn closed_roles(seq: &[Vertex]) -> ForkRoles {
    let mut r = ForkRoles::default();
    for (v, k) in vertex_counts(&seq[..seq.len() - 1]) {
        match k {
            1 => r.ending.insert(v),
            2 => r.inner.insert(v),
            _ => r.bifurcation.insert(v),
        };
    }
    r
}
