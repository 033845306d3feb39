//! Elimination of branch-fork segments by path surgery.
//!
//! The state is a pool of cycles and a list `BF` of segments (stored as
//! paths). Together they cover every edge twice: each pool cycle once per
//! traversal, each segment twice. A type-A segment `s` with path `P` from `α`
//! to `β` is removed by finding two edge-disjoint trails `p3`, `p4` from `α`
//! to `β` built out of pool cycles and other segments. The closed trails
//! `P + p3` and `P + p4` are peeled into new cycles, and the consumed
//! elements leave the state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::audit::Recorder;
use crate::decompose::{segment_walk, Decomposition, Seq};
use crate::graph::{Edge, Graph, Vertex};
use crate::lift::{even_cycles, peel};
use crate::walk::{canonical, canonical_cmp, canonical_sorted, is_cycle_seq, is_trail_seq, CoverageMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("the cycles share no vertex")]
    Disjoint,
    #[error("{0}")]
    Argument(String),
    #[error("no admissible pivot for the surgery")]
    Site,
}

/// Cycles whose edges form one connected subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectedClass {
    pub cycles: Vec<Seq>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups cycles that are linked through shared vertices.
pub fn connected_classes(pool: &[Seq]) -> Vec<ConnectedClass> {
    let mut parent: Vec<usize> = (0..pool.len()).collect();
    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, c) in pool.iter().enumerate() {
        for &v in c {
            match owner.get(&v) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..pool.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups
        .into_values()
        .map(|ids| {
            let cycles: Vec<Seq> = ids.iter().map(|&i| pool[i].clone()).collect();
            let vertices: BTreeSet<Vertex> = cycles.iter().flatten().copied().collect();
            let edges: BTreeSet<Edge> = cycles
                .iter()
                .flat_map(|c| c.windows(2).map(|w| Edge::new(w[0], w[1])))
                .collect();
            ConnectedClass {
                cycles: canonical_sorted(&cycles),
                vertices: vertices.into_iter().collect(),
                edges: edges.into_iter().collect(),
            }
        })
        .collect()
}

/// The two arcs of cycle `c` from `x` to `y`: forward along `c`, then backward.
pub fn cycle_arcs(c: &[Vertex], x: Vertex, y: Vertex) -> (Seq, Seq) {
    let body = &c[..c.len() - 1];
    let k = body.iter().position(|&v| v == x).expect("x on cycle");
    let rot: Seq = body[k..].iter().chain(&body[..k]).copied().collect();
    let j = rot.iter().position(|&v| v == y).expect("y on cycle");
    let fwd = rot[..=j].to_vec();
    let mut back = vec![x];
    back.extend(rot[j..].iter().rev());
    if j == 0 {
        // x == y: the trivial arc and the full loop
        let mut full = rot.clone();
        full.push(x);
        return (vec![x], full);
    }
    (fwd, back)
}

fn cov(seqs: &[&[Vertex]]) -> CoverageMap {
    let mut c = CoverageMap::new();
    for s in seqs {
        c.add_seq(s, 1);
    }
    c
}

/// Two walks from `a` to `b` and leftover cycles that together use the edges
/// of the consumed elements exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Surgery {
    pub l1: Seq,
    pub l2: Seq,
    pub delta: Vec<Seq>,
}

impl Surgery {
    pub fn coverage(&self) -> CoverageMap {
        let mut c = cov(&[&self.l1, &self.l2]);
        for d in &self.delta {
            c.add_seq(d, 1);
        }
        c
    }
}

/// Splits an open walk into a path and the loops peeled off it.
fn straighten(w: &[Vertex]) -> (Seq, Vec<Seq>) {
    let (loops, path) = peel(w);
    (path, loops)
}

/// Recombines two intersecting cycles into two paths from `a` to `b`.
///
/// When `b` lies on `r1` the two arcs of `r1` are the paths and `r2` comes
/// back whole as `delta`. Otherwise pivots at a shared vertex `x`, joins the
/// two arcs of `r1` from `a` to `x` with the two arcs of `r2` from `x` to `b`,
/// and peels any closed stretch off the joined walks into `delta`. With a
/// single shared vertex `delta` is empty.
pub fn merge_cycles(r1: &[Vertex], r2: &[Vertex], a: Vertex, b: Vertex) -> Result<Surgery, SurgeryError> {
    if !is_cycle_seq(r1) || !is_cycle_seq(r2) {
        return Err(SurgeryError::Argument("inputs must be cycles".into()));
    }
    if canonical(r1) == canonical(r2) {
        return Err(SurgeryError::Argument("cycles must differ".into()));
    }
    let v1: BTreeSet<Vertex> = r1.iter().copied().collect();
    let v2: BTreeSet<Vertex> = r2.iter().copied().collect();
    let shared: Vec<Vertex> = v1.intersection(&v2).copied().collect();
    if shared.is_empty() {
        return Err(SurgeryError::Disjoint);
    }
    if !v1.contains(&a) || v2.contains(&a) {
        return Err(SurgeryError::Argument(format!("{a} must lie on r1 only")));
    }
    if !v2.contains(&b) {
        return Err(SurgeryError::Argument(format!("{b} must lie on r2")));
    }
    if v1.contains(&b) {
        let (l1, l2) = cycle_arcs(r1, a, b);
        return Ok(Surgery {
            l1,
            l2,
            delta: vec![r2.to_vec()],
        });
    }
    for x in shared {
        let (a1, a2) = cycle_arcs(r1, a, x);
        let (b1, b2) = cycle_arcs(r2, x, b);
        for (p, q) in [(&b1, &b2), (&b2, &b1)] {
            let mut w1 = a1.clone();
            w1.extend_from_slice(&p[1..]);
            let mut w2 = a2.clone();
            w2.extend_from_slice(&q[1..]);
            if !is_trail_seq(&w1) || !is_trail_seq(&w2) {
                continue;
            }
            let (l1, mut delta) = straighten(&w1);
            let (l2, more) = straighten(&w2);
            delta.extend(more);
            return Ok(Surgery { l1, l2, delta });
        }
    }
    Err(SurgeryError::Site)
}

/// Extends the path of segment `s` (from `a` to `v`) along both arcs of `r`
/// from `v` to `b`.
pub fn merge_segment_cycle(
    s: &[Vertex],
    r: &[Vertex],
    v: Vertex,
    a: Vertex,
    b: Vertex,
) -> Result<Surgery, SurgeryError> {
    if b == v {
        return Err(SurgeryError::Argument("b must differ from v".into()));
    }
    if !is_cycle_seq(r) || !r.contains(&b) || !r.contains(&v) {
        return Err(SurgeryError::Argument("v and b must lie on the cycle r".into()));
    }
    let path: Seq = if s.first() == Some(&a) && s.last() == Some(&v) {
        s.to_vec()
    } else if s.first() == Some(&v) && s.last() == Some(&a) {
        s.iter().rev().copied().collect()
    } else {
        return Err(SurgeryError::Argument("a and v must be the ends of s".into()));
    };
    let meet: BTreeSet<Vertex> = path.iter().filter(|x| r.contains(x)).copied().collect();
    if meet != BTreeSet::from([v]) {
        return Err(SurgeryError::Site);
    }
    let (arc1, arc2) = cycle_arcs(r, v, b);
    let mut l1 = path.clone();
    l1.extend_from_slice(&arc1[1..]);
    let mut l2 = path;
    l2.extend_from_slice(&arc2[1..]);
    Ok(Surgery {
        l1,
        l2,
        delta: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SegmentType {
    A,
    B,
}

/// Type A: neither ending vertex is an inner vertex of another segment.
pub fn classify_bf_segment(i: usize, bf: &[Seq]) -> SegmentType {
    let s = &bf[i];
    let ends = [s[0], *s.last().unwrap()];
    let inner_elsewhere = bf
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .any(|(_, t)| t.len() > 2 && t[1..t.len() - 1].iter().any(|v| ends.contains(v)));
    if inner_elsewhere {
        SegmentType::B
    } else {
        SegmentType::A
    }
}

/// Reduction state: cycles plus segments, covering every edge twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionState {
    pub pool: Vec<Seq>,
    pub bf: Vec<Seq>,
}

impl ReductionState {
    pub fn from_decomposition(d: &Decomposition) -> ReductionState {
        ReductionState {
            pool: d.pool(),
            bf: d.bf.clone(),
        }
    }

    pub fn coverage(&self) -> CoverageMap {
        let mut c = CoverageMap::new();
        for p in &self.pool {
            c.add_seq(p, 1);
        }
        for s in &self.bf {
            c.add_seq(s, 2);
        }
        c
    }

    pub fn classes(&self) -> Vec<ConnectedClass> {
        connected_classes(&self.pool)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Cycle(usize),
    Seg(usize),
    Vert(Vertex),
}

/// One hop of a chain: through pool cycle or segment `hub`, from `x` to `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Step {
    segment: bool,
    hub: usize,
    x: Vertex,
    y: Vertex,
}

/// Incidence graph of pool cycles and segments other than `skip`.
fn incidence(state: &ReductionState, skip: usize, banned: &BTreeSet<Node>) -> BTreeMap<Node, Vec<Node>> {
    let mut adj: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    let mut link = |hub: Node, verts: &[Vertex]| {
        let vs: BTreeSet<Vertex> = verts.iter().copied().collect();
        for v in vs {
            adj.entry(Node::Vert(v)).or_default().push(hub);
            adj.entry(hub).or_default().push(Node::Vert(v));
        }
    };
    for (i, c) in state.pool.iter().enumerate() {
        if !banned.contains(&Node::Cycle(i)) {
            link(Node::Cycle(i), c);
        }
    }
    for (j, s) in state.bf.iter().enumerate() {
        if j != skip && !banned.contains(&Node::Seg(j)) {
            link(Node::Seg(j), s);
        }
    }
    for l in adj.values_mut() {
        l.sort_unstable();
    }
    adj
}

/// Converts an alternating node path vertex, element, ..., vertex into steps.
fn to_steps(nodes: &[Node]) -> Vec<Step> {
    let mut steps = Vec::new();
    for k in (1..nodes.len()).step_by(2) {
        let (Node::Vert(x), Node::Vert(y)) = (nodes[k - 1], nodes[k + 1]) else {
            unreachable!("chains alternate")
        };
        let (segment, hub) = match nodes[k] {
            Node::Cycle(i) => (false, i),
            Node::Seg(j) => (true, j),
            Node::Vert(_) => unreachable!("chains alternate"),
        };
        steps.push(Step { segment, hub, x, y });
    }
    steps
}

/// Shortest alternation vertex, element, vertex, ... from `α` to `β` in the
/// incidence graph of pool cycles and segments, skipping `skip` and `banned`.
fn chain(
    state: &ReductionState,
    skip: usize,
    alpha: Vertex,
    beta: Vertex,
    banned: &BTreeSet<Node>,
) -> Option<Vec<Step>> {
    let adj = incidence(state, skip, banned);
    let start = Node::Vert(alpha);
    let goal = Node::Vert(beta);
    let mut prev: BTreeMap<Node, Option<Node>> = BTreeMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        if n == goal {
            break;
        }
        for &m in adj.get(&n).map_or(&[][..], |l| l.as_slice()) {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(m) {
                e.insert(Some(n));
                queue.push_back(m);
            }
        }
    }
    prev.get(&goal)?;
    let mut nodes = vec![goal];
    let mut cur = goal;
    while let Some(&Some(p)) = prev.get(&cur) {
        nodes.push(p);
        cur = p;
    }
    nodes.reverse();
    Some(to_steps(&nodes))
}

/// Chains through at most `max_hubs` distinct elements, in depth-first
/// order, stopping at `limit` chains or after a fixed number of search steps.
fn all_chains(
    state: &ReductionState,
    skip: usize,
    alpha: Vertex,
    beta: Vertex,
    max_hubs: usize,
    limit: usize,
) -> Vec<Vec<Step>> {
    let adj = incidence(state, skip, &BTreeSet::new());
    let mut out = Vec::new();
    let mut path = vec![Node::Vert(alpha)];
    let mut on: BTreeSet<Node> = BTreeSet::from([Node::Vert(alpha)]);
    let mut stack: Vec<usize> = vec![0];
    let mut budget = SEARCH_BUDGET;
    while let Some(&i) = stack.last() {
        budget = match budget.checked_sub(1) {
            Some(b) => b,
            None => break,
        };
        let n = *path.last().unwrap();
        let next = adj.get(&n).and_then(|l| l.get(i)).copied();
        let Some(m) = next else {
            stack.pop();
            on.remove(&n);
            path.pop();
            continue;
        };
        *stack.last_mut().unwrap() += 1;
        if on.contains(&m) {
            continue;
        }
        if m == Node::Vert(beta) {
            let mut full = path.clone();
            full.push(m);
            out.push(to_steps(&full));
            if out.len() >= limit {
                break;
            }
            continue;
        }
        let hubs = path.len() / 2 + usize::from(!matches!(m, Node::Vert(_)));
        if hubs > max_hubs {
            continue;
        }
        // a vertex node only helps when it leads on to another element
        path.push(m);
        on.insert(m);
        stack.push(0);
    }
    out
}

/// Up to `limit` distinct chains found breadth-first over sets of banned
/// elements. The extended search adds other short chains, shortest first.
fn candidate_chains(
    state: &ReductionState,
    skip: usize,
    alpha: Vertex,
    beta: Vertex,
    limit: usize,
    extended: bool,
) -> Vec<Vec<Step>> {
    let mut out: Vec<Vec<Step>> = Vec::new();
    let mut seen: BTreeSet<Vec<Step>> = BTreeSet::new();
    let mut tried: BTreeSet<BTreeSet<Node>> = BTreeSet::new();
    let mut queue = VecDeque::from([BTreeSet::new()]);
    while let Some(ban) = queue.pop_front() {
        if out.len() >= limit {
            break;
        }
        if !tried.insert(ban.clone()) {
            continue;
        }
        let Some(steps) = chain(state, skip, alpha, beta, &ban) else {
            continue;
        };
        for st in &steps {
            let mut next = ban.clone();
            next.insert(if st.segment {
                Node::Seg(st.hub)
            } else {
                Node::Cycle(st.hub)
            });
            queue.push_back(next);
        }
        if seen.insert(steps.clone()) {
            out.push(steps);
        }
    }
    if extended && out.len() < limit {
        let mut more = all_chains(state, skip, alpha, beta, MAX_HUBS, EXTRA_CHAINS);
        more.sort_by_key(|c| c.len());
        for steps in more {
            if out.len() >= limit {
                break;
            }
            if seen.insert(steps.clone()) {
                out.push(steps);
            }
        }
    }
    out
}

/// Two trails from `α` to `β`, built from one chain.
struct TrailPair {
    t1: Seq,
    t2: Seq,
    /// Leftover pieces of partially used segments.
    tails: Vec<Seq>,
    consumed_cycles: Vec<usize>,
    consumed_segments: Vec<usize>,
    /// Edge multiset of everything the trails were built from.
    consumed: CoverageMap,
}

/// Chooses, per step, which arc goes to the first trail. An edge carried by
/// two cycle steps must land in different trails, which fixes the parity of
/// their two choices; `None` when the parities conflict.
fn orient(steps: &[Step], arcs: &[(Seq, Seq)]) -> Option<Vec<bool>> {
    let n = steps.len();
    // parity union-find: flip[i] = flip[root] ^ rel[i]
    let mut parent: Vec<usize> = (0..n).collect();
    let mut rel = vec![false; n];
    fn root(parent: &mut [usize], rel: &mut [bool], i: usize) -> (usize, bool) {
        let mut r = i;
        let mut acc = false;
        while parent[r] != r {
            acc ^= rel[r];
            r = parent[r];
        }
        parent[i] = r;
        rel[i] = acc;
        (r, acc)
    }
    let covs: Vec<(CoverageMap, CoverageMap)> = arcs.iter().map(|(a, b)| (cov(&[a]), cov(&[b]))).collect();
    for i in 0..n {
        if steps[i].segment {
            continue;
        }
        for j in i + 1..n {
            if steps[j].segment {
                continue;
            }
            let (ai, bi) = &covs[i];
            let (aj, _) = &covs[j];
            for e in ai.support().union(&bi.support()) {
                let (in_aj, in_bj) = (aj.get(*e) > 0, covs[j].1.get(*e) > 0);
                if !in_aj && !in_bj {
                    continue;
                }
                let si = ai.get(*e) == 0;
                let sj = !in_aj;
                // trail of e from step k is side ^ flip[k]; the two must differ
                let want = si ^ sj ^ true;
                let (ri, pi) = root(&mut parent, &mut rel, i);
                let (rj, pj) = root(&mut parent, &mut rel, j);
                if ri == rj {
                    if pi ^ pj != want {
                        return None;
                    }
                } else {
                    parent[rj] = ri;
                    rel[rj] = pi ^ pj ^ want;
                }
            }
        }
    }
    Some((0..n).map(|i| root(&mut parent, &mut rel, i).1).collect())
}

fn build_pair(state: &ReductionState, steps: &[Step], alpha: Vertex, rec: &mut Recorder) -> Option<TrailPair> {
    let mut arcs: Vec<(Seq, Seq)> = Vec::new();
    let mut tails = Vec::new();
    let mut consumed = CoverageMap::new();
    for st in steps {
        if st.segment {
            let q = &state.bf[st.hub];
            let i = q.iter().position(|&v| v == st.x).unwrap();
            let j = q.iter().position(|&v| v == st.y).unwrap();
            let (lo, hi) = (i.min(j), i.max(j));
            let mut sub = q[lo..=hi].to_vec();
            if i > j {
                sub.reverse();
            }
            if lo > 0 {
                tails.push(q[..=lo].to_vec());
            }
            if hi + 1 < q.len() {
                tails.push(q[hi..].to_vec());
            }
            consumed.add_seq(&sub, 2);
            arcs.push((sub.clone(), sub));
        } else {
            let c = &state.pool[st.hub];
            let (a1, a2) = cycle_arcs(c, st.x, st.y);
            let split = Surgery {
                l1: a1.clone(),
                l2: a2.clone(),
                delta: Vec::new(),
            };
            rec.audits.surgeries += 1;
            if split.coverage() != cov(&[c]) {
                rec.audits
                    .surgery_violations
                    .push(format!("arc split of {c:?} at {} {}", st.x, st.y));
            }
            consumed.add_seq(c, 1);
            arcs.push((a1, a2));
        }
    }
    let flip = orient(steps, &arcs)?;
    let mut t1 = vec![alpha];
    let mut t2 = vec![alpha];
    for (k, (a, b)) in arcs.iter().enumerate() {
        let (p, q) = if flip[k] { (b, a) } else { (a, b) };
        t1.extend_from_slice(&p[1..]);
        t2.extend_from_slice(&q[1..]);
    }
    if !is_trail_seq(&t1) || !is_trail_seq(&t2) {
        return None;
    }
    let mut consumed_cycles: Vec<usize> = steps.iter().filter(|s| !s.segment).map(|s| s.hub).collect();
    let mut consumed_segments: Vec<usize> = steps.iter().filter(|s| s.segment).map(|s| s.hub).collect();
    consumed_cycles.sort_unstable();
    consumed_segments.sort_unstable();
    Some(TrailPair {
        t1,
        t2,
        tails,
        consumed_cycles,
        consumed_segments,
        consumed,
    })
}

/// Replacement paths for one segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alternative {
    pub p3: Seq,
    pub p4: Seq,
    pub consumed_cycles: Vec<usize>,
    pub consumed_segments: Vec<usize>,
    /// Loops peeled off the two trails.
    pub emitted: Vec<Seq>,
    pub tails: Vec<Seq>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElimFailure {
    /// No route from α to β avoiding the segment.
    NoPath { segment: Seq },
    /// Routes exist but none yields two trails while shrinking `BF`.
    NoProgress { segment: Seq, chains: usize },
}

const CHAIN_LIMIT: usize = 60;
const EXTENDED_CHAIN_LIMIT: usize = 400;
const MAX_HUBS: usize = 4;
const EXTRA_CHAINS: usize = 2_000;
const SEARCH_BUDGET: usize = 200_000;

/// Finds `p3`, `p4` from `α` to `β` avoiding the path of segment `si`.
pub fn alternative_paths(state: &ReductionState, si: usize, rec: &mut Recorder) -> Result<Alternative, ElimFailure> {
    alternative_paths_with(state, si, false, rec)
}

/// As [`alternative_paths`]; `extended` widens the set of chains tried.
pub fn alternative_paths_with(
    state: &ReductionState,
    si: usize,
    extended: bool,
    rec: &mut Recorder,
) -> Result<Alternative, ElimFailure> {
    let s = &state.bf[si];
    let (alpha, beta) = (s[0], *s.last().unwrap());
    let limit = if extended { EXTENDED_CHAIN_LIMIT } else { CHAIN_LIMIT };
    let chains = candidate_chains(state, si, alpha, beta, limit, extended);
    if chains.is_empty() {
        return Err(ElimFailure::NoPath { segment: s.clone() });
    }
    for steps in &chains {
        let Some(pair) = build_pair(state, steps, alpha, rec) else {
            continue;
        };
        if pair.tails.len() > pair.consumed_segments.len() {
            continue;
        }
        let (p3, mut emitted) = straighten(&pair.t1);
        let (p4, more) = straighten(&pair.t2);
        emitted.extend(more);
        let alt = Alternative {
            p3,
            p4,
            consumed_cycles: pair.consumed_cycles,
            consumed_segments: pair.consumed_segments,
            emitted,
            tails: pair.tails,
        };
        audit_alternative(s, &alt, &pair.consumed, rec);
        return Ok(alt);
    }
    if extended {
        let mut tried: BTreeSet<Vec<usize>> = BTreeSet::new();
        for steps in &chains {
            if steps.iter().any(|st| st.segment) {
                continue;
            }
            let mut hubs: Vec<usize> = steps.iter().map(|st| st.hub).collect();
            hubs.sort_unstable();
            if !tried.insert(hubs.clone()) {
                continue;
            }
            let mut m = CoverageMap::new();
            for &i in &hubs {
                m.add_seq(&state.pool[i], 1);
            }
            let Some((t1, t2, rest)) = split_trails(&m, alpha, beta) else {
                continue;
            };
            let (p3, mut emitted) = straighten(&t1);
            let (p4, more) = straighten(&t2);
            emitted.extend(more);
            emitted.extend(even_cycles(&rest));
            let alt = Alternative {
                p3,
                p4,
                consumed_cycles: hubs,
                consumed_segments: Vec::new(),
                emitted,
                tails: Vec::new(),
            };
            audit_alternative(s, &alt, &m, rec);
            return Ok(alt);
        }
    }
    Err(ElimFailure::NoProgress {
        segment: s.clone(),
        chains: chains.len(),
    })
}

/// Multiset law for one alternative, and that it avoids the segment's path.
fn audit_alternative(s: &[Vertex], alt: &Alternative, consumed: &CoverageMap, rec: &mut Recorder) {
    rec.audits.surgeries += 1;
    let mut got = cov(&[&alt.p3, &alt.p4]);
    for e in &alt.emitted {
        got.add_seq(e, 1);
    }
    if got != *consumed {
        rec.audits
            .surgery_violations
            .push(format!("alternative paths for {s:?} lose edges"));
    }
    let path: BTreeSet<Edge> = s.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    if got.support().intersection(&path).next().is_some() {
        rec.audits
            .surgery_violations
            .push(format!("alternative paths for {s:?} reuse its edges"));
    }
}

/// Searches the edge multiset `m` (multiplicities 1 or 2) for two paths from
/// `α` to `β` that together use every doubled edge, so that what remains is
/// a simple even subgraph. Returns the paths and the remaining edges.
fn split_trails(m: &CoverageMap, alpha: Vertex, beta: Vertex) -> Option<(Seq, Seq, BTreeSet<Edge>)> {
    let mut budget = SEARCH_BUDGET;
    let full: BTreeMap<Edge, u32> = m.support().into_iter().map(|e| (e, m.get(e))).collect();
    let mut found = None;
    simple_paths(&full, alpha, beta, &mut budget, &mut |p3| {
        let mut rest = full.clone();
        take(&mut rest, p3);
        let need: BTreeSet<Edge> = rest.iter().filter(|(_, &k)| k == 2).map(|(&e, _)| e).collect();
        let mut inner = SEARCH_BUDGET / 10;
        let mut hit = None;
        simple_paths(&rest, alpha, beta, &mut inner, &mut |p4| {
            let used: BTreeSet<Edge> = p4.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
            if need.is_subset(&used) {
                hit = Some(p4.to_vec());
                return true;
            }
            false
        });
        let Some(p4) = hit else {
            return false;
        };
        take(&mut rest, &p4);
        found = Some((p3.to_vec(), p4, rest.into_keys().collect()));
        true
    });
    found
}

fn take(m: &mut BTreeMap<Edge, u32>, path: &[Vertex]) {
    for w in path.windows(2) {
        let e = Edge::new(w[0], w[1]);
        let k = m.get_mut(&e).expect("path inside the multiset");
        *k -= 1;
        if *k == 0 {
            m.remove(&e);
        }
    }
}

/// Depth-first enumeration of simple paths from `a` to `b` over the edges of
/// `m`, until `visit` returns true or the step budget runs out.
fn simple_paths(
    m: &BTreeMap<Edge, u32>,
    a: Vertex,
    b: Vertex,
    budget: &mut usize,
    visit: &mut dyn FnMut(&[Vertex]) -> bool,
) -> bool {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in m.keys() {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    let mut path = vec![a];
    let mut on: BTreeSet<Vertex> = BTreeSet::from([a]);
    let mut stack = vec![0usize];
    while let Some(&i) = stack.last() {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let v = *path.last().unwrap();
        let Some(&w) = adj.get(&v).and_then(|l| l.get(i)) else {
            stack.pop();
            on.remove(&v);
            path.pop();
            continue;
        };
        *stack.last_mut().unwrap() += 1;
        if on.contains(&w) {
            continue;
        }
        if w == b {
            path.push(w);
            if visit(&path) {
                return true;
            }
            path.pop();
            continue;
        }
        path.push(w);
        on.insert(w);
        stack.push(0);
    }
    false
}

/// Removes segment `si`: the circuits `P + p3` and `P + p4` are peeled into
/// cycles, consumed elements leave, partially used segments leave their tails.
pub fn eliminate(state: &ReductionState, si: usize, rec: &mut Recorder) -> Result<ReductionState, ElimFailure> {
    eliminate_with(state, si, false, rec)
}

pub fn eliminate_with(
    state: &ReductionState,
    si: usize,
    extended: bool,
    rec: &mut Recorder,
) -> Result<ReductionState, ElimFailure> {
    let alt = alternative_paths_with(state, si, extended, rec)?;
    let s = &state.bf[si];
    let mut new_cycles = Vec::new();
    for p in [&alt.p3, &alt.p4] {
        let mut c = s.clone();
        c.extend(p.iter().rev().skip(1));
        new_cycles.extend(peel(&c).0);
    }
    new_cycles.extend(alt.emitted.iter().cloned());
    let used_cycles: BTreeSet<usize> = alt.consumed_cycles.iter().copied().collect();
    let mut used_segments: BTreeSet<usize> = alt.consumed_segments.iter().copied().collect();
    used_segments.insert(si);
    let mut pool: Vec<Seq> = state
        .pool
        .iter()
        .enumerate()
        .filter(|(i, _)| !used_cycles.contains(i))
        .map(|(_, c)| c.clone())
        .collect();
    pool.extend(new_cycles);
    let mut bf: Vec<Seq> = state
        .bf
        .iter()
        .enumerate()
        .filter(|(j, _)| !used_segments.contains(j))
        .map(|(_, q)| q.clone())
        .collect();
    bf.extend(alt.tails);
    Ok(ReductionState { pool, bf })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NonTermination {
    IterationCap {
        cap: usize,
    },
    /// No type-A segment left while `BF` is non-empty.
    NoTypeA,
    /// Every type-A segment failed to eliminate.
    Stuck {
        failures: Vec<ElimFailure>,
    },
    /// An exact audit failed.
    InvariantViolation {
        audits: Vec<String>,
    },
}

impl fmt::Display for NonTermination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonTermination::IterationCap { cap } => write!(f, "iteration cap {cap} reached"),
            NonTermination::NoTypeA => write!(f, "no type-A segment in a non-empty BF"),
            NonTermination::Stuck { failures } => {
                write!(f, "no type-A segment could be eliminated ({} tried)", failures.len())
            }
            NonTermination::InvariantViolation { audits } => {
                write!(f, "audit failure: {}", audits.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reduction {
    Done {
        cycles: Vec<Seq>,
        iterations: usize,
    },
    Stopped {
        why: NonTermination,
        iterations: usize,
        snapshot: Box<ReductionState>,
    },
}

/// Type-A segments in canonical order of their walks.
fn type_a_order(bf: &[Seq]) -> Vec<usize> {
    let mut a: Vec<usize> = (0..bf.len())
        .filter(|&i| classify_bf_segment(i, bf) == SegmentType::A)
        .collect();
    a.sort_by(|&i, &j| canonical_cmp(&segment_walk(&canonical(&bf[i])), &segment_walk(&canonical(&bf[j]))));
    a
}

/// Eliminates segments until `BF` is empty. Each round tries the type-A
/// segments in canonical order and keeps the first successful elimination;
/// only when all of them fail is the wider chain search used.
pub fn run_reduction(g: &Graph, start: ReductionState, max_iterations: usize, rec: &mut Recorder) -> Reduction {
    let mut state = start;
    let mut iterations = 0;
    while !state.bf.is_empty() {
        if iterations >= max_iterations {
            return Reduction::Stopped {
                why: NonTermination::IterationCap { cap: max_iterations },
                iterations,
                snapshot: Box::new(state),
            };
        }
        let order = type_a_order(&state.bf);
        if order.is_empty() {
            return Reduction::Stopped {
                why: NonTermination::NoTypeA,
                iterations,
                snapshot: Box::new(state),
            };
        }
        let mut failures = Vec::new();
        let mut next = None;
        'search: for extended in [false, true] {
            failures.clear();
            for &si in &order {
                match eliminate_with(&state, si, extended, rec) {
                    Ok(s) => {
                        next = Some(s);
                        break 'search;
                    }
                    Err(f) => failures.push(f),
                }
            }
        }
        let Some(next) = next else {
            return Reduction::Stopped {
                why: NonTermination::Stuck { failures },
                iterations,
                snapshot: Box::new(state),
            };
        };
        iterations += 1;
        if next.bf.len() >= state.bf.len() {
            rec.audits
                .surgery_violations
                .push(format!("iteration {iterations}: BF did not shrink"));
        }
        state = next;
        let label = format!("reduce_{iterations}");
        let bf_walks: Vec<Seq> = state.bf.iter().map(|p| segment_walk(p)).collect();
        rec.dump(g, &label, &[("pool", &state.pool, 1), ("BF", &bf_walks, 1)]);
        if !rec.audits.surgery_violations.is_empty() || !rec.audits.conservation_ok() {
            return Reduction::Stopped {
                why: NonTermination::InvariantViolation {
                    audits: rec.audits.failures().iter().map(|s| s.to_string()).collect(),
                },
                iterations,
                snapshot: Box::new(state),
            };
        }
    }
    Reduction::Done {
        cycles: canonical_sorted(&state.pool),
        iterations,
    }
}
