//! Staged decomposition of the projected Eulerian trail.
//!
//! The lifted cycles split into auxiliary-free cycles `L` and closed walks
//! `M`. Each `m` splits into once-covered cycles `Q1` and twice-covered edges
//! `Q2`. Cycles merge into circuits `R` (shared edges become segments `S_T`),
//! segments chain into maximal segments `S` and double cycles `D`, segments
//! splice into forks `F`, and each fork gives up cycles `H1`, leaving branches
//! `B`. A branch splits into cycles `H2` and branch-fork segments `BF`.
//!
//! Segments are stored as their underlying paths; the segment walk is the path
//! followed by its reverse. Double cycles are stored once and count twice.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::audit::Recorder;
use crate::graph::{edge_graph, find_bridges, Edge, Graph, Vertex};
use crate::lift::{
    aux_count, build_lift, euler_circuits, eulerian_trail, even_cycles, peel, project_seq, LiftError, LiftedGraph,
    LiftedVertex,
};
use crate::walk::{closed_roles, seq_coverage, vertex_counts, CoverageMap};

pub type Seq = Vec<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("lifted cycle {index} passes {count} auxiliary edges")]
    OddAux { index: usize, count: usize },
    #[error("closed walk covers edge {edge} {count} times")]
    Multiplicity { edge: Edge, count: u32 },
    #[error("expected a fork, found a double cycle")]
    DoubleCycleFork,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Raw,
    Forked,
    Branched,
    Classed,
    Done,
}

/// A closed walk whose once-covered edges form cycles and whose
/// twice-covered edges are its cut edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub walk: Seq,
    pub once_edges: BTreeSet<Edge>,
    pub twice_edges: BTreeSet<Edge>,
}

impl Branch {
    pub fn coverage(&self) -> CoverageMap {
        let mut c = CoverageMap::new();
        for &e in &self.once_edges {
            c.add_edge(e, 1);
        }
        for &e in &self.twice_edges {
            c.add_edge(e, 2);
        }
        c
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub stage: Stage,
    /// Auxiliary-free lifted cycles and the remaining lifted cycles.
    pub l_lifted: Vec<Vec<LiftedVertex>>,
    pub m_lifted: Vec<Vec<LiftedVertex>>,
    pub l: Vec<Seq>,
    pub m: Vec<Seq>,
    pub q1: Vec<Seq>,
    /// Irreducible segments per `m`, as two-vertex paths.
    pub q2: Vec<Vec<Seq>>,
    pub r: Vec<Seq>,
    pub s_t: Vec<Seq>,
    pub s_c: Vec<Seq>,
    pub s: Vec<Seq>,
    pub d_c: Vec<Seq>,
    pub d_t: Vec<Seq>,
    pub f: Vec<Seq>,
    pub h1: Vec<Seq>,
    pub b: Vec<Branch>,
    pub h2: Vec<Seq>,
    pub bf: Vec<Seq>,
}

impl Decomposition {
    fn empty() -> Decomposition {
        Decomposition {
            stage: Stage::Raw,
            l_lifted: Vec::new(),
            m_lifted: Vec::new(),
            l: Vec::new(),
            m: Vec::new(),
            q1: Vec::new(),
            q2: Vec::new(),
            r: Vec::new(),
            s_t: Vec::new(),
            s_c: Vec::new(),
            s: Vec::new(),
            d_c: Vec::new(),
            d_t: Vec::new(),
            f: Vec::new(),
            h1: Vec::new(),
            b: Vec::new(),
            h2: Vec::new(),
            bf: Vec::new(),
        }
    }

    pub fn d(&self) -> Vec<Seq> {
        self.d_c.iter().chain(&self.d_t).cloned().collect()
    }

    /// Cycles of `R`, peeled lazily.
    pub fn r_cycles(&self) -> Vec<Seq> {
        self.r.iter().flat_map(|c| peel(c).0).collect()
    }

    /// The cycle pool `L + R + 2D + H1 + H2` handed to the reduction.
    pub fn pool(&self) -> Vec<Seq> {
        let mut out = self.l.clone();
        out.extend(self.r_cycles());
        for d in self.d() {
            out.push(d.clone());
            out.push(d);
        }
        out.extend(self.h1.iter().cloned());
        out.extend(self.h2.iter().cloned());
        out
    }
}

/// The closed segment walk of a path: out and back.
pub fn segment_walk(path: &[Vertex]) -> Seq {
    let mut w = path.to_vec();
    w.extend(path.iter().rev().skip(1));
    w
}

fn cov_of(seqs: &[Seq], times: u32) -> CoverageMap {
    let mut c = CoverageMap::new();
    for s in seqs {
        c.add_seq(s, times);
    }
    c
}

type LiftedSplit = (Vec<Vec<LiftedVertex>>, Vec<Vec<LiftedVertex>>);

/// Lifted cycles without auxiliary edges, and the rest. Every lifted cycle
/// must pass an even number of auxiliary edges.
pub fn split_pure_cycles(cycles: &[Vec<LiftedVertex>]) -> Result<LiftedSplit, DecomposeError> {
    let (mut pure, mut rest) = (Vec::new(), Vec::new());
    for (index, c) in cycles.iter().enumerate() {
        match aux_count(c) {
            0 => pure.push(c.clone()),
            k if k % 2 == 0 => rest.push(c.clone()),
            count => return Err(DecomposeError::OddAux { index, count }),
        }
    }
    Ok((pure, rest))
}

/// Once-covered edges of a closed walk as cycles, twice-covered edges as
/// irreducible segments `[a, b]`.
pub fn split_once_twice(m: &[Vertex]) -> Result<(Vec<Seq>, Vec<Seq>), DecomposeError> {
    let cov = seq_coverage(m);
    if let Some((&edge, &count)) = cov.counts.iter().find(|(_, &k)| k > 2) {
        return Err(DecomposeError::Multiplicity { edge, count });
    }
    let q1 = even_cycles(&cov.edges_with(1));
    let q2 = cov.edges_with(2).into_iter().map(|e| vec![e.0, e.1]).collect();
    Ok((q1, q2))
}

fn edge_components(es: &BTreeSet<Edge>) -> Vec<BTreeSet<Edge>> {
    let g = edge_graph(es);
    let comps = crate::graph::components(&g);
    let mut owner = vec![usize::MAX; g.id_bound()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    let mut out = vec![BTreeSet::new(); comps.len()];
    for &e in es {
        out[owner[e.0]].insert(e);
    }
    out
}

fn vertex_set(es: &BTreeSet<Edge>) -> BTreeSet<Vertex> {
    es.iter().flat_map(|e| [e.0, e.1]).collect()
}

/// Merges cycles sharing a vertex into circuits. Edges shared by the two
/// merged elements leave as irreducible segments.
pub fn merge_circuits(q1: &[Seq]) -> (Vec<Seq>, Vec<Seq>) {
    let mut elems: Vec<BTreeSet<Edge>> = q1.iter().map(|q| seq_coverage(q).support()).collect();
    let mut s_t = Vec::new();
    'outer: loop {
        elems.sort();
        let verts: Vec<BTreeSet<Vertex>> = elems.iter().map(vertex_set).collect();
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                if verts[i].is_disjoint(&verts[j]) {
                    continue;
                }
                for e in elems[i].intersection(&elems[j]) {
                    s_t.push(vec![e.0, e.1]);
                }
                let sd: BTreeSet<Edge> = elems[i].symmetric_difference(&elems[j]).copied().collect();
                let mut rest: Vec<BTreeSet<Edge>> = elems
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, e)| e.clone())
                    .collect();
                if !sd.is_empty() {
                    rest.extend(edge_components(&sd));
                }
                elems = rest;
                continue 'outer;
            }
        }
        break;
    }
    let r = elems
        .iter()
        .flat_map(|es| {
            let list: Vec<(Edge, u32)> = es.iter().map(|&e| (e, 1)).collect();
            euler_circuits(&list)
        })
        .collect();
    (r, s_t)
}

/// Chains paths at shared ending vertices. Each concatenation is peeled: the
/// closed loops come back as cycles, the open remainder stays a path.
pub fn chain_paths(paths: &[Seq]) -> (Vec<Seq>, Vec<Seq>) {
    let mut paths: Vec<Seq> = paths.to_vec();
    let mut loops = Vec::new();
    loop {
        let mut ends: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (i, p) in paths.iter().enumerate() {
            ends.entry(p[0]).or_default().push(i);
            ends.entry(*p.last().unwrap()).or_default().push(i);
        }
        let Some((&v, ids)) = ends.iter().find(|(_, ids)| ids.len() >= 2) else {
            break;
        };
        let (i, j) = (ids[0], ids[1]);
        let mut p = paths[i].clone();
        let mut q = paths[j].clone();
        if *p.last().unwrap() != v {
            p.reverse();
        }
        if q[0] != v {
            q.reverse();
        }
        p.extend_from_slice(&q[1..]);
        let (cycles, residue) = peel(&p);
        loops.extend(cycles);
        paths = paths
            .into_iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, x)| x)
            .collect();
        if residue.len() >= 2 {
            paths.push(residue);
        }
    }
    (paths, loops)
}

/// Result of chaining the `Q2` groups and `S_T`.
pub struct MergedSegments {
    pub s_c: Vec<Seq>,
    pub s: Vec<Seq>,
    pub d_c: Vec<Seq>,
    pub d_t: Vec<Seq>,
}

/// Chains segments within each group, then across groups, then with `pool`.
pub fn merge_segments(groups: &[Vec<Seq>], pool: &[Seq]) -> MergedSegments {
    let mut s_c = Vec::new();
    let mut d_c = Vec::new();
    for g in groups {
        let (p, d) = chain_paths(g);
        s_c.extend(p);
        d_c.extend(d);
    }
    let (across, d) = chain_paths(&s_c);
    d_c.extend(d);
    let mut all = across;
    all.extend(pool.iter().cloned());
    let (s, d_t) = chain_paths(&all);
    MergedSegments { s_c, s, d_c, d_t }
}

/// Segment ends at even-degree vertices.
pub fn check_segment_endings(s: &[Seq], g: &Graph) -> Vec<(Seq, Vertex)> {
    let mut bad = Vec::new();
    for p in s {
        for v in [p[0], *p.last().unwrap()] {
            if g.degree(v).is_multiple_of(2) {
                bad.push((p.clone(), v));
            }
        }
    }
    bad
}

/// Splices forks together while an ending vertex of one is passed at least
/// twice by another. The first fork is rotated to start at that vertex and
/// inserted at the first visit in the second.
pub fn build_forks(s: &[Seq]) -> Vec<Seq> {
    let mut forks: Vec<Seq> = s.iter().map(|p| segment_walk(p)).collect();
    'outer: loop {
        for i in 0..forks.len() {
            let ends: Vec<Vertex> = closed_roles(&forks[i]).ending.into_iter().collect();
            for v in ends {
                for j in 0..forks.len() {
                    if j == i {
                        continue;
                    }
                    let body_j = &forks[j][..forks[j].len() - 1];
                    if vertex_counts(body_j).get(&v).copied().unwrap_or(0) < 2 {
                        continue;
                    }
                    let body_i = &forks[i][..forks[i].len() - 1];
                    let k = body_i.iter().position(|&x| x == v).unwrap();
                    let mut rot: Seq = body_i[k..].iter().chain(&body_i[..k]).copied().collect();
                    rot.push(v);
                    let fj = &forks[j];
                    let pj = fj.iter().position(|&x| x == v).unwrap();
                    let mut merged: Seq = fj[..pj].to_vec();
                    merged.extend(rot);
                    merged.extend_from_slice(&fj[pj + 1..]);
                    forks = forks
                        .into_iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i && t != j)
                        .map(|(_, x)| x)
                        .collect();
                    forks.push(merged);
                    continue 'outer;
                }
            }
        }
        break;
    }
    forks
}

/// Bifurcation vertices whose degree in the fork's edge set is not 3.
pub fn bifurcation_degrees(f: &[Vertex]) -> Vec<(Vertex, usize)> {
    let g = edge_graph(&seq_coverage(f).support());
    closed_roles(f)
        .bifurcation
        .into_iter()
        .filter(|&v| g.degree(v) != 3)
        .map(|v| (v, g.degree(v)))
        .collect()
}

/// T-join of a connected edge set from the BFS tree rooted at `root`.
fn tree_tjoin(es: &BTreeSet<Edge>, t: &BTreeSet<Vertex>, root: Vertex) -> Option<BTreeSet<Edge>> {
    let g = edge_graph(es);
    if !g.contains_vertex(root) {
        return None;
    }
    let mut parent = vec![usize::MAX; g.id_bound()];
    let mut seen = vec![false; g.id_bound()];
    let mut order = vec![root];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &w in g.neighbors(x) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = x;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    if order.len() != g.vertex_count() {
        return None;
    }
    let mut odd: Vec<bool> = (0..g.id_bound()).map(|v| t.contains(&v)).collect();
    let mut join = BTreeSet::new();
    for &v in order.iter().rev() {
        if v != root && odd[v] {
            join.insert(Edge::new(v, parent[v]));
            odd[parent[v]] ^= true;
        }
    }
    (!odd[root]).then_some(join)
}

/// T-join inside every component of `es`, rooted at `root` where possible.
fn forest_tjoin(es: &BTreeSet<Edge>, t: &BTreeSet<Vertex>, root: Vertex) -> Option<BTreeSet<Edge>> {
    let covered = vertex_set(es);
    if !t.is_subset(&covered) {
        return None;
    }
    let mut join = BTreeSet::new();
    for comp in edge_components(es) {
        let vs = vertex_set(&comp);
        let tc: BTreeSet<Vertex> = t.intersection(&vs).copied().collect();
        if tc.is_empty() {
            continue;
        }
        let r = if vs.contains(&root) {
            root
        } else {
            *vs.iter().next().unwrap()
        };
        join.extend(tree_tjoin(&comp, &tc, r)?);
    }
    Some(join)
}

/// Two disjoint T-joins `J`, `K` of a connected edge set, where `T` is its
/// odd-degree vertices. `J` roots are tried in vertex order, then `K` roots.
fn disjoint_tjoins(c: &BTreeSet<Edge>) -> Option<(BTreeSet<Edge>, BTreeSet<Edge>)> {
    let g = edge_graph(c);
    let t: BTreeSet<Vertex> = g.vertices().filter(|&v| g.degree(v) % 2 == 1).collect();
    let vs: Vec<Vertex> = g.vertices().collect();
    for &r1 in &vs {
        let Some(j) = tree_tjoin(c, &t, r1) else {
            continue;
        };
        let rest: BTreeSet<Edge> = c.difference(&j).copied().collect();
        for &r2 in &vs {
            if let Some(k) = forest_tjoin(&rest, &t, r2) {
                return Some((j, k));
            }
        }
    }
    None
}

/// Cycles of a doubly covered 2-edge-connected block, each edge used at most
/// twice, after which every edge left uncovered is a cut edge of the edges
/// not yet used twice.
///
/// Starts from the even subgraph `C - J` for a T-join `J`, then repeatedly
/// closes the first uncovered edge that is not yet a cut edge with a
/// shortest path through the remaining capacity.
pub fn greedy_block_cycles(c: &BTreeSet<Edge>) -> Vec<Seq> {
    let g = edge_graph(c);
    let t: BTreeSet<Vertex> = g.vertices().filter(|&v| g.degree(v) % 2 == 1).collect();
    let root = g.vertices().next().expect("non-empty block");
    let j = tree_tjoin(c, &t, root).expect("connected block has a T-join");
    let z: BTreeSet<Edge> = c.difference(&j).copied().collect();
    let mut cycles = even_cycles(&z);
    let mut used: BTreeMap<Edge, u32> = c.iter().map(|&e| (e, u32::from(z.contains(&e)))).collect();
    loop {
        let support: BTreeSet<Edge> = used.iter().filter(|(_, &u)| u < 2).map(|(&e, _)| e).collect();
        let cut = find_bridges(&edge_graph(&support));
        let Some(e) = used.iter().find(|(e, &u)| u == 0 && !cut.contains(e)).map(|(&e, _)| e) else {
            break;
        };
        let mut rest = support;
        rest.remove(&e);
        let mut cyc = shortest_path(&rest, e.0, e.1).expect("non-cut edge lies on a cycle");
        cyc.push(e.0);
        for w in cyc.windows(2) {
            *used.get_mut(&Edge::new(w[0], w[1])).unwrap() += 1;
        }
        cycles.push(cyc);
    }
    cycles
}

fn shortest_path(es: &BTreeSet<Edge>, from: Vertex, to: Vertex) -> Option<Seq> {
    let g = edge_graph(es);
    if !g.contains_vertex(from) || !g.contains_vertex(to) {
        return None;
    }
    let mut parent = vec![usize::MAX; g.id_bound()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut v = to;
            while v != from {
                v = parent[v];
                path.push(v);
            }
            path.reverse();
            return Some(path);
        }
        for &w in g.neighbors(x) {
            if parent[w] == usize::MAX {
                parent[w] = x;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Cycles for `H1` from one fork, and the branches left over.
///
/// Every 2-edge-connected block `C` of the fork's edge set is covered twice
/// by the fork. An even block contributes its cycle decomposition once. For
/// a block with odd-degree set `T`, pick disjoint T-joins `J`, `K` and take
/// the cycles of `C - J` and of `J + K`: this covers `K` twice and the rest
/// of `C` once, so the remaining once-covered edges `C - K` are even and the
/// remaining twice-covered edges are exactly the fork's cut edges. The
/// leftover is one branch per connected component.
///
/// Disjoint T-joins exist exactly when the block has a nowhere-zero 4-flow,
/// so a block without one falls back to [`greedy_block_cycles`]. The count of
/// such blocks is returned alongside.
pub fn extract_fork_cycles(f: &[Vertex]) -> Result<(Vec<Seq>, Vec<Branch>, usize), DecomposeError> {
    let cov = seq_coverage(f);
    let es = cov.support();
    if f.len() >= 4 && crate::walk::classify_seq(f) == crate::walk::WalkKind::DoubleCycle {
        return Err(DecomposeError::DoubleCycleFork);
    }
    let bridges = find_bridges(&edge_graph(&es));
    let blocks: BTreeSet<Edge> = es.difference(&bridges).copied().collect();
    let mut h1 = Vec::new();
    let mut h1_cov = CoverageMap::new();
    let mut greedy = 0;
    for c in edge_components(&blocks) {
        let g = edge_graph(&c);
        if g.vertices().all(|v| g.degree(v) % 2 == 0) {
            let cs = even_cycles(&c);
            h1.extend(cs);
            for &e in &c {
                h1_cov.add_edge(e, 1);
            }
            continue;
        }
        let Some((j, k)) = disjoint_tjoins(&c) else {
            greedy += 1;
            for cyc in greedy_block_cycles(&c) {
                h1_cov.add_seq(&cyc, 1);
                h1.push(cyc);
            }
            continue;
        };
        let z1: BTreeSet<Edge> = c.difference(&j).copied().collect();
        let z2: BTreeSet<Edge> = j.union(&k).copied().collect();
        for z in [&z1, &z2] {
            h1.extend(even_cycles(z));
            for &e in z {
                h1_cov.add_edge(e, 1);
            }
        }
    }
    let mut residual = BTreeMap::new();
    for &e in &es {
        let left = 2 - h1_cov.get(e).min(2);
        if left > 0 {
            residual.insert(e, left);
        }
    }
    let support: BTreeSet<Edge> = residual.keys().copied().collect();
    let mut branches = Vec::new();
    for comp in edge_components(&support) {
        let list: Vec<(Edge, u32)> = comp.iter().map(|e| (*e, residual[e])).collect();
        let walk = euler_circuits(&list).pop().expect("component is non-empty");
        branches.push(Branch {
            walk,
            once_edges: comp.iter().filter(|e| residual[e] == 1).copied().collect(),
            twice_edges: comp.iter().filter(|e| residual[e] == 2).copied().collect(),
        });
    }
    Ok((h1, branches, greedy))
}

/// True when the branch's twice-covered edges are exactly the cut edges of
/// its support and its once-covered edges form an even subgraph.
pub fn branch_is_well_formed(b: &Branch) -> bool {
    crate::walk::is_branch_coverage(&b.coverage())
        || (b.twice_edges.is_empty() && {
            let g = edge_graph(&b.once_edges);
            let even = g.vertices().all(|v| g.degree(v) % 2 == 0);
            even
        })
}

/// Cycles of the once-covered edges and maximal segments of the
/// twice-covered forest.
pub fn branch_split(b: &Branch) -> (Vec<Seq>, Vec<Seq>) {
    let h2 = even_cycles(&b.once_edges);
    let mut bf = Vec::new();
    for comp in edge_components(&b.twice_edges) {
        let edges: Vec<Seq> = comp.iter().map(|e| vec![e.0, e.1]).collect();
        let (paths, loops) = chain_paths(&edges);
        debug_assert!(loops.is_empty(), "twice-covered edges form a forest");
        bf.extend(paths);
    }
    (h2, bf)
}

/// Output of [`decompose`]: either the all-even shortcut's final cycles or a
/// decomposition ready for reduction.
pub enum Decomposed {
    Shortcut { cycles: Vec<Seq>, trail: Vec<LiftedVertex> },
    Staged(Box<Decomposition>),
}

/// Runs lifting through branch splitting, recording audits and stage dumps.
pub fn decompose(g: &Graph, rec: &mut Recorder) -> Result<Decomposed, DecomposeError> {
    let lg = build_lift(g)?;
    let trail = eulerian_trail(&lg)?;
    let seq = &trail.vertices;
    {
        let mut c = CoverageMap::new();
        c.add_seq(&project_seq(seq), 1);
        rec.check_coverage("trail", g, &c);
    }
    if lg.is_open_case() {
        return Ok(shortcut(g, &lg, seq, rec));
    }
    let (lifted_cycles, _) = peel(seq);
    for c in &lifted_cycles {
        rec.audits.aux_counts_checked += 1;
        if aux_count(c) % 2 == 1 {
            rec.audits.odd_aux_cycles.push(project_seq(c));
        }
    }
    let (l_lifted, m_lifted) = split_pure_cycles(&lifted_cycles)?;
    let mut d = Decomposition::empty();
    d.l = l_lifted.iter().map(|c| project_seq(c)).collect();
    d.m = m_lifted.iter().map(|c| project_seq(c)).collect();
    d.l_lifted = l_lifted;
    d.m_lifted = m_lifted;
    rec.dump(g, "raw", &[("L", &d.l, 1), ("M", &d.m, 1)]);

    for m in &d.m {
        let (q1, q2) = split_once_twice(m)?;
        d.q1.extend(q1);
        d.q2.push(q2);
    }
    let q2_flat: Vec<Seq> = d.q2.iter().flatten().map(|p| segment_walk(p)).collect();
    rec.dump(g, "q_split", &[("L", &d.l, 1), ("Q1", &d.q1, 1), ("Q2", &q2_flat, 1)]);

    let (r, s_t) = merge_circuits(&d.q1);
    d.r = r;
    d.s_t = s_t;
    let st_walks: Vec<Seq> = d.s_t.iter().map(|p| segment_walk(p)).collect();
    rec.dump(
        g,
        "circuits",
        &[
            ("L", &d.l, 1),
            ("R", &d.r, 1),
            ("S_T", &st_walks, 1),
            ("Q2", &q2_flat, 1),
        ],
    );

    let merged = merge_segments(&d.q2, &d.s_t);
    d.s_c = merged.s_c;
    d.s = merged.s;
    d.d_c = merged.d_c;
    d.d_t = merged.d_t;
    let s_walks: Vec<Seq> = d.s.iter().map(|p| segment_walk(p)).collect();
    let dd = d.d();
    rec.dump(
        g,
        "segments",
        &[("L", &d.l, 1), ("R", &d.r, 1), ("D", &dd, 2), ("S", &s_walks, 1)],
    );
    // the remaining lifted cycles project onto R, D and S together
    {
        let m_cov = cov_of(&d.m, 1);
        let mut rds = cov_of(&d.r, 1);
        rds.add_map(&cov_of(&dd, 2));
        rds.add_map(&cov_of(&s_walks, 1));
        let pure_ok = d.l_lifted.iter().all(|c| aux_count(c) == 0) && d.l.iter().all(|c| crate::walk::is_cycle_seq(c));
        rec.audits.lifted_consistent &= pure_ok && m_cov == rds;
    }
    for (seg, v) in check_segment_endings(&d.s, g) {
        rec.audits.segment_even_ends.push((seg, v));
    }
    rec.audits.segments_checked += d.s.len();
    {
        let mut ends: BTreeMap<Vertex, usize> = BTreeMap::new();
        for p in &d.s {
            *ends.entry(p[0]).or_default() += 1;
            *ends.entry(*p.last().unwrap()).or_default() += 1;
        }
        rec.audits.segments_not_maximal += ends.values().filter(|&&k| k > 1).count();
    }

    d.f = build_forks(&d.s);
    d.stage = Stage::Forked;
    rec.dump(
        g,
        "forked",
        &[("L", &d.l, 1), ("R", &d.r, 1), ("D", &dd, 2), ("F", &d.f, 1)],
    );
    for f in &d.f {
        rec.audits.forks_checked += 1;
        for (v, deg) in bifurcation_degrees(f) {
            rec.audits.bifurcation_degree.push((v, deg));
        }
    }

    for f in &d.f {
        let (h1, branches, greedy) = extract_fork_cycles(f)?;
        rec.audits.h1_greedy_blocks += greedy;
        if branches.len() > 1 {
            rec.audits.branch_splits.push(branches.len());
        }
        d.h1.extend(h1);
        d.b.extend(branches);
    }
    d.stage = Stage::Branched;
    let b_walks: Vec<Seq> = d.b.iter().map(|b| b.walk.clone()).collect();
    rec.dump(
        g,
        "branched",
        &[
            ("L", &d.l, 1),
            ("R", &d.r, 1),
            ("D", &dd, 2),
            ("H1", &d.h1, 1),
            ("B", &b_walks, 1),
        ],
    );
    for b in &d.b {
        rec.audits.branches_checked += 1;
        if !branch_is_well_formed(b) {
            rec.audits.branch_cut_edges.push(b.walk.clone());
        }
    }

    for b in &d.b {
        let (h2, bf) = branch_split(b);
        d.h2.extend(h2);
        d.bf.extend(bf);
    }
    d.stage = Stage::Classed;
    let bf_walks: Vec<Seq> = d.bf.iter().map(|p| segment_walk(p)).collect();
    let rc = d.r_cycles();
    rec.dump(
        g,
        "classed",
        &[
            ("L", &d.l, 1),
            ("R", &rc, 1),
            ("D", &dd, 2),
            ("H1", &d.h1, 1),
            ("H2", &d.h2, 1),
            ("BF", &bf_walks, 1),
        ],
    );
    Ok(Decomposed::Staged(Box::new(d)))
}

/// All-even case: the auxiliary edge is a bridge of the lift, so the trail
/// returns to `(v0,1)` before crossing it. Each half is a closed walk in one
/// sheet; peeling both gives a cycle double cover.
fn shortcut(g: &Graph, lg: &LiftedGraph, seq: &[LiftedVertex], rec: &mut Recorder) -> Decomposed {
    let cross = seq
        .windows(2)
        .position(|w| LiftedGraph::is_aux_step(w[0], w[1]))
        .expect("open trail crosses the auxiliary edge");
    debug_assert_eq!(lg.aux.len(), 1);
    let mut lifted = peel(&seq[..=cross]).0;
    lifted.extend(peel(&seq[cross + 1..]).0);
    for c in &lifted {
        rec.audits.aux_counts_checked += 1;
        if aux_count(c) != 0 {
            rec.audits.odd_aux_cycles.push(project_seq(c));
        }
    }
    let cycles: Vec<Seq> = lifted.iter().map(|c| project_seq(c)).collect();
    rec.dump(g, "raw", &[("L", &cycles, 1)]);
    Decomposed::Shortcut {
        cycles,
        trail: seq.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[Seq]) -> BTreeSet<Seq> {
        v.iter().map(|w| crate::walk::canonical(w)).collect()
    }

    #[test]
    fn once_twice() {
        let (q1, q2) = split_once_twice(&[1, 2, 3, 4, 2, 1]).unwrap();
        assert_eq!(set(&q1), set(&[vec![2, 3, 4, 2]]));
        assert_eq!(q2, vec![vec![1, 2]]);
        let (q1, q2) = split_once_twice(&[0, 1, 2, 0]).unwrap();
        assert_eq!((q1.len(), q2.len()), (1, 0));
        let (q1, q2) = split_once_twice(&[1, 2, 1]).unwrap();
        assert!(q1.is_empty());
        assert_eq!(q2, vec![vec![1, 2]]);
        assert!(matches!(
            split_once_twice(&[0, 1, 0, 1, 0]),
            Err(DecomposeError::Multiplicity { .. })
        ));
    }

    #[test]
    fn circuits() {
        let (r, st) = merge_circuits(&[vec![0, 1, 2, 0], vec![3, 4, 5, 3]]);
        assert_eq!((r.len(), st.len()), (2, 0));
        let (r, st) = merge_circuits(&[vec![0, 1, 2, 0], vec![0, 3, 4, 0]]);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].len(), 7);
        assert!(st.is_empty());
        let (r, st) = merge_circuits(&[vec![0, 1, 2, 0], vec![0, 1, 3, 0]]);
        assert_eq!(set(&r), set(&[vec![0, 2, 1, 3, 0]]));
        assert_eq!(st, vec![vec![0, 1]]);
    }

    #[test]
    fn segments() {
        let m = merge_segments(&[vec![vec![1, 2], vec![2, 3]]], &[]);
        assert_eq!(set(&m.s), set(&[vec![1, 2, 3]]));
        assert!(m.d_c.is_empty());
        let m = merge_segments(&[vec![vec![1, 2, 3]], vec![vec![1, 3]]], &[]);
        assert!(m.s.is_empty());
        assert_eq!(set(&m.d_c), set(&[vec![1, 2, 3, 1]]));
        let m = merge_segments(&[vec![vec![1, 2]]], &[]);
        assert_eq!(m.s, vec![vec![1, 2]]);
    }

    #[test]
    fn segment_endings() {
        let k5 = crate::generators::complete(5).unwrap();
        assert_eq!(check_segment_endings(&[vec![1, 2]], &k5).len(), 2);
        assert!(check_segment_endings(&[], &k5).is_empty());
    }

    #[test]
    fn forks() {
        // s1 = 1..5 passes 3 as an inner vertex; s2 ends at 3
        let f = build_forks(&[vec![1, 2, 3, 4, 5], vec![3, 6]]);
        assert_eq!(f.len(), 1);
        let roles = closed_roles(&f[0]);
        assert_eq!(roles.bifurcation, BTreeSet::from([3]));
        assert_eq!(seq_coverage(&f[0]).total(), 10);
        let f = build_forks(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(f.len(), 2);
        // chained end-into-inner twice
        let f = build_forks(&[vec![1, 2, 3, 4, 5], vec![3, 6, 7, 8], vec![7, 9]]);
        assert_eq!(f.len(), 1);
        assert_eq!(closed_roles(&f[0]).bifurcation, BTreeSet::from([3, 7]));
        assert!(bifurcation_degrees(&f[0]).is_empty());
    }

    #[test]
    fn fork_cycles() {
        let f = vec![0, 1, 2, 0, 3, 0, 2, 1, 0];
        let (h1, b, greedy) = extract_fork_cycles(&f).unwrap();
        assert_eq!(greedy, 0);
        assert_eq!(set(&h1), set(&[vec![0, 1, 2, 0]]));
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].twice_edges, BTreeSet::from([Edge(0, 3)]));
        assert_eq!(b[0].once_edges.len(), 3);
        let (h2, bf) = branch_split(&b[0]);
        assert_eq!(set(&h2), set(&[vec![0, 1, 2, 0]]));
        assert_eq!(bf, vec![vec![0, 3]]);

        let (h1, b, _) = extract_fork_cycles(&segment_walk(&[1, 2, 3])).unwrap();
        assert!(h1.is_empty());
        assert_eq!(b[0].twice_edges.len(), 2);

        assert_eq!(
            extract_fork_cycles(&[0, 1, 2, 0, 1, 2, 0]).map(|_| ()),
            Err(DecomposeError::DoubleCycleFork)
        );
    }

    #[test]
    fn theta_block_keeps_cut_structure() {
        // theta with hubs 0,1 and paths 0-2-1, 0-3-1, 0-4-1, doubled, plus a
        // pendant edge 2-5 doubled
        let es = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1), (2, 5)];
        let list: Vec<(Edge, u32)> = es.iter().map(|&(a, b)| (Edge::new(a, b), 2)).collect();
        let f = euler_circuits(&list).pop().unwrap();
        let (h1, branches, greedy) = extract_fork_cycles(&f).unwrap();
        assert_eq!(greedy, 0);
        let mut total = cov_of(&h1, 1);
        for b in &branches {
            assert!(branch_is_well_formed(b));
            total.add_map(&b.coverage());
        }
        assert_eq!(total, seq_coverage(&f));
    }

    #[test]
    fn branch_with_bridge_path() {
        let b = Branch {
            walk: vec![0, 1, 2, 0, 3, 4, 5, 6, 4, 3, 0],
            once_edges: [Edge(0, 1), Edge(1, 2), Edge(0, 2), Edge(4, 5), Edge(5, 6), Edge(4, 6)].into(),
            twice_edges: [Edge(0, 3), Edge(3, 4)].into(),
        };
        assert!(branch_is_well_formed(&b));
        let (h2, bf) = branch_split(&b);
        assert_eq!(h2.len(), 2);
        assert_eq!(set(&bf), set(&[vec![0, 3, 4]]));
        let circuit = Branch {
            walk: vec![0, 1, 2, 0],
            once_edges: [Edge(0, 1), Edge(1, 2), Edge(0, 2)].into(),
            twice_edges: BTreeSet::new(),
        };
        let (h2, bf) = branch_split(&circuit);
        assert_eq!((h2.len(), bf.len()), (1, 0));
    }
}
