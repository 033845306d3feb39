//! Two-sheet lift of a graph, its Eulerian trail, projection and cycle peeling.
//!
//! Lifted vertex `(v, tag)` with `tag` in {1, 2} has id `2v + tag - 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_valid_input, parity_partition, Edge, Graph, Rejection, Verdict, Vertex};
use crate::walk::Walk;

pub type LiftedVertex = usize;

pub fn lifted(v: Vertex, tag: u8) -> LiftedVertex {
    debug_assert!(tag == 1 || tag == 2);
    2 * v + (tag as usize - 1)
}

pub fn base_of(x: LiftedVertex) -> Vertex {
    x / 2
}

pub fn tag_of(x: LiftedVertex) -> u8 {
    (x % 2) as u8 + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("invalid input: {0}")]
    Input(Rejection),
    #[error("lifted graph has {0} odd vertices")]
    Parity(usize),
    #[error("trail covers {covered} of {total} lifted edges")]
    Disconnected { covered: usize, total: usize },
    #[error("peeling needs a closed walk")]
    NotClosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftedEdge {
    Copy { edge: Edge, tag: u8 },
    Aux { vertex: Vertex },
}

/// Two copies of `base` joined by auxiliary edges.
#[derive(Clone, Debug)]
pub struct LiftedGraph {
    pub base: Graph,
    /// Base vertices carrying an auxiliary edge, ascending.
    pub aux: Vec<Vertex>,
    edges: Vec<LiftedEdge>,
    adj: Vec<Vec<(LiftedVertex, usize)>>,
}

impl LiftedGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LiftedEdge] {
        &self.edges
    }

    pub fn degree(&self, x: LiftedVertex) -> usize {
        self.adj.get(x).map_or(0, |l| l.len())
    }

    /// Neighbors with edge ids, in trail preference order.
    pub fn neighbors(&self, x: LiftedVertex) -> &[(LiftedVertex, usize)] {
        &self.adj[x]
    }

    pub fn vertices(&self) -> impl Iterator<Item = LiftedVertex> + '_ {
        self.base.vertices().flat_map(|v| [lifted(v, 1), lifted(v, 2)])
    }

    /// True in the all-even case, where the single auxiliary edge is a bridge.
    pub fn is_open_case(&self) -> bool {
        parity_partition(&self.base).odd.is_empty()
    }

    pub fn is_aux_step(a: LiftedVertex, b: LiftedVertex) -> bool {
        base_of(a) == base_of(b)
    }
}

pub fn build_lift(g: &Graph) -> Result<LiftedGraph, LiftError> {
    if let Verdict::Reject(r) = is_valid_input(g) {
        return Err(LiftError::Input(r));
    }
    let odd = parity_partition(g).odd;
    let aux = if odd.is_empty() {
        vec![g.vertices().next().expect("validated non-empty")]
    } else {
        odd
    };
    let mut edges = Vec::with_capacity(2 * g.edge_count() + aux.len());
    let mut adj = vec![Vec::new(); 2 * g.id_bound()];
    for &e in g.edges() {
        for tag in [1u8, 2] {
            let id = edges.len();
            edges.push(LiftedEdge::Copy { edge: e, tag });
            let (a, b) = (lifted(e.0, tag), lifted(e.1, tag));
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
    }
    for &v in &aux {
        let id = edges.len();
        edges.push(LiftedEdge::Aux { vertex: v });
        adj[lifted(v, 1)].push((lifted(v, 2), id));
        adj[lifted(v, 2)].push((lifted(v, 1), id));
    }
    // copy neighbors by base id then tag, auxiliary edge last
    for (x, list) in adj.iter_mut().enumerate() {
        list.sort_by_key(|&(y, _)| (base_of(y) == base_of(x), y));
    }
    Ok(LiftedGraph {
        base: g.clone(),
        aux,
        edges,
        adj,
    })
}

/// A walk in a lifted graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftedWalk {
    pub vertices: Vec<LiftedVertex>,
}

impl LiftedWalk {
    pub fn is_closed(&self) -> bool {
        self.vertices.len() >= 2 && self.vertices.first() == self.vertices.last()
    }

    pub fn aux_count(&self) -> usize {
        aux_count(&self.vertices)
    }

    pub fn pairs(&self) -> Vec<(Vertex, u8)> {
        self.vertices.iter().map(|&x| (base_of(x), tag_of(x))).collect()
    }

    /// Text form: an `aux=k` header line, then `(v,tag)` tokens.
    pub fn to_text(&self) -> String {
        format!("aux={}\n{}\n", self.aux_count(), self)
    }
}

impl fmt::Display for LiftedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|(v, t)| format!("({v},{t})")).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn aux_count(seq: &[LiftedVertex]) -> usize {
    seq.windows(2).filter(|w| LiftedGraph::is_aux_step(w[0], w[1])).count()
}

/// Maps lifted vertices to base vertices, merging the repeats that auxiliary hops leave.
pub fn project(w: &LiftedWalk) -> Walk {
    Walk::new(project_seq(&w.vertices))
}

pub(crate) fn project_seq(seq: &[LiftedVertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(seq.len());
    for &x in seq {
        let v = base_of(x);
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// Hierholzer over an adjacency of `(neighbor, edge id)` lists, taking the
/// first unused entry at every step. Returns the vertex sequence of the trail.
pub(crate) fn hierholzer(adj: &[Vec<(usize, usize)>], edge_count: usize, start: usize) -> Vec<usize> {
    let mut used = vec![false; edge_count];
    let mut ptr = vec![0usize; adj.len()];
    let mut stack = vec![start];
    let mut out = Vec::with_capacity(edge_count + 1);
    while let Some(&v) = stack.last() {
        let list = &adj[v];
        while ptr[v] < list.len() && used[list[ptr[v]].1] {
            ptr[v] += 1;
        }
        if ptr[v] == list.len() {
            out.push(v);
            stack.pop();
        } else {
            let (w, e) = list[ptr[v]];
            used[e] = true;
            stack.push(w);
        }
    }
    out.reverse();
    out
}

/// Eulerian trail of the lift: closed from `(v0,1)` when every lifted degree
/// is even, otherwise open from `(v0,1)` to `(v0,2)` for the designated `v0`.
pub fn eulerian_trail(lg: &LiftedGraph) -> Result<LiftedWalk, LiftError> {
    let odd: Vec<LiftedVertex> = lg.vertices().filter(|&x| lg.degree(x) % 2 == 1).collect();
    let start = match odd.len() {
        0 => lg.vertices().next().unwrap_or(0),
        2 => odd[0],
        k => return Err(LiftError::Parity(k)),
    };
    let seq = hierholzer(&lg.adj, lg.edges.len(), start);
    if seq.len() != lg.edges.len() + 1 {
        return Err(LiftError::Disconnected {
            covered: seq.len().saturating_sub(1),
            total: lg.edges.len(),
        });
    }
    Ok(LiftedWalk { vertices: seq })
}

/// Splits a closed walk into cycles with a vertex stack: whenever a stacked
/// vertex recurs, the enclosed stretch is popped as a cycle. Also used on
/// lifted sequences.
pub fn peel_cycles(seq: &[usize]) -> Result<Vec<Vec<usize>>, LiftError> {
    if seq.len() < 2 || seq.first() != seq.last() {
        return Err(LiftError::NotClosed);
    }
    Ok(peel(seq).0)
}

/// Peels `seq`, returning the cycles and the residual stack.
pub(crate) fn peel(seq: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut stack: Vec<usize> = Vec::new();
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cycles = Vec::new();
    for &x in seq {
        if let Some(&i) = pos.get(&x) {
            let mut cyc: Vec<usize> = stack[i..].to_vec();
            cyc.push(x);
            for y in stack.drain(i + 1..) {
                pos.remove(&y);
            }
            cycles.push(cyc);
        } else {
            pos.insert(x, stack.len());
            stack.push(x);
        }
    }
    (cycles, stack)
}

/// Closed walks covering a multiset of base edges, one per connected
/// component, each traced by Hierholzer from its smallest vertex with
/// smallest-neighbor preference. Every vertex must have even degree.
pub(crate) fn euler_circuits(edges: &[(Edge, u32)]) -> Vec<Vec<Vertex>> {
    let mut list: Vec<Edge> = Vec::new();
    for &(e, k) in edges {
        for _ in 0..k {
            list.push(e);
        }
    }
    list.sort_unstable();
    let bound = list.iter().map(|e| e.1 + 1).max().unwrap_or(0);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); bound];
    for (id, e) in list.iter().enumerate() {
        adj[e.0].push((e.1, id));
        adj[e.1].push((e.0, id));
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let mut done = vec![false; bound];
    let mut out = Vec::new();
    for v in 0..bound {
        if done[v] || adj[v].is_empty() {
            continue;
        }
        let walk = hierholzer(&adj, list.len(), v);
        for &x in &walk {
            done[x] = true;
        }
        out.push(walk);
    }
    out
}

/// Cycle decomposition of an even edge set: Euler retrace per component, then peel.
pub(crate) fn even_cycles<'a, I>(edges: I) -> Vec<Vec<Vertex>>
where
    I: IntoIterator<Item = &'a Edge>,
{
    let es: Vec<(Edge, u32)> = edges.into_iter().map(|&e| (e, 1)).collect();
    let mut out = Vec::new();
    for c in euler_circuits(&es) {
        out.extend(peel(&c).0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, petersen};
    use crate::walk::seq_coverage;

    #[test]
    fn lift_counts() {
        let k4 = build_lift(&complete(4).unwrap()).unwrap();
        assert_eq!(k4.aux, vec![0, 1, 2, 3]);
        assert_eq!(k4.edge_count(), 16);
        assert!(k4.vertices().all(|x| k4.degree(x) == 4));

        let k5 = build_lift(&complete(5).unwrap()).unwrap();
        assert_eq!(k5.aux, vec![0]);
        for x in k5.vertices() {
            let want = if base_of(x) == 0 { 5 } else { 4 };
            assert_eq!(k5.degree(x), want);
        }

        let p = build_lift(&petersen()).unwrap();
        assert_eq!((p.aux.len(), p.edge_count()), (10, 40));
        assert!(p.vertices().all(|x| p.degree(x) == 4));
    }

    #[test]
    fn projection() {
        let w = LiftedWalk {
            vertices: vec![lifted(3, 1), lifted(4, 1), lifted(3, 1)],
        };
        assert_eq!(project(&w).vertices, vec![3, 4, 3]);
        let hop = LiftedWalk {
            vertices: vec![lifted(1, 1), lifted(1, 2)],
        };
        assert_eq!(project(&hop).vertices, vec![1]);
        let seg = LiftedWalk {
            vertices: vec![lifted(1, 1), lifted(2, 1), lifted(2, 2), lifted(1, 2), lifted(1, 1)],
        };
        assert_eq!(project(&seg).vertices, vec![1, 2, 1]);
        assert_eq!(seg.to_text(), "aux=2\n(1,1) (2,1) (2,2) (1,2) (1,1)\n");
    }

    #[test]
    fn trails() {
        let k3 = build_lift(&complete(3).unwrap()).unwrap();
        let t = eulerian_trail(&k3).unwrap();
        assert_eq!(t.vertices.len(), 8);
        assert_eq!(t.vertices[0], lifted(0, 1));
        assert_eq!(*t.vertices.last().unwrap(), lifted(0, 2));

        let k4 = build_lift(&complete(4).unwrap()).unwrap();
        let t = eulerian_trail(&k4).unwrap();
        assert!(t.is_closed());
        assert_eq!(t.vertices.len(), 17);
        let cov = seq_coverage(&project(&t).vertices);
        assert!(cov.is_constant_on(&k4.base, 2));

        let tri = [(0usize, 1usize), (1, 2), (2, 0)];
        let mut adj = vec![Vec::new(); 3];
        for (id, &(a, b)) in tri.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        assert_eq!(hierholzer(&adj, 3, 0), vec![0, 1, 2, 0]);
    }

    #[test]
    fn peeling() {
        assert_eq!(
            peel_cycles(&[0, 1, 2, 0, 3, 4, 0]).unwrap(),
            vec![vec![0, 1, 2, 0], vec![0, 3, 4, 0]]
        );
        assert_eq!(peel_cycles(&[0, 1, 2, 0]).unwrap(), vec![vec![0, 1, 2, 0]]);
        assert_eq!(peel_cycles(&[0, 1, 2]), Err(LiftError::NotClosed));
    }

    #[test]
    fn even_cycle_split() {
        let es = [Edge(0, 1), Edge(1, 2), Edge(0, 2), Edge(0, 3), Edge(3, 4), Edge(0, 4)];
        let cs = even_cycles(&es);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.iter().map(|c| c.len() - 1).sum::<usize>(), 6);
    }
}
