//! Simple undirected graphs with stable vertex ids.
//!
//! Vertex ids are non-negative integers. They need not be contiguous, which
//! lets [`induced_subgraph`] keep the ids of its host graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// An unordered vertex pair, stored with the smaller id first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(u: Vertex, v: Vertex) -> Edge {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn other(self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn has(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop edge at vertex {0}")]
    Loop(Vertex),
    #[error("duplicate edge {0}")]
    Duplicate(Edge),
    #[error("edge {0} is not in the graph")]
    UnknownEdge(Edge),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected two non-negative integers, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: loop edge at vertex {vertex}")]
    Loop { line: usize, vertex: Vertex },
    #[error("line {line}: duplicate edge {edge}")]
    Duplicate { line: usize, edge: Edge },
}

/// Immutable simple graph. Neighbor lists are sorted ascending.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    present: Vec<bool>,
    adj: Vec<Vec<Vertex>>,
    edges: Vec<Edge>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertices().collect::<Vec<_>>())
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from explicit vertices plus the endpoints of `edges`.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut vs: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut es = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::Loop(u));
            }
            let e = Edge::new(u, v);
            if !es.insert(e) {
                return Err(GraphError::Duplicate(e));
            }
            vs.insert(u);
            vs.insert(v);
        }
        let size = vs.iter().next_back().map_or(0, |&m| m + 1);
        let mut present = vec![false; size];
        for &v in &vs {
            present[v] = true;
        }
        let mut adj = vec![Vec::new(); size];
        for e in &es {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            present,
            adj,
            edges: es.into_iter().collect(),
        })
    }

    pub fn from_edges(edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        Graph::new(std::iter::empty(), edges.iter().copied())
    }

    pub fn empty() -> Graph {
        Graph {
            present: Vec::new(),
            adj: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.present.iter().enumerate().filter_map(|(v, &p)| p.then_some(v))
    }

    pub fn vertex_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    /// One past the largest vertex id; the length of dense per-vertex tables.
    pub fn id_bound(&self) -> usize {
        self.present.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adj.get(v).map_or(&[], |l| l.as_slice())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Position of `e` in [`Graph::edges`].
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Canonical edge-list text: one sorted `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph {\n");
        for v in self.vertices().filter(|&v| self.degree(v) == 0) {
            out.push_str(&format!("  {v};\n"));
        }
        for e in &self.edges {
            out.push_str(&format!("  {} -- {};\n", e.0, e.1));
        }
        out.push_str("}\n");
        out
    }
}

/// Parses the edge-list format: `u v` per line, `#` comments, blank lines ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut seen = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let malformed = || ParseError::Malformed {
            line,
            text: raw.to_string(),
        };
        let mut parts = body.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed());
        };
        let u: Vertex = a.parse().map_err(|_| malformed())?;
        let v: Vertex = b.parse().map_err(|_| malformed())?;
        if u == v {
            return Err(ParseError::Loop { line, vertex: u });
        }
        let e = Edge::new(u, v);
        if seen.insert(e, line).is_some() {
            return Err(ParseError::Duplicate { line, edge: e });
        }
    }
    Ok(Graph::new(std::iter::empty(), seen.keys().map(|e| (e.0, e.1))).expect("checked above"))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Parity {
    pub odd: Vec<Vertex>,
    pub even: Vec<Vertex>,
    /// Degree-0 vertices, kept apart from `even`.
    pub isolated: Vec<Vertex>,
}

pub fn parity_partition(g: &Graph) -> Parity {
    let mut p = Parity::default();
    for v in g.vertices() {
        match g.degree(v) {
            0 => p.isolated.push(v),
            d if d % 2 == 1 => p.odd.push(v),
            _ => p.even.push(v),
        }
    }
    p
}

/// Bridges by one low-link depth-first traversal (iterative).
pub fn find_bridges(g: &Graph) -> BTreeSet<Edge> {
    let n = g.id_bound();
    let mut tin = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut out = BTreeSet::new();
    for root in g.vertices() {
        if tin[root] != usize::MAX {
            continue;
        }
        // (vertex, parent, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        tin[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if let Some(&w) = g.neighbors(v).get(*next) {
                *next += 1;
                if w == parent {
                    continue;
                }
                if tin[w] == usize::MAX {
                    tin[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(tin[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > tin[parent] {
                        out.insert(Edge::new(parent, v));
                    }
                }
            }
        }
    }
    out
}

/// Vertex sets of the connected components, each sorted, ordered by smallest member.
pub fn components(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; g.id_bound()];
    let mut out = Vec::new();
    for s in g.vertices() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    components(g).len() <= 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    TooSmall { vertices: usize },
    LowDegree { vertex: Vertex, degree: usize },
    Disconnected { component: Vec<Vertex> },
    Bridge { edge: Edge },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::TooSmall { vertices } => write!(f, "graph has only {vertices} vertices"),
            Rejection::LowDegree { vertex, degree } => {
                write!(f, "vertex {vertex} has degree {degree}")
            }
            Rejection::Disconnected { component } => {
                write!(f, "graph is disconnected; component {component:?} is split off")
            }
            Rejection::Bridge { edge } => write!(f, "edge {edge} is a bridge"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Accepts connected, bridgeless graphs with at least 3 vertices and minimum degree 2.
pub fn is_valid_input(g: &Graph) -> Verdict {
    let n = g.vertex_count();
    if n < 3 {
        return Verdict::Reject(Rejection::TooSmall { vertices: n });
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) < 2) {
        return Verdict::Reject(Rejection::LowDegree {
            vertex: v,
            degree: g.degree(v),
        });
    }
    let comps = components(g);
    if comps.len() > 1 {
        return Verdict::Reject(Rejection::Disconnected {
            component: comps[1].clone(),
        });
    }
    match find_bridges(g).into_iter().next() {
        Some(edge) => Verdict::Reject(Rejection::Bridge { edge }),
        None => Verdict::Accept,
    }
}

/// The subgraph formed by `es` and their endpoints.
pub fn induced_subgraph<'a, I>(g: &Graph, es: I) -> Result<Graph, GraphError>
where
    I: IntoIterator<Item = &'a Edge>,
{
    let mut kept = Vec::new();
    for &e in es {
        if g.edge_index(e).is_none() {
            return Err(GraphError::UnknownEdge(e));
        }
        kept.push((e.0, e.1));
    }
    kept.sort_unstable();
    kept.dedup();
    Graph::new(std::iter::empty(), kept)
}

/// Graph on exactly the given edges, without a host to check against.
pub(crate) fn edge_graph<'a, I>(es: I) -> Graph
where
    I: IntoIterator<Item = &'a Edge>,
{
    let mut kept: Vec<(Vertex, Vertex)> = es.into_iter().map(|e| (e.0, e.1)).collect();
    kept.sort_unstable();
    kept.dedup();
    Graph::new(std::iter::empty(), kept).expect("edges are normalized and distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn parse_triangle() {
        let g = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g, triangle());
        assert_eq!(g.to_edge_list(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_edge_list("0 0"), Err(ParseError::Loop { line: 1, vertex: 0 }));
        assert_eq!(
            parse_edge_list("# c\n0 1\n0 1"),
            Err(ParseError::Duplicate {
                line: 3,
                edge: Edge(0, 1)
            })
        );
        assert!(matches!(
            parse_edge_list("0 1\n1 x\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 2"),
            Err(ParseError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn parity_examples() {
        let k4 = crate::generators::complete(4).unwrap();
        let p = parity_partition(&k4);
        assert_eq!(p.odd, vec![0, 1, 2, 3]);
        assert!(p.even.is_empty());
        let k5 = crate::generators::complete(5).unwrap();
        assert_eq!(parity_partition(&k5).even.len(), 5);
        let path = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let p = parity_partition(&path);
        assert_eq!((p.odd, p.even), (vec![0, 2], vec![1]));
    }

    #[test]
    fn bridge_examples() {
        let path = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        assert_eq!(find_bridges(&path), BTreeSet::from([Edge(0, 1), Edge(1, 2)]));
        assert!(find_bridges(&triangle()).is_empty());
        let barbell = Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(find_bridges(&barbell), BTreeSet::from([Edge(2, 3)]));
    }

    #[test]
    fn validity() {
        let petersen = crate::generators::petersen();
        assert_eq!(is_valid_input(&petersen), Verdict::Accept);
        let path = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            is_valid_input(&path),
            Verdict::Reject(Rejection::LowDegree { .. })
        ));
        let two = Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(matches!(
            is_valid_input(&two),
            Verdict::Reject(Rejection::Disconnected { .. })
        ));
        let barbell = Graph::from_edges(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(
            is_valid_input(&barbell),
            Verdict::Reject(Rejection::Bridge { edge: Edge(2, 3) })
        );
    }

    #[test]
    fn induced() {
        let k4 = crate::generators::complete(4).unwrap();
        let t = induced_subgraph(&k4, &[Edge(0, 1), Edge(1, 2), Edge(0, 2)]).unwrap();
        assert_eq!(t, triangle());
        assert_eq!(induced_subgraph(&k4, &[]).unwrap().vertex_count(), 0);
        assert_eq!(
            induced_subgraph(&triangle(), &[Edge(0, 5)]),
            Err(GraphError::UnknownEdge(Edge(0, 5)))
        );
    }

    #[test]
    fn dot_export() {
        assert_eq!(triangle().to_dot(), "graph {\n  0 -- 1;\n  0 -- 2;\n  1 -- 2;\n}\n");
    }
}
