//! Independent cover verification and an exhaustive search oracle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, Vertex};
use crate::walk::{canonical, canonical_cmp, is_cycle_seq, CoverageMap};

/// A proposed multiset of cycles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdcCandidate {
    pub cycles: Vec<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// Coverage value to number of edges with it.
    pub histogram: BTreeMap<u32, usize>,
    pub under: Vec<Edge>,
    pub over: Vec<Edge>,
    /// Indices of candidates that are not cycles of the graph.
    pub malformed: Vec<usize>,
}

/// Checks that every element is a cycle of `g` and every edge lies on exactly two.
pub fn verify_cdc(g: &Graph, c: &CdcCandidate) -> VerifyReport {
    let mut cov = CoverageMap::new();
    let mut malformed = Vec::new();
    for (i, cyc) in c.cycles.iter().enumerate() {
        let adjacent = cyc.windows(2).all(|w| g.has_edge(w[0], w[1]));
        if !adjacent || !is_cycle_seq(cyc) {
            malformed.push(i);
        }
        if adjacent {
            cov.add_seq(cyc, 1);
        }
    }
    let mut under = Vec::new();
    let mut over = Vec::new();
    for &e in g.edges() {
        match cov.get(e) {
            0 | 1 => under.push(e),
            2 => {}
            _ => over.push(e),
        }
    }
    let histogram = cov.histogram(g);
    VerifyReport {
        ok: under.is_empty() && over.is_empty() && malformed.is_empty(),
        histogram,
        under,
        over,
        malformed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {cap} cycles")]
    TooManyCycles { cap: usize },
    #[error("graph has {edges} edges, oracle bound is {bound}")]
    TooLarge { edges: usize, bound: usize },
    #[error("cycle length bound must be at least 3")]
    BadLength,
    #[error("search exceeded {0} nodes")]
    Budget(u64),
}

/// All simple cycles with at most `max_len` edges, canonical and in canonical order.
pub fn enumerate_cycles(g: &Graph, max_len: usize, cap: usize) -> Result<Vec<Vec<Vertex>>, OracleError> {
    if max_len < 3 {
        return Err(OracleError::BadLength);
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; g.id_bound()];
    for s in g.vertices() {
        // cycles whose smallest vertex is s, second vertex below the last
        let mut path = vec![s];
        on_path[s] = true;
        let mut stack: Vec<usize> = vec![0];
        while let Some(&i) = stack.last() {
            let v = *path.last().unwrap();
            let nbrs = g.neighbors(v);
            if i >= nbrs.len() {
                stack.pop();
                on_path[v] = false;
                path.pop();
                continue;
            }
            *stack.last_mut().unwrap() += 1;
            let w = nbrs[i];
            if w == s && path.len() >= 3 && path[1] < v {
                let mut c = path.clone();
                c.push(s);
                out.push(canonical(&c));
                if out.len() > cap {
                    return Err(OracleError::TooManyCycles { cap });
                }
            } else if w > s && !on_path[w] && path.len() < max_len {
                on_path[w] = true;
                path.push(w);
                stack.push(0);
            }
        }
        on_path[s] = false;
    }
    out.sort_by(|a, b| canonical_cmp(a, b));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_cycles: usize,
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> OracleLimits {
        OracleLimits {
            max_edges: 20,
            max_cycles: 200_000,
            max_nodes: 50_000_000,
        }
    }
}

/// Depth-first search for a cycle double cover.
///
/// Branches on the first edge (in sorted order) covered fewer than two
/// times, trying the cycles through it in canonical order, never letting an
/// edge exceed two. A cycle can be chosen at most twice as a consequence.
/// Returns the first cover found, or `None` when the search is exhausted.
pub fn brute_force_cdc(g: &Graph, limits: OracleLimits) -> Result<Option<CdcCandidate>, OracleError> {
    if g.edge_count() > limits.max_edges {
        return Err(OracleError::TooLarge {
            edges: g.edge_count(),
            bound: limits.max_edges,
        });
    }
    let cycles = enumerate_cycles(g, g.vertex_count().max(3), limits.max_cycles)?;
    let m = g.edge_count();
    let edge_ids: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| {
            c.windows(2)
                .map(|w| g.edge_index(Edge::new(w[0], w[1])).expect("cycle edge"))
                .collect()
        })
        .collect();
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (ci, es) in edge_ids.iter().enumerate() {
        for &e in es {
            through[e].push(ci);
        }
    }
    let mut count = vec![0u8; m];
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    let found = search(
        &edge_ids,
        &through,
        &mut count,
        &mut chosen,
        &mut nodes,
        limits.max_nodes,
    )?;
    Ok(found.then(|| CdcCandidate {
        cycles: chosen.iter().map(|&i| cycles[i].clone()).collect(),
    }))
}

fn search(
    edge_ids: &[Vec<usize>],
    through: &[Vec<usize>],
    count: &mut [u8],
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, OracleError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(OracleError::Budget(budget));
    }
    let Some(e) = count.iter().position(|&c| c < 2) else {
        return Ok(true);
    };
    for &ci in &through[e] {
        if edge_ids[ci].iter().any(|&f| count[f] >= 2) {
            continue;
        }
        for &f in &edge_ids[ci] {
            count[f] += 1;
        }
        chosen.push(ci);
        if search(edge_ids, through, count, chosen, nodes, budget)? {
            return Ok(true);
        }
        chosen.pop();
        for &f in &edge_ids[ci] {
            count[f] -= 1;
        }
    }
    Ok(false)
}
