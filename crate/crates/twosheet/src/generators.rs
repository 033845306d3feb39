//! Named graph families and seeded random bridgeless cubic graphs.
//!
//! Vertex numbering per family:
//! - `complete(n)`: `0..n`.
//! - `cycle(n)`: `0..n` in cyclic order.
//! - `theta(a, b, c)`: hubs `0` and `1`; the internal vertices of the `a`,
//!   `b`, `c` paths are numbered from `2` upward, path by path, hub `0` side first.
//! - `prism(n)`: outer cycle `0..n`, inner cycle `n..2n`, spokes `i`–`n+i`.
//! - `petersen()`: vertex `i` is the `i`-th 2-subset of `{0..5}` in
//!   lexicographic order; disjoint subsets are adjacent.
//! - `flower_snark(k)`: star `i` has center `a=4i`, leaves `b=4i+1`, `c=4i+2`,
//!   `d=4i+3`. The `b` leaves form a `k`-cycle; the `c` and `d` leaves form
//!   one `2k`-cycle that swaps sides at the wrap (`c_{k-1}d_0`, `d_{k-1}c_0`).

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{find_bridges, is_connected, Edge, Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{0}")]
    Invalid(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Complete { n: usize },
    Cycle { n: usize },
    Theta { a: usize, b: usize, c: usize },
    Prism { n: usize },
    Petersen,
    FlowerSnark { k: usize },
    RandomCubic { n: usize, seed: u64 },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |m: &str| Err(SpecError::Invalid(m.to_string()));
        match *self {
            FamilySpec::Complete { n } if n < 3 => bad("complete needs n >= 3"),
            FamilySpec::Cycle { n } if n < 3 => bad("cycle needs n >= 3"),
            FamilySpec::Theta { a, b, c } => {
                if a == 0 || b == 0 || c == 0 {
                    bad("theta path lengths must be >= 1")
                } else if [a, b, c].iter().filter(|&&x| x == 1).count() > 1 {
                    bad("theta allows at most one path of length 1")
                } else {
                    Ok(())
                }
            }
            FamilySpec::Prism { n } if n < 3 => bad("prism needs n >= 3"),
            FamilySpec::FlowerSnark { k } if k < 3 || k % 2 == 0 => bad("flower snark needs odd k >= 3"),
            FamilySpec::RandomCubic { n, .. } if n < 4 || n % 2 == 1 => bad("random cubic needs even n >= 4"),
            _ => Ok(()),
        }
    }

    /// Short name used in corpus listings, e.g. `K5`, `theta122`, `rc10_3`.
    pub fn name(&self) -> String {
        match *self {
            FamilySpec::Complete { n } => format!("K{n}"),
            FamilySpec::Cycle { n } => format!("C{n}"),
            FamilySpec::Theta { a, b, c } => format!("theta{a}{b}{c}"),
            FamilySpec::Prism { n } => format!("prism{n}"),
            FamilySpec::Petersen => "petersen".to_string(),
            FamilySpec::FlowerSnark { k } => format!("J{k}"),
            FamilySpec::RandomCubic { n, seed } => format!("rc{n}_{seed}"),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Complete { n } => write!(f, "complete:{n}"),
            FamilySpec::Cycle { n } => write!(f, "cycle:{n}"),
            FamilySpec::Theta { a, b, c } => write!(f, "theta:{a},{b},{c}"),
            FamilySpec::Prism { n } => write!(f, "prism:{n}"),
            FamilySpec::Petersen => write!(f, "petersen"),
            FamilySpec::FlowerSnark { k } => write!(f, "flower-snark:{k}"),
            FamilySpec::RandomCubic { n, seed } => write!(f, "random-cubic:{n}:{seed}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = SpecError;

    /// Parses `complete:5`, `cycle:6`, `theta:1,2,2`, `prism:4`, `petersen`,
    /// `flower-snark:5`, `random-cubic:10` (seed 0) or `random-cubic:10:7`.
    fn from_str(s: &str) -> Result<FamilySpec, SpecError> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Result<Vec<u64>, _> = args
            .split([',', ':'])
            .filter(|t| !t.is_empty())
            .map(|t| t.trim().parse::<u64>())
            .collect();
        let nums = nums.map_err(|_| SpecError::Invalid(format!("bad parameters in {s:?}")))?;
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(SpecError::Invalid(format!("{name} takes {k} parameter(s)")))
            }
        };
        let spec = match name {
            "complete" | "k" => {
                want(1)?;
                FamilySpec::Complete { n: nums[0] as usize }
            }
            "cycle" => {
                want(1)?;
                FamilySpec::Cycle { n: nums[0] as usize }
            }
            "theta" => {
                want(3)?;
                FamilySpec::Theta {
                    a: nums[0] as usize,
                    b: nums[1] as usize,
                    c: nums[2] as usize,
                }
            }
            "prism" => {
                want(1)?;
                FamilySpec::Prism { n: nums[0] as usize }
            }
            "petersen" => {
                want(0)?;
                FamilySpec::Petersen
            }
            "flower-snark" | "flower_snark" => {
                want(1)?;
                FamilySpec::FlowerSnark { k: nums[0] as usize }
            }
            "random-cubic" | "random_cubic" => match nums.len() {
                1 => FamilySpec::RandomCubic {
                    n: nums[0] as usize,
                    seed: 0,
                },
                2 => FamilySpec::RandomCubic {
                    n: nums[0] as usize,
                    seed: nums[1],
                },
                _ => return Err(SpecError::Invalid("random-cubic takes n[:seed]".into())),
            },
            other => return Err(SpecError::UnknownFamily(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn make(spec: &FamilySpec) -> Result<Graph, SpecError> {
    spec.validate()?;
    Ok(match *spec {
        FamilySpec::Complete { n } => complete(n)?,
        FamilySpec::Cycle { n } => cycle(n)?,
        FamilySpec::Theta { a, b, c } => theta(a, b, c)?,
        FamilySpec::Prism { n } => prism(n)?,
        FamilySpec::Petersen => petersen(),
        FamilySpec::FlowerSnark { k } => flower_snark(k)?,
        FamilySpec::RandomCubic { n, seed } => random_cubic_bridgeless(n, seed)?,
    })
}

fn build(edges: Vec<(Vertex, Vertex)>) -> Graph {
    Graph::from_edges(&edges).expect("family constructions are simple")
}

pub fn complete(n: usize) -> Result<Graph, SpecError> {
    FamilySpec::Complete { n }.validate()?;
    let mut es = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            es.push((i, j));
        }
    }
    Ok(build(es))
}

pub fn cycle(n: usize) -> Result<Graph, SpecError> {
    FamilySpec::Cycle { n }.validate()?;
    Ok(build((0..n).map(|i| (i, (i + 1) % n)).collect()))
}

pub fn theta(a: usize, b: usize, c: usize) -> Result<Graph, SpecError> {
    FamilySpec::Theta { a, b, c }.validate()?;
    let mut es = Vec::new();
    let mut next = 2;
    for len in [a, b, c] {
        let mut prev = 0;
        for _ in 1..len {
            es.push((prev, next));
            prev = next;
            next += 1;
        }
        es.push((prev, 1));
    }
    Ok(build(es))
}

pub fn prism(n: usize) -> Result<Graph, SpecError> {
    FamilySpec::Prism { n }.validate()?;
    let mut es = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        es.push((i, j));
        es.push((n + i, n + j));
        es.push((i, n + i));
    }
    Ok(build(es))
}

pub fn petersen() -> Graph {
    let mut subsets = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            subsets.push((i, j));
        }
    }
    let mut es = Vec::new();
    for (x, &(a, b)) in subsets.iter().enumerate() {
        for (y, &(c, d)) in subsets.iter().enumerate().skip(x + 1) {
            if a != c && a != d && b != c && b != d {
                es.push((x, y));
            }
        }
    }
    build(es)
}

pub fn flower_snark(k: usize) -> Result<Graph, SpecError> {
    FamilySpec::FlowerSnark { k }.validate()?;
    let mut es = Vec::new();
    for i in 0..k {
        let (a, b, c, d) = (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
        es.extend([(a, b), (a, c), (a, d)]);
        let j = (i + 1) % k;
        es.push((b, 4 * j + 1));
        if i + 1 < k {
            es.push((c, 4 * j + 2));
            es.push((d, 4 * j + 3));
        } else {
            es.push((c, 3));
            es.push((d, 2));
        }
    }
    Ok(build(es))
}

/// Random 3-regular bridgeless graph on `n` vertices.
///
/// Starts from `prism(n/2)` (`K4` when `n == 4`) and attempts `10n` double
/// edge swaps driven by `ChaCha8Rng::seed_from_u64(seed)`. Each attempt draws
/// three `u64` values: `i = x0 % m`, `j = x1 % (m - 1)` bumped past `i`, and
/// the low bit of `x2` choosing between `{ac, bd}` and `{ad, bc}` for the
/// picked edges `ab`, `cd`, where `m` is the edge count and edges are kept in
/// sorted order. Swaps that would create a loop, a parallel edge, a bridge or
/// a disconnection are skipped.
pub fn random_cubic_bridgeless(n: usize, seed: u64) -> Result<Graph, SpecError> {
    FamilySpec::RandomCubic { n, seed }.validate()?;
    if n == 4 {
        return complete(4);
    }
    let mut edges: Vec<Edge> = prism(n / 2)?.edges().to_vec();
    let m = edges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10 * n {
        let i = (rng.next_u64() % m as u64) as usize;
        let mut j = (rng.next_u64() % (m as u64 - 1)) as usize;
        if j >= i {
            j += 1;
        }
        let flip = rng.next_u64() & 1 == 1;
        let (Edge(a, b), Edge(c, d)) = (edges[i], edges[j]);
        let (x, y) = if flip { ((a, d), (b, c)) } else { ((a, c), (b, d)) };
        if x.0 == x.1 || y.0 == y.1 {
            continue;
        }
        let (ex, ey) = (Edge::new(x.0, x.1), Edge::new(y.0, y.1));
        if ex == ey || edges.contains(&ex) || edges.contains(&ey) {
            continue;
        }
        let mut cand: Vec<Edge> = edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, &e)| e)
            .chain([ex, ey])
            .collect();
        cand.sort_unstable();
        let g = build(cand.iter().map(|e| (e.0, e.1)).collect());
        if g.vertex_count() != n || !is_connected(&g) || !find_bridges(&g).is_empty() {
            continue;
        }
        edges = cand;
    }
    Ok(build(edges.iter().map(|e| (e.0, e.1)).collect()))
}

/// The bundled corpus, in order.
pub fn corpus_specs() -> Vec<FamilySpec> {
    corpus_specs_with_seed(1)
}

/// The corpus with random members seeded `first_seed..first_seed + 20` per size.
pub fn corpus_specs_with_seed(first_seed: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for n in 3..=8 {
        out.push(FamilySpec::Complete { n });
    }
    out.push(FamilySpec::Theta { a: 1, b: 2, c: 2 });
    out.push(FamilySpec::Theta { a: 2, b: 2, c: 2 });
    for n in 3..=6 {
        out.push(FamilySpec::Prism { n });
    }
    out.push(FamilySpec::Petersen);
    out.push(FamilySpec::FlowerSnark { k: 5 });
    out.push(FamilySpec::FlowerSnark { k: 7 });
    for n in [8, 10, 12, 14, 16] {
        for seed in first_seed..first_seed + 20 {
            out.push(FamilySpec::RandomCubic { n, seed });
        }
    }
    out
}

pub fn corpus_manifest() -> Vec<(String, Graph)> {
    corpus_specs()
        .iter()
        .map(|s| (s.name(), make(s).expect("corpus specs are valid")))
        .collect()
}
