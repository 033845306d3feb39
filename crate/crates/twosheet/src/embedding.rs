//! Oriented embeddings as rotation systems.
//!
//! A rotation system fixes, at every vertex, the cyclic order of its
//! neighbors. Faces are the orbits of the rule "arrive at `v` from `u`,
//! leave towards the successor of `u` in the rotation at `v`". Every edge is
//! traversed once in each direction, so the face boundaries always cover
//! each edge exactly twice, though a boundary need not be a cycle.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{is_connected, Edge, Graph, Vertex};
use crate::verify::{verify_cdc, CdcCandidate, VerifyReport};
use crate::walk::canonical_sorted;

pub type Rotation = BTreeMap<Vertex, Vec<Vertex>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("rotation at vertex {0} is not a permutation of its neighbors")]
    Rotation(Vertex),
    #[error("host graph is not connected")]
    Disconnected,
    #[error("complete graphs need k >= 3, got {0}")]
    Domain(usize),
    #[error("K{k} has maximum genus {max}, below the target genus {target}")]
    Unrealizable { k: usize, target: usize, max: usize },
    #[error("no insertion achieves the required face count")]
    NotFound,
}

/// A graph together with a cyclic neighbor order at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    host: Graph,
    rotation: Rotation,
}

impl Serialize for RotationSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rotation.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RotationSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rotation = Rotation::deserialize(d)?;
        RotationSystem::from_rotation(rotation).map_err(serde::de::Error::custom)
    }
}

impl RotationSystem {
    /// Checks that `rotation` orders exactly the neighbors of each vertex of `host`.
    pub fn new(host: Graph, rotation: Rotation) -> Result<RotationSystem, EmbeddingError> {
        for v in host.vertices() {
            let Some(order) = rotation.get(&v) else {
                return Err(EmbeddingError::Rotation(v));
            };
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != host.neighbors(v) {
                return Err(EmbeddingError::Rotation(v));
            }
        }
        if let Some(&v) = rotation.keys().find(|&&v| !host.contains_vertex(v)) {
            return Err(EmbeddingError::Rotation(v));
        }
        Ok(RotationSystem { host, rotation })
    }

    /// Builds the host from the rotation itself; adjacency must be symmetric.
    pub fn from_rotation(rotation: Rotation) -> Result<RotationSystem, EmbeddingError> {
        let mut edges = BTreeSet::new();
        for (&v, order) in &rotation {
            for &w in order {
                if w == v || !rotation.get(&w).is_some_and(|o| o.contains(&v)) {
                    return Err(EmbeddingError::Rotation(v));
                }
                edges.insert(Edge::new(v, w));
            }
        }
        let host = Graph::new(rotation.keys().copied(), edges.iter().map(|e| (e.0, e.1)))
            .map_err(|_| EmbeddingError::Rotation(0))?;
        RotationSystem::new(host, rotation)
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }
}

/// Face boundaries of an embedding with its Euler characteristic and genus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceSet {
    pub faces: Vec<Vec<Vertex>>,
    pub chi: i64,
    pub genus: i64,
}

fn successor(rot: &Rotation, at: Vertex, from: Vertex) -> Vertex {
    let order = &rot[&at];
    let i = order.iter().position(|&x| x == from).expect("neighbor in rotation");
    order[(i + 1) % order.len()]
}

/// Closed boundary walks, starting from the darts in vertex then rotation order.
fn trace(rot: &Rotation) -> Vec<Vec<Vertex>> {
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    for (&v, order) in rot {
        for &w in order {
            if seen.contains(&(v, w)) {
                continue;
            }
            let mut face = vec![v];
            let (mut a, mut b) = (v, w);
            while seen.insert((a, b)) {
                face.push(b);
                let c = successor(rot, b, a);
                a = b;
                b = c;
            }
            faces.push(face);
        }
    }
    faces
}

fn face_count(rot: &Rotation) -> usize {
    trace(rot).len()
}

pub fn face_trace(rs: &RotationSystem) -> Result<FaceSet, EmbeddingError> {
    if !is_connected(&rs.host) {
        return Err(EmbeddingError::Disconnected);
    }
    let faces = trace(&rs.rotation);
    let chi = rs.host.vertex_count() as i64 - rs.host.edge_count() as i64 + faces.len() as i64;
    Ok(FaceSet {
        faces,
        chi,
        genus: (2 - chi) / 2,
    })
}

/// Genus `(k-3)(k-4)/2` and Euler characteristic `2 - (k-3)(k-4)` reached by
/// the inductive embedding of `K(k)`.
pub fn genus_bound(k: usize) -> Result<(i64, i64), EmbeddingError> {
    if k < 3 {
        return Err(EmbeddingError::Domain(k));
    }
    let k = k as i64;
    let p = (k - 3) * (k - 4);
    Ok((p / 2, 2 - p))
}

fn planar_k4() -> Rotation {
    BTreeMap::from([
        (0, vec![1, 2, 3]),
        (1, vec![0, 3, 2]),
        (2, vec![0, 1, 3]),
        (3, vec![0, 2, 1]),
    ])
}

/// Embeds `K(k)` by induction from the planar `K4`.
///
/// Each new vertex goes into one face with three of its edges, which adds
/// two faces. Every other edge is routed as a handle, which removes one face
/// and adds one to the genus. The handles are placed by backtracking over
/// insertion positions.
///
/// For `k >= 9` the target genus exceeds the maximum genus of `K(k)`, the
/// floor of half its cycle rank, so no rotation reaches it.
pub fn inductive_complete_embedding(k: usize) -> Result<RotationSystem, EmbeddingError> {
    let (target, _) = genus_bound(k)?;
    let betti = k * (k - 1) / 2 - k + 1;
    if target as usize > betti / 2 {
        return Err(EmbeddingError::Unrealizable {
            k,
            target: target as usize,
            max: betti / 2,
        });
    }
    let rot = if k == 3 {
        BTreeMap::from([(0, vec![1, 2]), (1, vec![2, 0]), (2, vec![0, 1])])
    } else {
        let mut rot = planar_k4();
        for w in 4..k {
            rot = add_vertex(&rot, w).ok_or(EmbeddingError::NotFound)?;
        }
        rot
    };
    RotationSystem::from_rotation(rot)
}

fn add_vertex(rot: &Rotation, w: Vertex) -> Option<Rotation> {
    let faces = trace(rot);
    let base = faces.len();
    for f in &faces {
        let body = &f[..f.len() - 1];
        let n = body.len();
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let corners = [i, j, l];
                    let vs: Vec<Vertex> = corners.iter().map(|&c| body[c]).collect();
                    if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
                        continue;
                    }
                    let rev: Vec<Vertex> = vs.iter().rev().copied().collect();
                    for order in [vs.clone(), rev] {
                        let mut r = rot.clone();
                        for &c in &corners {
                            let v = body[c];
                            let prev = body[(c + n - 1) % n];
                            let list = r.get_mut(&v).expect("face vertex");
                            let at = list.iter().position(|&x| x == prev).expect("corner");
                            list.insert(at + 1, w);
                        }
                        r.insert(w, order);
                        if face_count(&r) != base + 2 {
                            continue;
                        }
                        let rest: Vec<Vertex> = (0..w).filter(|u| !vs.contains(u)).collect();
                        if let Some(done) = add_handles(r, w, &rest) {
                            return Some(done);
                        }
                    }
                }
            }
        }
    }
    None
}

fn add_handles(rot: Rotation, w: Vertex, rest: &[Vertex]) -> Option<Rotation> {
    let Some((&u, tail)) = rest.split_first() else {
        return Some(rot);
    };
    let base = face_count(&rot);
    for pu in 0..rot[&u].len() {
        for pw in 0..rot[&w].len() {
            let mut r = rot.clone();
            r.get_mut(&u).unwrap().insert(pu + 1, w);
            r.get_mut(&w).unwrap().insert(pw + 1, u);
            if face_count(&r) + 1 == base {
                if let Some(done) = add_handles(r, w, tail) {
                    return Some(done);
                }
            }
        }
    }
    None
}

/// Five boundary walks of a torus embedding of `K5`, written 1-based and
/// shifted to 0-based. The last one is not a cycle.
pub fn k5_torus_faces() -> Vec<Vec<Vertex>> {
    ["4 3 1", "4 2 1", "3 1 5", "1 2 5", "3 2 4 5 2 3 5 4"]
        .iter()
        .map(|s| {
            let mut f: Vec<Vertex> = s.split(' ').map(|x| x.parse::<Vertex>().unwrap() - 1).collect();
            f.push(f[0]);
            f
        })
        .collect()
}

/// A torus embedding of `K5` whose faces are [`k5_torus_faces`].
///
/// Found by [`find_rotation_with_faces`] and frozen.
pub fn k5_torus_fixture() -> RotationSystem {
    RotationSystem::from_rotation(BTreeMap::from([
        (0, vec![1, 3, 2, 4]),
        (1, vec![0, 4, 2, 3]),
        (2, vec![0, 3, 1, 4]),
        (3, vec![0, 1, 4, 2]),
        (4, vec![0, 2, 3, 1]),
    ]))
    .expect("fixture rotation is valid")
}

/// Exhaustive search for a rotation of `g` whose faces match `target` up to
/// rotation and reversal of each walk. Rotations are enumerated with the
/// smallest neighbor first, in lexicographic order; the first hit is returned.
pub fn find_rotation_with_faces(g: &Graph, target: &[Vec<Vertex>]) -> Option<RotationSystem> {
    let want = canonical_sorted(target);
    let vs: Vec<Vertex> = g.vertices().collect();
    let choices: Vec<Vec<Vec<Vertex>>> = vs.iter().map(|&v| cyclic_orders(g.neighbors(v))).collect();
    let mut idx = vec![0usize; vs.len()];
    loop {
        let rot: Rotation = vs
            .iter()
            .zip(&idx)
            .enumerate()
            .map(|(k, (&v, &i))| (v, choices[k][i].clone()))
            .collect();
        if canonical_sorted(trace(&rot)) == want {
            return RotationSystem::new(g.clone(), rot).ok();
        }
        // odometer, last vertex fastest
        let mut k = vs.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// All cyclic orders of `nbrs`, each written from its smallest element.
fn cyclic_orders(nbrs: &[Vertex]) -> Vec<Vec<Vertex>> {
    let Some((&first, rest)) = nbrs.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    let mut perm = rest.to_vec();
    permutations(&mut perm, 0, &mut |p| {
        let mut o = vec![first];
        o.extend_from_slice(p);
        out.push(o);
    });
    out.sort();
    out
}

fn permutations(xs: &mut [Vertex], k: usize, f: &mut dyn FnMut(&[Vertex])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permutations(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Treats the face boundaries as a cycle double cover candidate.
pub fn faces_as_cdc(host: &Graph, fs: &FaceSet) -> VerifyReport {
    verify_cdc(
        host,
        &CdcCandidate {
            cycles: fs.faces.clone(),
        },
    )
}

/// Edges a closed walk traverses more than once.
pub fn repeated_edges(walk: &[Vertex]) -> BTreeSet<Edge> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    for w in walk.windows(2) {
        let e = Edge::new(w[0], w[1]);
        if !seen.insert(e) {
            out.insert(e);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle};
    use crate::walk::{classify_seq, WalkKind};

    #[test]
    fn planar_k4_faces() {
        let rs = inductive_complete_embedding(4).unwrap();
        let fs = face_trace(&rs).unwrap();
        assert_eq!(fs.faces.len(), 4);
        assert!(fs.faces.iter().all(|f| f.len() == 4));
        assert_eq!((fs.chi, fs.genus), (2, 0));
        assert!(faces_as_cdc(rs.host(), &fs).ok);
    }

    #[test]
    fn small_cases() {
        let tri = RotationSystem::new(
            complete(3).unwrap(),
            BTreeMap::from([(0, vec![2, 1]), (1, vec![0, 2]), (2, vec![0, 1])]),
        )
        .unwrap();
        let fs = face_trace(&tri).unwrap();
        assert_eq!((fs.faces.len(), fs.chi), (2, 2));

        let c5 = cycle(5).unwrap();
        let rot = c5.vertices().map(|v| (v, c5.neighbors(v).to_vec())).collect();
        let rs = RotationSystem::new(c5.clone(), rot).unwrap();
        let fs = face_trace(&rs).unwrap();
        assert_eq!(fs.faces.len(), 2);
        assert!(faces_as_cdc(&c5, &fs).ok);
    }

    #[test]
    fn bad_rotations() {
        let k3 = complete(3).unwrap();
        let bad = BTreeMap::from([(0, vec![1]), (1, vec![0, 2]), (2, vec![0, 1])]);
        assert_eq!(RotationSystem::new(k3, bad.clone()), Err(EmbeddingError::Rotation(0)));
        assert!(RotationSystem::from_rotation(bad).is_err());
        assert_eq!(genus_bound(2), Err(EmbeddingError::Domain(2)));
        assert!(matches!(
            inductive_complete_embedding(9),
            Err(EmbeddingError::Unrealizable {
                k: 9,
                target: 15,
                max: 14
            })
        ));
    }

    #[test]
    fn bounds() {
        assert_eq!(genus_bound(3).unwrap(), (0, 2));
        assert_eq!(genus_bound(5).unwrap(), (1, 0));
        assert_eq!(genus_bound(8).unwrap(), (10, -18));
    }

    #[test]
    fn inductive_table() {
        for k in 3..=8 {
            let rs = inductive_complete_embedding(k).unwrap();
            assert_eq!(rs.host(), &complete(k).unwrap());
            let fs = face_trace(&rs).unwrap();
            assert_eq!((fs.genus, fs.chi), genus_bound(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn k5_torus_face_set() {
        let rs = k5_torus_fixture();
        let fs = face_trace(&rs).unwrap();
        assert_eq!((fs.faces.len(), fs.chi, fs.genus), (5, 0, 1));
        assert_eq!(canonical_sorted(&fs.faces), canonical_sorted(k5_torus_faces()));
        let report = faces_as_cdc(rs.host(), &fs);
        assert!(!report.ok);
        assert_eq!(report.malformed.len(), 1);
        let long = &fs.faces[report.malformed[0]];
        assert_eq!(long.len(), 9);
        assert_ne!(classify_seq(long), WalkKind::Cycle);
        assert_eq!(repeated_edges(long), BTreeSet::from([Edge(3, 4), Edge(1, 2)]));
        assert_eq!(report.histogram, BTreeMap::from([(2, 10)]));
    }

    #[test]
    fn fixture_search_reproduces_constant() {
        let found = find_rotation_with_faces(&complete(5).unwrap(), &k5_torus_faces()).unwrap();
        assert_eq!(found, k5_torus_fixture());
    }

    #[test]
    fn json_round_trip() {
        let rs = k5_torus_fixture();
        let text = serde_json::to_string(&rs).unwrap();
        assert_eq!(
            text,
            r#"{"0":[1,3,2,4],"1":[0,4,2,3],"2":[0,3,1,4],"3":[0,1,4,2],"4":[0,2,3,1]}"#
        );
        let back: RotationSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rs);
    }
}
