//! Two-dimensional Δ-complexes: vertex links, boundary surfaces and
//! suspension inputs.
//!
//! Triangle edge `j` is the edge opposite local vertex `j`. As with
//! [`crate::tri::Triangulation`], vertices may be identified beyond what the
//! edge gluings imply, which is how pinch points are represented.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::perm::Perm3;
use crate::tri::VertexLabel;
use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("edge {{{0}}} lies in more than two triangles")]
    EdgeOvershared(String),
    #[error("triangle {0} repeats a vertex label")]
    RepeatedLabel(usize),
    #[error("inconsistent gluing at triangle {tri}, edge {edge}")]
    BadGluing { tri: usize, edge: usize },
}

pub type EdgeGluing = Option<(usize, Perm3)>;

#[derive(Clone, Debug)]
pub struct SurfaceComplex {
    gluings: Vec<[EdgeGluing; 3]>,
    vertex_of: Vec<[usize; 3]>,
    num_vertices: usize,
    labels: Vec<Option<VertexLabel>>,
}

/// One connected component of the normalized surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceComponent {
    pub orientable: bool,
    pub euler: i64,
    pub triangles: Vec<usize>,
}

/// A vertex whose neighbourhood is several cones glued at their apex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pinch {
    pub vertex: usize,
    pub circles: usize,
    /// Normalized component containing each copy of the vertex.
    pub components: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceClassification {
    pub components: Vec<SurfaceComponent>,
    pub pinches: Vec<Pinch>,
    pub euler_raw: i64,
}

impl SurfaceClassification {
    pub fn is_sphere(&self) -> bool {
        self.pinches.is_empty()
            && self.components.len() == 1
            && self.components[0].orientable
            && self.components[0].euler == 2
    }
}

impl SurfaceComplex {
    /// Assembles a complex from per-triangle edge gluings and vertex tags;
    /// corners with equal tags are the same vertex.
    pub fn from_parts(gluings: Vec<[EdgeGluing; 3]>, tags: Vec<[u64; 3]>) -> Result<Self, SurfaceError> {
        let n = gluings.len();
        assert_eq!(tags.len(), n);
        let mut uf = UnionFind::new(3 * n);
        for (s, g) in gluings.iter().enumerate() {
            for j in 0..3 {
                let Some((u, p)) = g[j] else { continue };
                let back = p.apply(j);
                if u >= n || (u == s && back == j) {
                    return Err(SurfaceError::BadGluing { tri: s, edge: j });
                }
                match gluings[u][back] {
                    Some((bs, bp)) if bs == s && bp == p.inverse() => {}
                    _ => return Err(SurfaceError::BadGluing { tri: s, edge: j }),
                }
                for k in 0..3 {
                    if k != j {
                        uf.union(3 * s + k, 3 * u + p.apply(k), false);
                    }
                }
            }
        }
        let mut first: HashMap<u64, usize> = HashMap::new();
        for (s, tag) in tags.iter().enumerate() {
            for k in 0..3 {
                let c = 3 * s + k;
                let f = *first.entry(tag[k]).or_insert(c);
                uf.union(c, f, false);
            }
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut vertex_of = vec![[0usize; 3]; n];
        for s in 0..n {
            for k in 0..3 {
                let root = uf.root(3 * s + k);
                let next = ids.len();
                vertex_of[s][k] = *ids.entry(root).or_insert(next);
            }
        }
        let num_vertices = ids.len();
        Ok(SurfaceComplex {
            gluings,
            vertex_of,
            num_vertices,
            labels: vec![None; num_vertices],
        })
    }

    /// Builds a complex from labelled triangles, gluing triangles that share
    /// a label pair.
    pub fn from_labelled_triangles(tris: &[[VertexLabel; 3]]) -> Result<Self, SurfaceError> {
        let mut ids: BTreeMap<VertexLabel, u64> = BTreeMap::new();
        for t in tris {
            for l in t {
                let next = ids.len() as u64;
                ids.entry(l.clone()).or_insert(next);
            }
        }
        let tags: Vec<[u64; 3]> = tris.iter().map(|t| t.clone().map(|l| ids[&l])).collect();
        let mut edges: BTreeMap<(u64, u64), Vec<(usize, usize)>> = BTreeMap::new();
        for (s, tag) in tags.iter().enumerate() {
            if tag[0] == tag[1] || tag[1] == tag[2] || tag[0] == tag[2] {
                return Err(SurfaceError::RepeatedLabel(s));
            }
            for j in 0..3 {
                let (a, b) = (tag[(j + 1) % 3], tag[(j + 2) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push((s, j));
            }
        }
        let mut gluings = vec![[None; 3]; tris.len()];
        for (key, occ) in &edges {
            if occ.len() > 2 {
                let name = |id: u64| {
                    ids.iter()
                        .find(|(_, &v)| v == id)
                        .map(|(l, _)| l.to_string())
                        .unwrap_or_default()
                };
                return Err(SurfaceError::EdgeOvershared(format!("{},{}", name(key.0), name(key.1))));
            }
            if let [(s, j), (u, k)] = occ[..] {
                let mut q = [0u8; 3];
                for x in 0..3 {
                    q[x] = tags[u].iter().position(|&y| y == tags[s][x]).unwrap_or(k) as u8;
                }
                q[j] = k as u8;
                let p = Perm3::new(q).expect("label correspondence");
                gluings[s][j] = Some((u, p));
                gluings[u][k] = Some((s, p.inverse()));
            }
        }
        let mut out = SurfaceComplex::from_parts(gluings, tags.clone())?;
        for (s, tag) in tags.iter().enumerate() {
            for k in 0..3 {
                let v = out.vertex_of[s][k];
                if out.labels[v].is_none() {
                    out.labels[v] = ids.iter().find(|(_, &id)| id == tag[k]).map(|(l, _)| l.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn num_triangles(&self) -> usize {
        self.gluings.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.gluings
            .iter()
            .flat_map(|g| g.iter())
            .map(|g| if g.is_some() { 1 } else { 2 })
            .sum::<usize>()
            / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|g| g.iter().all(|x| x.is_some()))
    }

    pub fn gluing(&self, tri: usize, edge: usize) -> EdgeGluing {
        self.gluings[tri][edge]
    }

    pub fn vertex_of(&self, tri: usize, corner: usize) -> usize {
        self.vertex_of[tri][corner]
    }

    pub fn label(&self, v: usize) -> Option<&VertexLabel> {
        self.labels.get(v).and_then(|l| l.as_ref())
    }

    pub fn set_label(&mut self, v: usize, label: Option<VertexLabel>) {
        self.labels[v] = label;
    }

    /// Corners around each vertex grouped into fans (cycles of triangles
    /// around the vertex, or open chains at the boundary).
    pub fn fans(&self) -> Vec<Vec<Vec<(usize, usize)>>> {
        let n = self.num_triangles();
        let mut visited = vec![[false; 3]; n];
        let mut out: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); self.num_vertices];
        for s in 0..n {
            for j in 0..3 {
                if visited[s][j] {
                    continue;
                }
                let mut fan = vec![(s, j)];
                visited[s][j] = true;
                let k0 = if j == 0 { 1 } else { 0 };
                let mut closed = false;
                let mut cur = (s, j, k0);
                loop {
                    let (t, a, k) = cur;
                    let m = 3 - a - k;
                    let Some((u, p)) = self.gluings[t][k] else { break };
                    let next = (u, p.apply(a), p.apply(m));
                    if next == (s, j, k0) {
                        closed = true;
                        break;
                    }
                    if visited[next.0][next.1] {
                        break;
                    }
                    visited[next.0][next.1] = true;
                    fan.push((next.0, next.1));
                    cur = next;
                }
                if !closed {
                    let mut back = Vec::new();
                    let mut cur = (s, j, 3 - j - k0);
                    loop {
                        let (t, a, k) = cur;
                        let m = 3 - a - k;
                        let Some((u, p)) = self.gluings[t][k] else { break };
                        let next = (u, p.apply(a), p.apply(m));
                        if visited[next.0][next.1] {
                            break;
                        }
                        visited[next.0][next.1] = true;
                        back.push((next.0, next.1));
                        cur = next;
                    }
                    back.reverse();
                    back.extend(fan);
                    fan = back;
                }
                out[self.vertex_of[s][j]].push(fan);
            }
        }
        out
    }

    /// Connected components of triangles under edge adjacency.
    pub fn edge_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_triangles();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([s]);
            comp[s] = id;
            while let Some(t) = queue.pop_front() {
                members.push(t);
                for g in self.gluings[t].iter().flatten() {
                    if comp[g.0] == usize::MAX {
                        comp[g.0] = id;
                        queue.push_back(g.0);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Whether the triangles in `members` (one edge component) admit a
    /// consistent orientation.
    pub fn component_orientable(&self, members: &[usize]) -> bool {
        let mut sign: HashMap<usize, i32> = HashMap::new();
        let mut queue = VecDeque::new();
        sign.insert(members[0], 1);
        queue.push_back(members[0]);
        while let Some(t) = queue.pop_front() {
            let st = sign[&t];
            for g in self.gluings[t].iter().flatten() {
                let want = -g.1.sign() * st;
                match sign.get(&g.0) {
                    Some(&s) if s != want => return false,
                    Some(_) => {}
                    None => {
                        sign.insert(g.0, want);
                        queue.push_back(g.0);
                    }
                }
            }
        }
        true
    }

    /// Normalizes pinch points and classifies each resulting component by
    /// orientability and Euler characteristic.
    pub fn classify(&self) -> SurfaceClassification {
        let fans = self.fans();
        let comps = self.edge_components();
        let mut comp_of = vec![0usize; self.num_triangles()];
        for (c, members) in comps.iter().enumerate() {
            for &t in members {
                comp_of[t] = c;
            }
        }
        let mut fan_count = vec![0i64; comps.len()];
        let mut pinches = Vec::new();
        for (v, vf) in fans.iter().enumerate() {
            for fan in vf {
                fan_count[comp_of[fan[0].0]] += 1;
            }
            if vf.len() > 1 {
                pinches.push(Pinch {
                    vertex: v,
                    circles: vf.len(),
                    components: vf.iter().map(|fan| comp_of[fan[0].0]).collect(),
                });
            }
        }
        let components = comps
            .iter()
            .enumerate()
            .map(|(c, members)| {
                let mut edge_ends = 0i64;
                for &t in members {
                    for g in &self.gluings[t] {
                        edge_ends += if g.is_some() { 1 } else { 2 };
                    }
                }
                let edges = edge_ends / 2;
                SurfaceComponent {
                    orientable: self.component_orientable(members),
                    euler: fan_count[c] - edges + members.len() as i64,
                    triangles: members.clone(),
                }
            })
            .collect();
        SurfaceClassification {
            components,
            pinches,
            euler_raw: self.euler_characteristic(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(tris: &[[i64; 3]]) -> SurfaceComplex {
        let t: Vec<[VertexLabel; 3]> = tris.iter().map(|t| t.map(VertexLabel::Int)).collect();
        SurfaceComplex::from_labelled_triangles(&t).unwrap()
    }

    fn tetra_boundary() -> SurfaceComplex {
        labelled(&[[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
    }

    #[test]
    fn sphere_classification() {
        let s = tetra_boundary();
        assert!(s.is_closed());
        assert_eq!(s.euler_characteristic(), 2);
        let c = s.classify();
        assert!(c.is_sphere());
        assert_eq!(c.euler_raw, 2);
    }

    #[test]
    fn seven_vertex_torus() {
        let tris: Vec<[i64; 3]> = (0..7)
            .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
            .collect();
        let s = labelled(&tris);
        assert!(s.is_closed());
        assert_eq!(s.num_vertices(), 7);
        assert_eq!(s.num_edges(), 21);
        let c = s.classify();
        assert_eq!(c.components.len(), 1);
        assert!(c.components[0].orientable);
        assert_eq!(c.components[0].euler, 0);
    }

    #[test]
    fn projective_plane_is_nonorientable() {
        // six-vertex RP^2
        let s = labelled(&[
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 5, 1],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 1],
            [4, 5, 2],
            [5, 1, 3],
        ]);
        assert!(s.is_closed());
        let c = s.classify();
        assert_eq!(c.components.len(), 1);
        assert!(!c.components[0].orientable);
        assert_eq!(c.components[0].euler, 1);
    }

    #[test]
    fn two_spheres_sharing_a_vertex() {
        let s = labelled(&[
            [1, 2, 3],
            [0, 2, 3],
            [0, 1, 3],
            [0, 1, 2],
            [0, 5, 6],
            [4, 5, 6],
            [0, 4, 6],
            [0, 4, 5],
        ]);
        let c = s.classify();
        assert_eq!(c.components.len(), 2);
        assert_eq!(c.pinches.len(), 1);
        assert_eq!(c.pinches[0].circles, 2);
        assert!(c.components.iter().all(|x| x.orientable && x.euler == 2));
        let total: i64 = c.components.iter().map(|x| x.euler).sum();
        assert_eq!(total - c.euler_raw, 1);
    }

    #[test]
    fn overshared_edge() {
        let t: Vec<[VertexLabel; 3]> = [[0i64, 1, 2], [0, 1, 3], [0, 1, 4]]
            .iter()
            .map(|t| t.map(VertexLabel::Int))
            .collect();
        assert!(matches!(
            SurfaceComplex::from_labelled_triangles(&t),
            Err(SurfaceError::EdgeOvershared(_))
        ));
    }

    #[test]
    fn open_disk_fans() {
        let s = labelled(&[[0, 1, 2], [0, 2, 3]]);
        assert!(!s.is_closed());
        let fans = s.fans();
        assert!(fans.iter().all(|f| f.len() == 1));
        assert_eq!(s.euler_characteristic(), 1);
    }
}
