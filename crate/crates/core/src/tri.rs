//! Generalized (Δ-complex) triangulations of 3-complexes.
//!
//! A [`Triangulation`] is a list of tetrahedra whose faces are glued in pairs
//! by slot permutations, plus optional extra identifications of vertices and
//! edges. The extra identifications are what allow pinched vertices and edges
//! with several link circles, neither of which can arise from face gluings
//! alone. All derived class data is computed eagerly at construction and the
//! value is immutable afterwards.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{edge_index, face_slots, Perm3, Perm4, EDGE_SLOTS};
use crate::surface::SurfaceComplex;
use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("vertex triple {0} is shared by three or more tetrahedra")]
    TripleOvershared(String),
    #[error("tetrahedron {0} repeats a vertex label")]
    RepeatedLabel(usize),
    #[error("gluing references slot (tet {tet}, face {face}) which does not exist")]
    SlotOutOfRange { tet: usize, face: usize },
    #[error("face slot (tet {tet}, face {face}) is glued more than once")]
    SlotReused { tet: usize, face: usize },
    #[error("face slot (tet {tet}, face {face}) is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },
    #[error("gluing permutation at (tet {tet}, face {face}) is not a face correspondence")]
    BadPermutation { tet: usize, face: usize },
    #[error("vertex class {0} does not exist")]
    InvalidVertex(usize),
    #[error("edge class {0} does not exist")]
    InvalidEdge(usize),
    #[error("complex is not closed")]
    ComplexNotClosed,
}

/// A user-facing vertex label as it appears in input files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexLabel {
    Int(i64),
    Name(String),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Int(i) => write!(f, "{i}"),
            VertexLabel::Name(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for VertexLabel {
    fn from(v: i64) -> Self {
        VertexLabel::Int(v)
    }
}

impl From<&str> for VertexLabel {
    fn from(v: &str) -> Self {
        VertexLabel::Name(v.to_string())
    }
}

/// Identification tag for a tetrahedron edge. Tet edges with equal `id` are
/// the same edge of the complex; `reversed` records whether the tet edge,
/// read from its lower slot to its higher slot, runs against the tag's
/// reference direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeTag {
    pub id: u32,
    pub reversed: bool,
}

pub type Gluing = Option<(usize, Perm4)>;

/// Mutable, unchecked description of a triangulation. Tags are generators of
/// identifications: corners with equal vertex tags are one vertex, tet edges
/// with equal edge tags one edge, on top of what the gluings imply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTet {
    pub gluings: [Gluing; 4],
    pub vertex_tags: [u32; 4],
    pub edge_tags: [EdgeTag; 6],
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawTriangulation {
    pub tets: Vec<RawTet>,
    /// Labels keyed by vertex tag.
    pub labels: BTreeMap<u32, VertexLabel>,
}

impl RawTriangulation {
    /// `n` tetrahedra with no gluings and fresh (pairwise distinct) tags.
    pub fn with_fresh_tets(n: usize) -> Self {
        let tets = (0..n)
            .map(|t| RawTet {
                gluings: [None; 4],
                vertex_tags: std::array::from_fn(|s| (4 * t + s) as u32),
                edge_tags: std::array::from_fn(|e| EdgeTag {
                    id: (6 * t + e) as u32,
                    reversed: false,
                }),
            })
            .collect();
        RawTriangulation {
            tets,
            labels: BTreeMap::new(),
        }
    }

    /// Glues face `f` of `t` to face `perm(f)` of `u`, setting both sides.
    pub fn glue(&mut self, t: usize, f: usize, u: usize, perm: Perm4) {
        self.tets[t].gluings[f] = Some((u, perm));
        self.tets[u].gluings[perm.apply(f)] = Some((t, perm.inverse()));
    }
}

/// One tet-edge occurrence along an edge link: tetrahedron, edge index into
/// [`EDGE_SLOTS`], and the edge's slots ordered along the class reference
/// direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinkEntry {
    pub tet: usize,
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
}

/// Link data of one edge class: its tet-edge slots decomposed into the
/// orbits of rotation across glued faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClassInfo {
    pub edge: usize,
    pub slots: Vec<(usize, usize)>,
    pub circles: Vec<Vec<LinkEntry>>,
    pub arcs: Vec<Vec<LinkEntry>>,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    gluings: Vec<[Gluing; 4]>,
    vertex_of: Vec<[usize; 4]>,
    edge_of: Vec<[usize; 6]>,
    edge_rev: Vec<[bool; 6]>,
    face_of: Vec<[usize; 4]>,
    vertex_slots: Vec<Vec<(usize, usize)>>,
    edge_slots: Vec<Vec<(usize, usize)>>,
    face_slots: Vec<Vec<(usize, usize)>>,
    edge_ends: Vec<(usize, usize)>,
    self_reversed: Vec<usize>,
    links: Vec<EdgeClassInfo>,
    circle_of: Vec<[usize; 6]>,
    labels: Vec<Option<VertexLabel>>,
}

impl Triangulation {
    /// Ingests a simplicial complex given as 4-tuples of vertex labels. Faces
    /// sharing a vertex triple are glued by the induced vertex
    /// correspondence; equal labels are one vertex and equal label pairs one
    /// edge.
    pub fn from_vertex_tuples<L>(tuples: &[[L; 4]]) -> Result<Triangulation, TriError>
    where
        L: Clone + Into<VertexLabel>,
    {
        let labelled: Vec<[VertexLabel; 4]> = tuples
            .iter()
            .map(|t| std::array::from_fn(|i| t[i].clone().into()))
            .collect();
        Self::build_from_vertex_tuples(&labelled)
    }

    pub fn build_from_vertex_tuples(tuples: &[[VertexLabel; 4]]) -> Result<Triangulation, TriError> {
        let mut ids: BTreeMap<VertexLabel, u32> = BTreeMap::new();
        for tup in tuples {
            for l in tup {
                let next = ids.len() as u32;
                ids.entry(l.clone()).or_insert(next);
            }
        }
        let mut raw = RawTriangulation::with_fresh_tets(tuples.len());
        let mut pair_ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut faces: BTreeMap<[u32; 3], Vec<(usize, usize)>> = BTreeMap::new();
        for (t, tup) in tuples.iter().enumerate() {
            let v: [u32; 4] = std::array::from_fn(|i| ids[&tup[i]]);
            for i in 0..4 {
                for j in i + 1..4 {
                    if v[i] == v[j] {
                        return Err(TriError::RepeatedLabel(t));
                    }
                }
            }
            raw.tets[t].vertex_tags = v;
            for (e, &(a, b)) in EDGE_SLOTS.iter().enumerate() {
                let key = (v[a].min(v[b]), v[a].max(v[b]));
                let next = pair_ids.len() as u32;
                let id = *pair_ids.entry(key).or_insert(next);
                raw.tets[t].edge_tags[e] = EdgeTag {
                    id,
                    reversed: v[a] > v[b],
                };
            }
            for f in 0..4 {
                let mut key: [u32; 3] = face_slots(f).map(|s| v[s]);
                key.sort_unstable();
                faces.entry(key).or_default().push((t, f));
            }
        }
        for (key, occ) in &faces {
            if occ.len() > 2 {
                let names: Vec<String> = key
                    .iter()
                    .map(|&k| {
                        ids.iter()
                            .find(|(_, &id)| id == k)
                            .map(|(l, _)| l.to_string())
                            .unwrap_or_default()
                    })
                    .collect();
                return Err(TriError::TripleOvershared(format!("{{{}}}", names.join(","))));
            }
            if let [(t, f), (u, g)] = occ[..] {
                let vt = raw.tets[t].vertex_tags;
                let vu = raw.tets[u].vertex_tags;
                let mut p = [0u8; 4];
                p[f] = g as u8;
                for s in face_slots(f) {
                    let target = vu.iter().position(|&x| x == vt[s]).expect("shared vertex");
                    p[s] = target as u8;
                }
                let perm = Perm4::new(p).expect("bijection of slots");
                raw.glue(t, f, u, perm);
            }
        }
        raw.labels = ids.into_iter().map(|(l, id)| (id, l)).collect();
        Triangulation::from_raw(&raw)
    }

    /// Builds a Δ-complex from explicit gluings `(tet, face, other_tet,
    /// other_face, perm)`; `perm` maps slots of `tet` to slots of
    /// `other_tet`. Listing a pair in both directions is accepted when the two
    /// entries agree.
    pub fn build_from_gluings(
        tet_count: usize,
        gluings: &[(usize, usize, usize, usize, Perm4)],
    ) -> Result<Triangulation, TriError> {
        let raw = raw_from_gluings(tet_count, gluings)?;
        Triangulation::from_raw(&raw)
    }

    /// Checks a raw description and computes all derived class data.
    pub fn from_raw(raw: &RawTriangulation) -> Result<Triangulation, TriError> {
        let n = raw.tets.len();
        let gluings: Vec<[Gluing; 4]> = raw.tets.iter().map(|t| t.gluings).collect();
        for (t, g) in gluings.iter().enumerate() {
            for f in 0..4 {
                if let Some((u, p)) = g[f] {
                    if u >= n {
                        return Err(TriError::SlotOutOfRange { tet: u, face: p.apply(f) });
                    }
                    let back_face = p.apply(f);
                    if u == t && back_face == f {
                        return Err(TriError::SelfGluedFace { tet: t, face: f });
                    }
                    match gluings[u][back_face] {
                        Some((bt, bp)) if bt == t && bp == p.inverse() => {}
                        Some(_) => return Err(TriError::SlotReused { tet: u, face: back_face }),
                        None => return Err(TriError::BadPermutation { tet: t, face: f }),
                    }
                }
            }
        }

        let mut vuf = UnionFind::new(4 * n);
        let mut euf = UnionFind::new(6 * n);
        let mut conflicts = Vec::new();
        for (t, g) in gluings.iter().enumerate() {
            for f in 0..4 {
                let Some((u, p)) = g[f] else { continue };
                for s in face_slots(f) {
                    vuf.union(4 * t + s, 4 * u + p.apply(s), false);
                }
                for (e, &(a, b)) in EDGE_SLOTS.iter().enumerate() {
                    if a == f || b == f {
                        continue;
                    }
                    let (pa, pb) = (p.apply(a), p.apply(b));
                    if !euf.union(6 * t + e, 6 * u + edge_index(pa, pb), pa > pb) {
                        conflicts.push(6 * t + e);
                    }
                }
            }
        }
        let mut first_vtag: HashMap<u32, usize> = HashMap::new();
        let mut first_etag: HashMap<u32, (usize, bool)> = HashMap::new();
        for (t, tet) in raw.tets.iter().enumerate() {
            for s in 0..4 {
                let c = 4 * t + s;
                let first = *first_vtag.entry(tet.vertex_tags[s]).or_insert(c);
                vuf.union(c, first, false);
            }
            for e in 0..6 {
                let x = 6 * t + e;
                let tag = tet.edge_tags[e];
                let (first, frev) = *first_etag.entry(tag.id).or_insert((x, tag.reversed));
                if !euf.union(x, first, tag.reversed ^ frev) {
                    conflicts.push(x);
                }
            }
        }

        // number classes by first occurrence
        let mut vertex_of = vec![[0usize; 4]; n];
        let mut vertex_slots: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut vid: HashMap<usize, usize> = HashMap::new();
        for t in 0..n {
            for s in 0..4 {
                let root = vuf.root(4 * t + s);
                let next = vid.len();
                let id = *vid.entry(root).or_insert(next);
                if id == vertex_slots.len() {
                    vertex_slots.push(Vec::new());
                }
                vertex_of[t][s] = id;
                vertex_slots[id].push((t, s));
            }
        }

        let mut edge_of = vec![[0usize; 6]; n];
        let mut edge_rev = vec![[false; 6]; n];
        let mut edge_slots: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut eid: HashMap<usize, (usize, bool)> = HashMap::new();
        for t in 0..n {
            for e in 0..6 {
                let (root, par) = euf.find(6 * t + e);
                let next = eid.len();
                let (id, ref_par) = *eid.entry(root).or_insert((next, par));
                if id == edge_slots.len() {
                    edge_slots.push(Vec::new());
                }
                edge_of[t][e] = id;
                edge_rev[t][e] = par ^ ref_par;
                edge_slots[id].push((t, e));
            }
        }
        let mut self_reversed: Vec<usize> = conflicts
            .iter()
            .map(|&x| edge_of[x / 6][x % 6])
            .collect();
        self_reversed.sort_unstable();
        self_reversed.dedup();

        let edge_ends = edge_slots
            .iter()
            .map(|occ| {
                let (t, e) = occ[0];
                let (a, b) = EDGE_SLOTS[e];
                let (a, b) = if edge_rev[t][e] { (b, a) } else { (a, b) };
                (vertex_of[t][a], vertex_of[t][b])
            })
            .collect();

        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut face_slots_v: Vec<Vec<(usize, usize)>> = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                if face_of[t][f] != usize::MAX {
                    continue;
                }
                let id = face_slots_v.len();
                face_of[t][f] = id;
                let mut occ = vec![(t, f)];
                if let Some((u, p)) = gluings[t][f] {
                    let g = p.apply(f);
                    face_of[u][g] = id;
                    occ.push((u, g));
                }
                face_slots_v.push(occ);
            }
        }

        let mut labels: Vec<Option<VertexLabel>> = vec![None; vertex_slots.len()];
        for (t, tet) in raw.tets.iter().enumerate() {
            for s in 0..4 {
                let v = vertex_of[t][s];
                if labels[v].is_none() {
                    if let Some(l) = raw.labels.get(&tet.vertex_tags[s]) {
                        labels[v] = Some(l.clone());
                    }
                }
            }
        }

        let mut tri = Triangulation {
            gluings,
            vertex_of,
            edge_of,
            edge_rev,
            face_of,
            vertex_slots,
            edge_slots,
            face_slots: face_slots_v,
            edge_ends,
            self_reversed,
            links: Vec::new(),
            circle_of: vec![[0; 6]; n],
            labels,
        };
        tri.compute_edge_links();
        Ok(tri)
    }

    fn compute_edge_links(&mut self) {
        let mut links = Vec::with_capacity(self.edge_slots.len());
        for e in 0..self.edge_slots.len() {
            links.push(self.orbit_decomposition(e));
        }
        for info in &links {
            for (ci, circle) in info.circles.iter().chain(info.arcs.iter()).enumerate() {
                for entry in circle {
                    self.circle_of[entry.tet][entry.edge] = ci;
                }
            }
        }
        self.links = links;
    }

    /// One rotation step around an edge: leaving tet `t` (edge slots `a`,
    /// `b`) through the face opposite `x`.
    fn rotate(&self, t: usize, a: usize, b: usize, x: usize) -> Option<(usize, usize, usize, usize)> {
        let y = 6 - a - b - x;
        let (u, p) = self.gluings[t][x]?;
        Some((u, p.apply(a), p.apply(b), p.apply(y)))
    }

    fn orbit_decomposition(&self, e: usize) -> EdgeClassInfo {
        let slots = self.edge_slots[e].clone();
        let mut visited: HashMap<(usize, usize), ()> = HashMap::new();
        let mut circles = Vec::new();
        let mut arcs = Vec::new();
        let entry = |t: usize, a: usize, b: usize| LinkEntry {
            tet: t,
            edge: edge_index(a, b),
            tail: a,
            head: b,
        };
        for &(t0, e0) in &slots {
            if visited.contains_key(&(t0, e0)) {
                continue;
            }
            let (a0, b0) = EDGE_SLOTS[e0];
            let (a0, b0) = if self.edge_rev[t0][e0] { (b0, a0) } else { (a0, b0) };
            let x0 = (0..4).find(|&s| s != a0 && s != b0).expect("tetrahedron has 4 slots");
            let start = (t0, a0, b0, x0);
            let mut seq = vec![entry(t0, a0, b0)];
            visited.insert((t0, e0), ());
            let mut cur = start;
            let mut closed = false;
            // bounded by the number of rotation states
            for _ in 0..=4 * slots.len() + 4 {
                match self.rotate(cur.0, cur.1, cur.2, cur.3) {
                    None => break,
                    Some(next) => {
                        if next == start {
                            closed = true;
                            break;
                        }
                        seq.push(entry(next.0, next.1, next.2));
                        visited.insert((next.0, edge_index(next.1, next.2)), ());
                        cur = next;
                    }
                }
            }
            if closed {
                circles.push(seq);
                continue;
            }
            // open orbit: walk backwards from the start through the other face
            let y0 = 6 - a0 - b0 - x0;
            let mut back = Vec::new();
            let mut cur = (t0, a0, b0, y0);
            while let Some(next) = self.rotate(cur.0, cur.1, cur.2, cur.3) {
                let key = (next.0, edge_index(next.1, next.2));
                if visited.contains_key(&key) {
                    break;
                }
                back.push(entry(next.0, next.1, next.2));
                visited.insert(key, ());
                cur = next;
            }
            back.reverse();
            back.extend(seq);
            arcs.push(back);
        }
        EdgeClassInfo {
            edge: e,
            slots,
            circles,
            arcs,
        }
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.gluings.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_slots.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_slots.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_slots.len()
    }

    /// V - E + F - T over classes.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
            - self.num_tetrahedra() as i64
    }

    pub fn gluing(&self, tet: usize, face: usize) -> Gluing {
        self.gluings[tet][face]
    }

    pub fn vertex_of(&self, tet: usize, slot: usize) -> usize {
        self.vertex_of[tet][slot]
    }

    /// Edge class of tet edge `edge` (index into [`EDGE_SLOTS`]).
    pub fn edge_of(&self, tet: usize, edge: usize) -> usize {
        self.edge_of[tet][edge]
    }

    /// Whether the tet edge runs against its class's reference direction.
    pub fn edge_reversed(&self, tet: usize, edge: usize) -> bool {
        self.edge_rev[tet][edge]
    }

    pub fn face_of(&self, tet: usize, face: usize) -> usize {
        self.face_of[tet][face]
    }

    pub fn vertex_slots(&self, v: usize) -> &[(usize, usize)] {
        &self.vertex_slots[v]
    }

    pub fn edge_slots(&self, e: usize) -> &[(usize, usize)] {
        &self.edge_slots[e]
    }

    pub fn face_slots(&self, f: usize) -> &[(usize, usize)] {
        &self.face_slots[f]
    }

    /// Vertex classes at the tail and head of the edge's reference direction.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        self.edge_ends[e]
    }

    /// Index of the link circle (or arc, numbered after the circles) of the
    /// edge class that contains this tet edge.
    pub fn circle_of(&self, tet: usize, edge: usize) -> usize {
        self.circle_of[tet][edge]
    }

    /// Edge classes identified with themselves in reverse.
    pub fn self_reversed_edges(&self) -> &[usize] {
        &self.self_reversed
    }

    pub fn label(&self, v: usize) -> Option<&VertexLabel> {
        self.labels.get(v).and_then(|l| l.as_ref())
    }

    pub fn has_labels(&self) -> bool {
        self.labels.iter().any(|l| l.is_some())
    }

    /// Display name of a vertex class: its label if any, else `v<id>`.
    pub fn vertex_name(&self, v: usize) -> String {
        match self.label(v) {
            Some(l) => l.to_string(),
            None => format!("v{v}"),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|g| g.iter().all(|x| x.is_some()))
    }

    /// Unglued `(tet, face)` slots in index order.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, g) in self.gluings.iter().enumerate() {
            for (f, x) in g.iter().enumerate() {
                if x.is_none() {
                    out.push((t, f));
                }
            }
        }
        out
    }

    /// Link data of an edge class.
    pub fn edge_link(&self, e: usize) -> Result<&EdgeClassInfo, TriError> {
        self.links.get(e).ok_or(TriError::InvalidEdge(e))
    }

    pub fn edge_links(&self) -> &[EdgeClassInfo] {
        &self.links
    }

    /// The link of a vertex class as a closed 2-complex whose triangles are
    /// the tet corners at the vertex (in the order of [`Self::vertex_slots`]).
    /// Link vertices are the incident edge ends, so an edge with several link
    /// circles shows up as a pinch point.
    pub fn vertex_link(&self, v: usize) -> Result<SurfaceComplex, TriError> {
        if v >= self.num_vertices() {
            return Err(TriError::InvalidVertex(v));
        }
        if !self.is_closed() {
            return Err(TriError::ComplexNotClosed);
        }
        Ok(self.vertex_link_unchecked(v))
    }

    pub(crate) fn vertex_link_unchecked(&self, v: usize) -> SurfaceComplex {
        let corners = &self.vertex_slots[v];
        let index: HashMap<(usize, usize), usize> =
            corners.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut tri_gluings = Vec::with_capacity(corners.len());
        let mut tags = Vec::with_capacity(corners.len());
        for &(t, a) in corners {
            let others = face_slots(a);
            let mut g: [Option<(usize, Perm3)>; 3] = [None; 3];
            let mut tag = [0u64; 3];
            for j in 0..3 {
                let s = others[j];
                let ei = edge_index(a, s);
                // which end of the edge class this corner sits on
                let forward = (a < s) ^ self.edge_rev[t][ei];
                tag[j] = 2 * self.edge_of[t][ei] as u64 + if forward { 0 } else { 1 };
                if let Some((u, p)) = self.gluings[t][s] {
                    let pa = p.apply(a);
                    let partner = index[&(u, pa)];
                    let uo = face_slots(pa);
                    let mut q = [0u8; 3];
                    for k in 0..3 {
                        let img = p.apply(others[k]);
                        q[k] = uo.iter().position(|&x| x == img).expect("slot maps into face") as u8;
                    }
                    g[j] = Some((partner, Perm3::new(q).expect("bijection")));
                }
            }
            tri_gluings.push(g);
            tags.push(tag);
        }
        SurfaceComplex::from_parts(tri_gluings, tags).expect("vertex link is consistent")
    }

    /// Raw description whose tags are the current class ids, suitable for
    /// editing by moves and constructions.
    pub fn to_raw(&self) -> RawTriangulation {
        let tets = (0..self.num_tetrahedra())
            .map(|t| RawTet {
                gluings: self.gluings[t],
                vertex_tags: self.vertex_of[t].map(|v| v as u32),
                edge_tags: std::array::from_fn(|e| EdgeTag {
                    id: self.edge_of[t][e] as u32,
                    reversed: self.edge_rev[t][e],
                }),
            })
            .collect();
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.clone().map(|l| (v as u32, l)))
            .collect();
        RawTriangulation { tets, labels }
    }

    /// Renumbers tetrahedra (`tet_perm[old] = new`) and relabels each
    /// tetrahedron's slots (`slot_perms[old]` maps old slots to new ones).
    pub fn relabel(&self, tet_perm: &[usize], slot_perms: &[Perm4]) -> Triangulation {
        let n = self.num_tetrahedra();
        assert_eq!(tet_perm.len(), n);
        assert_eq!(slot_perms.len(), n);
        let raw = self.to_raw();
        let mut out = RawTriangulation::with_fresh_tets(n);
        out.labels = raw.labels.clone();
        for t in 0..n {
            let nt = tet_perm[t];
            let sigma = slot_perms[t];
            for s in 0..4 {
                out.tets[nt].vertex_tags[sigma.apply(s)] = raw.tets[t].vertex_tags[s];
            }
            for (e, &(a, b)) in EDGE_SLOTS.iter().enumerate() {
                let (na, nb) = (sigma.apply(a), sigma.apply(b));
                let tag = raw.tets[t].edge_tags[e];
                out.tets[nt].edge_tags[edge_index(na, nb)] = EdgeTag {
                    id: tag.id,
                    reversed: tag.reversed ^ (na > nb),
                };
            }
            for f in 0..4 {
                out.tets[nt].gluings[sigma.apply(f)] = raw.tets[t].gluings[f].map(|(u, p)| {
                    (tet_perm[u], slot_perms[u].compose(p).compose(sigma.inverse()))
                });
            }
        }
        Triangulation::from_raw(&out).expect("relabeling preserves validity")
    }

    /// Disjoint union; the tetrahedra of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Triangulation) -> Triangulation {
        let mut raw = self.to_raw();
        let other_raw = other.to_raw();
        let n = raw.tets.len();
        let voff = self.num_vertices() as u32;
        let eoff = self.num_edges() as u32;
        for tet in other_raw.tets {
            raw.tets.push(RawTet {
                gluings: tet.gluings.map(|g| g.map(|(u, p)| (u + n, p))),
                vertex_tags: tet.vertex_tags.map(|v| v + voff),
                edge_tags: tet.edge_tags.map(|t| EdgeTag {
                    id: t.id + eoff,
                    reversed: t.reversed,
                }),
            });
        }
        for (v, l) in other_raw.labels {
            raw.labels.insert(v + voff, l);
        }
        Triangulation::from_raw(&raw).expect("disjoint union of valid complexes")
    }
}

/// Raw triangulation with fresh tags and the given gluing list.
pub fn raw_from_gluings(
    tet_count: usize,
    gluings: &[(usize, usize, usize, usize, Perm4)],
) -> Result<RawTriangulation, TriError> {
    let mut raw = RawTriangulation::with_fresh_tets(tet_count);
    for &(t, f, u, g, p) in gluings {
        if t >= tet_count || f > 3 {
            return Err(TriError::SlotOutOfRange { tet: t, face: f });
        }
        if u >= tet_count || g > 3 {
            return Err(TriError::SlotOutOfRange { tet: u, face: g });
        }
        if p.apply(f) != g {
            return Err(TriError::BadPermutation { tet: t, face: f });
        }
        if t == u && f == g {
            return Err(TriError::SelfGluedFace { tet: t, face: f });
        }
        let fwd = Some((u, p));
        let back = Some((t, p.inverse()));
        let here = raw.tets[t].gluings[f];
        let there = raw.tets[u].gluings[g];
        if here == fwd && there == back {
            continue;
        }
        if here.is_some() {
            return Err(TriError::SlotReused { tet: t, face: f });
        }
        if there.is_some() {
            return Err(TriError::SlotReused { tet: u, face: g });
        }
        raw.glue(t, f, u, p);
    }
    Ok(raw)
}
