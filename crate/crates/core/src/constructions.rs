//! Pseudomanifold constructions: coning off boundary components, point
//! identifications, suspensions, simplicial mapping cylinders of
//! torus-to-circle maps, and a small library of seed complexes.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::perm::{edge_index, face_slots, Perm3, Perm4, EDGE_SLOTS};
use crate::surface::SurfaceComplex;
use crate::tri::{EdgeTag, RawTet, RawTriangulation, Triangulation, VertexLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("complex has no boundary")]
    NotBoundary,
    #[error("invalid partition of boundary components: {0}")]
    PartitionInvalid(String),
    #[error("vertex class {0} does not exist")]
    InvalidVertex(usize),
    #[error("vertex class {0} appears in more than one group")]
    OverlappingGroups(usize),
    #[error("2-complex is not closed")]
    NotClosedSurfaceComplex,
    #[error("boundary component {0} is not a torus")]
    NotTorusBoundary(usize),
    #[error("boundary component {component} is not grid compatible: {reason}")]
    GridIncompatible { component: usize, reason: String },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("unknown example {0:?}")]
    UnknownExample(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryComponent {
    /// Indices into [`BoundaryComponentMap::faces`].
    pub triangles: Vec<usize>,
    pub orientable: bool,
    pub euler: i64,
}

/// The boundary surface: one triangle per unglued face slot, with corner `k`
/// of triangle `i` at slot `face_slots(faces[i].1)[k]`.
#[derive(Clone, Debug)]
pub struct BoundaryComponentMap {
    pub faces: Vec<(usize, usize)>,
    pub surface: SurfaceComplex,
    pub components: Vec<BoundaryComponent>,
}

/// From the tet edge `(a, b)` of boundary face `(tet, face)`, rotates
/// through the interior to the next boundary face around that edge.
fn next_boundary_face(t: &Triangulation, tet: usize, face: usize, a: usize, b: usize) -> (usize, usize, usize, usize) {
    let (mut t0, mut a0, mut b0) = (tet, a, b);
    let mut x = 6 - a - b - face;
    while let Some((u, p)) = t.gluing(t0, x) {
        let y = 6 - a0 - b0 - x;
        t0 = u;
        a0 = p.apply(a0);
        b0 = p.apply(b0);
        x = p.apply(y);
    }
    (t0, x, a0, b0)
}

pub fn boundary_components(t: &Triangulation) -> BoundaryComponentMap {
    let faces = t.boundary_faces();
    let index: HashMap<(usize, usize), usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut gluings = Vec::with_capacity(faces.len());
    let mut tags = Vec::with_capacity(faces.len());
    for &(tet, face) in &faces {
        let corners = face_slots(face);
        let mut g = [None; 3];
        for j in 0..3 {
            let (a, b) = (corners[(j + 1) % 3], corners[(j + 2) % 3]);
            let (u, x, ua, ub) = next_boundary_face(t, tet, face, a, b);
            let uc = face_slots(x);
            let pos = |s: usize| uc.iter().position(|&c| c == s).expect("slot in face") as u8;
            let mut q = [0u8; 3];
            q[(j + 1) % 3] = pos(ua);
            q[(j + 2) % 3] = pos(ub);
            q[j] = 3 - q[(j + 1) % 3] - q[(j + 2) % 3];
            g[j] = Some((index[&(u, x)], Perm3::new(q).expect("corner bijection")));
        }
        gluings.push(g);
        tags.push(corners.map(|s| t.vertex_of(tet, s) as u64));
    }
    let surface = SurfaceComplex::from_parts(gluings, tags).expect("boundary surface is consistent");
    let cls = surface.classify();
    let components = cls
        .components
        .iter()
        .map(|c| BoundaryComponent {
            triangles: c.triangles.clone(),
            orientable: c.orientable,
            euler: c.euler,
        })
        .collect();
    BoundaryComponentMap {
        faces,
        surface,
        components,
    }
}

/// Cones each group of boundary components to its own new apex.
pub fn cone_boundary(t: &Triangulation, groups: &[Vec<usize>]) -> Result<Triangulation, ConstructionError> {
    let bmap = boundary_components(t);
    if bmap.faces.is_empty() {
        return Err(ConstructionError::NotBoundary);
    }
    let nc = bmap.components.len();
    let mut group_of = vec![usize::MAX; nc];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(ConstructionError::PartitionInvalid(format!("group {g} is empty")));
        }
        for &c in members {
            if c >= nc {
                return Err(ConstructionError::PartitionInvalid(format!(
                    "component {c} does not exist ({nc} components)"
                )));
            }
            if group_of[c] != usize::MAX {
                return Err(ConstructionError::PartitionInvalid(format!("component {c} listed twice")));
            }
            group_of[c] = g;
        }
    }
    if let Some(c) = group_of.iter().position(|&g| g == usize::MAX) {
        return Err(ConstructionError::PartitionInvalid(format!("component {c} not covered")));
    }
    let mut tri_group = vec![0usize; bmap.faces.len()];
    for (c, comp) in bmap.components.iter().enumerate() {
        for &i in &comp.triangles {
            tri_group[i] = group_of[c];
        }
    }

    let mut raw = t.to_raw();
    let n = raw.tets.len();
    let nv = t.num_vertices() as u32;
    let ne = t.num_edges() as u32;
    for (i, &(tet, face)) in bmap.faces.iter().enumerate() {
        let g = tri_group[i] as u32;
        let old = raw.tets[tet].clone();
        let mut vertex_tags = old.vertex_tags;
        vertex_tags[face] = nv + g;
        let edge_tags = std::array::from_fn(|e| {
            let (a, b) = EDGE_SLOTS[e];
            if a == face || b == face {
                // apex edges: one per (group, vertex class), directed apex → vertex
                let other = if a == face { b } else { a };
                EdgeTag {
                    id: ne + g * nv + t.vertex_of(tet, other) as u32,
                    reversed: a != face,
                }
            } else {
                old.edge_tags[e]
            }
        });
        raw.tets.push(RawTet {
            gluings: [None; 4],
            vertex_tags,
            edge_tags,
        });
        raw.glue(n + i, face, tet, Perm4::IDENTITY);
    }
    for (i, &(tet, face)) in bmap.faces.iter().enumerate() {
        let corners = face_slots(face);
        for j in 0..3 {
            let c = corners[j];
            if raw.tets[n + i].gluings[c].is_some() {
                continue;
            }
            let (a, b) = (corners[(j + 1) % 3], corners[(j + 2) % 3]);
            let (u, x, ua, ub) = next_boundary_face(t, tet, face, a, b);
            let ui = bmap.faces.iter().position(|&f| f == (u, x)).expect("boundary face");
            let uc = 6 - ua - ub - x;
            let mut p = [0u8; 4];
            p[a] = ua as u8;
            p[b] = ub as u8;
            p[face] = x as u8;
            p[c] = uc as u8;
            raw.glue(n + i, c, n + ui, Perm4::new(p).expect("slot bijection"));
        }
    }
    Ok(Triangulation::from_raw(&raw).expect("coning keeps the complex valid"))
}

/// Merges each group of vertex classes into one vertex.
pub fn identify_vertices(t: &Triangulation, groups: &[Vec<usize>]) -> Result<Triangulation, ConstructionError> {
    let mut target: Vec<usize> = (0..t.num_vertices()).collect();
    let mut seen = vec![false; t.num_vertices()];
    for group in groups {
        for &v in group {
            if v >= t.num_vertices() {
                return Err(ConstructionError::InvalidVertex(v));
            }
            if seen[v] {
                return Err(ConstructionError::OverlappingGroups(v));
            }
            seen[v] = true;
        }
        if let Some(&first) = group.iter().min() {
            for &v in group {
                target[v] = first;
            }
        }
    }
    let mut raw = t.to_raw();
    for tet in raw.tets.iter_mut() {
        for tag in tet.vertex_tags.iter_mut() {
            *tag = target[*tag as usize] as u32;
        }
    }
    Ok(Triangulation::from_raw(&raw).expect("vertex identification keeps the complex valid"))
}

/// Suspension of a closed 2-complex: tetrahedra `2i` (north) and `2i+1`
/// (south) cone triangle `i`, with the apex in slot 3.
pub fn suspension(s: &SurfaceComplex) -> Result<Triangulation, ConstructionError> {
    if !s.is_closed() {
        return Err(ConstructionError::NotClosedSurfaceComplex);
    }
    let n = s.num_triangles();
    let nv = s.num_vertices() as u32;
    let mut raw = RawTriangulation::with_fresh_tets(2 * n);
    // apex edges get ids above every fresh tag
    let apex_edge_base = 12 * n as u32;
    for i in 0..n {
        for (side, apex) in [(0usize, nv), (1, nv + 1)] {
            let tet = &mut raw.tets[2 * i + side];
            for k in 0..3 {
                tet.vertex_tags[k] = s.vertex_of(i, k) as u32;
            }
            tet.vertex_tags[3] = apex;
            for k in 0..3 {
                tet.edge_tags[edge_index(k, 3)] = EdgeTag {
                    id: apex_edge_base + 2 * s.vertex_of(i, k) as u32 + side as u32,
                    reversed: false,
                };
            }
        }
    }
    for i in 0..n {
        raw.glue(2 * i, 3, 2 * i + 1, Perm4::IDENTITY);
        for j in 0..3 {
            let (u, q) = s.gluing(i, j).expect("closed surface");
            if (u, q.apply(j)) < (i, j) {
                continue;
            }
            let p = Perm4::new([q.apply(0) as u8, q.apply(1) as u8, q.apply(2) as u8, 3]).expect("extends");
            raw.glue(2 * i, j, 2 * u, p);
            raw.glue(2 * i + 1, j, 2 * u + 1, p);
        }
    }
    for v in 0..s.num_vertices() {
        if let Some(l) = s.label(v) {
            raw.labels.insert(v as u32, l.clone());
        }
    }
    raw.labels.insert(nv, VertexLabel::Name("north".into()));
    raw.labels.insert(nv + 1, VertexLabel::Name("south".into()));
    Ok(Triangulation::from_raw(&raw).expect("suspension of a closed 2-complex is valid"))
}

/// A rank-2 sublattice of Z² in Hermite normal form: basis (a, b), (0, d).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lattice {
    a: i64,
    b: i64,
    d: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Lattice {
    fn from_generators(gens: &[(i64, i64)]) -> Option<Lattice> {
        let mut rows: Vec<(i64, i64)> = gens.iter().copied().filter(|&g| g != (0, 0)).collect();
        loop {
            let pivot = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.0 != 0)
                .min_by_key(|(_, r)| r.0.abs())
                .map(|(i, _)| i);
            let pi = pivot?;
            let (px, py) = rows[pi];
            let mut changed = false;
            for (i, r) in rows.iter_mut().enumerate() {
                if i != pi && r.0 != 0 {
                    let q = r.0.div_euclid(px);
                    *r = (r.0 - q * px, r.1 - q * py);
                    changed = true;
                }
            }
            if !changed {
                let (mut a, mut b) = rows[pi];
                if a < 0 {
                    a = -a;
                    b = -b;
                }
                let d = rows
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != pi)
                    .fold(0, |acc, (_, r)| gcd(acc, r.1));
                if d == 0 {
                    return None;
                }
                return Some(Lattice { a, b: b.rem_euclid(d), d });
            }
        }
    }

    fn reduce(&self, (x, y): (i64, i64)) -> (i64, i64) {
        let q = x.div_euclid(self.a);
        (x - q * self.a, (y - q * self.b).rem_euclid(self.d))
    }

    fn index(&self) -> i64 {
        self.a * self.d
    }
}

/// Coefficient bound for the candidate circle coordinates αx + βy.
const MAX_COEFFICIENT: i64 = 6;

/// Largest change of αx + βy along a lattice edge (directions (1,0), (0,1), (1,1)).
fn edge_spread((alpha, beta): (i64, i64)) -> i64 {
    alpha.abs().max(beta.abs()).max((alpha + beta).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingCylinderInfo {
    /// The functional (coefficients on lattice x, y) used as the circle
    /// coordinate, and its period on the boundary torus.
    pub functional: (i64, i64),
    pub period: i64,
    /// Vertex classes of the target circle, in cyclic order.
    pub circle_vertices: Vec<usize>,
}

/// Attaches the simplicial mapping cylinder of a degree-`k` torus-to-circle
/// map onto a circle with `m` edges along boundary component `component`.
///
/// The boundary torus must be a quotient of the regular triangular lattice
/// (every vertex of degree six, no identifications beyond the lattice
/// periods). Its period lattice Λ is computed, and the circle coordinate is
/// the primitive functional φ = αx + βy maximizing N/s, where N is the
/// period of φ on Λ and s its largest change along a lattice edge; the
/// construction needs N ≥ k·m·s so that torus vertex v ↦ ⌊k·m·φ(v)/N⌋ mod m
/// is simplicial. Each triangle's prism is split by the staircase along
/// the order of its corners by φ, collapsing the top onto the circle.
pub fn mapping_cylinder_attach(
    t: &Triangulation,
    component: usize,
    k: usize,
    m: usize,
) -> Result<(Triangulation, MappingCylinderInfo), ConstructionError> {
    if k < 1 || m < 3 {
        return Err(ConstructionError::BadParameters(format!("need k ≥ 1 and m ≥ 3 (got k={k}, m={m})")));
    }
    let bmap = boundary_components(t);
    if bmap.faces.is_empty() {
        return Err(ConstructionError::NotBoundary);
    }
    let comp = bmap
        .components
        .get(component)
        .ok_or_else(|| ConstructionError::PartitionInvalid(format!("no boundary component {component}")))?;
    if !comp.orientable || comp.euler != 0 {
        return Err(ConstructionError::NotTorusBoundary(component));
    }
    let incompatible = |reason: String| ConstructionError::GridIncompatible { component, reason };
    let s = &bmap.surface;
    let tris = &comp.triangles;

    // develop the torus into the triangular lattice
    let mut coords: HashMap<usize, [(i64, i64); 3]> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    coords.insert(tris[0], [(0, 0), (1, 0), (1, 1)]);
    queue.push_back(tris[0]);
    while let Some(i) = queue.pop_front() {
        let c = coords[&i];
        for j in 0..3 {
            let (u, q) = s.gluing(i, j).expect("boundary surface is closed");
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let mut dev = [(0, 0); 3];
            dev[q.apply(a)] = c[a];
            dev[q.apply(b)] = c[b];
            dev[q.apply(j)] = (c[a].0 + c[b].0 - c[j].0, c[a].1 + c[b].1 - c[j].1);
            match coords.get(&u) {
                None => {
                    coords.insert(u, dev);
                    queue.push_back(u);
                }
                Some(existing) => {
                    let d0 = (existing[0].0 - dev[0].0, existing[0].1 - dev[0].1);
                    if (0..3).any(|x| (existing[x].0 - dev[x].0, existing[x].1 - dev[x].1) != d0) {
                        return Err(incompatible("boundary is not a flat lattice torus (vertex degrees ≠ 6)".into()));
                    }
                }
            }
        }
    }
    let mut first_coord: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    let mut gens = Vec::new();
    for &i in tris {
        for x in 0..3 {
            let (tet, face) = bmap.faces[i];
            let v = t.vertex_of(tet, face_slots(face)[x]);
            let c = coords[&i][x];
            let f = *first_coord.entry(v).or_insert(c);
            gens.push((c.0 - f.0, c.1 - f.1));
        }
    }
    let lattice = Lattice::from_generators(&gens).ok_or_else(|| incompatible("degenerate period lattice".into()))?;
    // the lattice points must be exactly the torus vertices
    let mut point_vertex: HashMap<(i64, i64), usize> = HashMap::new();
    for (&v, &c) in &first_coord {
        if let Some(&w) = point_vertex.get(&lattice.reduce(c)) {
            if w != v {
                return Err(incompatible(format!("vertices {w} and {v} occupy the same lattice point")));
            }
        }
        point_vertex.insert(lattice.reduce(c), v);
    }
    if lattice.index() as usize != first_coord.len() || 2 * first_coord.len() != tris.len() {
        return Err(incompatible("vertex identifications beyond the lattice periods".into()));
    }
    let km = (k * m) as i64;
    // best circle coordinate: largest period per unit of edge spread
    let mut best: Option<((i64, i64), i64)> = None;
    for alpha in 0..=MAX_COEFFICIENT {
        for beta in -MAX_COEFFICIENT..=MAX_COEFFICIENT {
            if gcd(alpha, beta) != 1 || (alpha == 0 && beta != 1) {
                continue;
            }
            let n = gcd(alpha * lattice.a + beta * lattice.b, beta * lattice.d);
            let spread = edge_spread((alpha, beta));
            let better = match best {
                None => true,
                Some((f, bn)) => n * edge_spread(f) > bn * spread,
            };
            if better {
                best = Some(((alpha, beta), n));
            }
        }
    }
    let (functional, period) = best.expect("(0, 1) is always a candidate");
    if period < km * edge_spread(functional) {
        return Err(incompatible(format!(
            "best circle coordinate has period {period} and edge spread {}, too coarse for k·m = {km}; refine the boundary",
            edge_spread(functional)
        )));
    }
    let phi = |c: (i64, i64)| functional.0 * c.0 + functional.1 * c.1;
    let height = |x: i64| (km * x).div_euclid(period);
    let level = |h: i64| h.rem_euclid(m as i64) as usize;

    // new tetrahedra as vertex-key tuples; keys are lattice points or circle
    // vertices, and faces are matched by key triples
    #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
    enum Key {
        Point(i64, i64),
        Circle(usize),
    }
    let mut tuples: Vec<[Key; 4]> = Vec::new();
    let mut cone_of_face: Vec<(usize, usize)> = Vec::new();
    // staircase cylinder over each triangle with corners ordered by
    // (circle coordinate, vertex class); heights are non-decreasing along
    // the order and rise by at most one
    for &i in tris {
        let c = coords[&i];
        let keys = c.map(|p| {
            let r = lattice.reduce(p);
            Key::Point(r.0, r.1)
        });
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&x| {
            let r = lattice.reduce(c[x]);
            (phi(c[x]), point_vertex[&r])
        });
        let h = order.map(|x| height(phi(c[x])));
        if h[2] - h[0] > 1 {
            return Err(incompatible("circle map is not simplicial on this boundary".into()));
        }
        tuples.push([keys[0], keys[1], keys[2], Key::Circle(level(h[2]))]);
        cone_of_face.push((i, tuples.len() - 1));
        if h[1] < h[2] {
            tuples.push([
                keys[order[0]],
                keys[order[1]],
                Key::Circle(level(h[1])),
                Key::Circle(level(h[2])),
            ]);
        }
    }
    for tup in &tuples {
        for x in 0..4 {
            for y in x + 1..4 {
                if tup[x] == tup[y] {
                    return Err(incompatible("a new tetrahedron would repeat a vertex".into()));
                }
            }
        }
    }

    let mut raw = t.to_raw();
    let base = raw.tets.len();
    let nv = t.num_vertices() as u32;
    let vertex_tag = |key: Key| match key {
        Key::Point(x, y) => point_vertex[&(x, y)] as u32,
        Key::Circle(j) => nv + j as u32,
    };
    let mut edge_ids: HashMap<(Key, Key), u32> = HashMap::new();
    let mut next_edge = t.num_edges() as u32;
    let mut faces: BTreeMap<[Key; 3], Vec<(usize, usize)>> = BTreeMap::new();
    for (ti, tup) in tuples.iter().enumerate() {
        let vertex_tags = tup.map(vertex_tag);
        let edge_tags = std::array::from_fn(|e| {
            let (a, b) = EDGE_SLOTS[e];
            let (ka, kb) = (tup[a], tup[b]);
            let key = (ka.min(kb), ka.max(kb));
            let id = match key.0 {
                // torus edges are identified through the face gluings
                Key::Point(..) if matches!(key.1, Key::Point(..)) => {
                    next_edge += 1;
                    next_edge - 1
                }
                _ => *edge_ids.entry(key).or_insert_with(|| {
                    next_edge += 1;
                    next_edge - 1
                }),
            };
            EdgeTag { id, reversed: ka > kb }
        });
        raw.tets.push(RawTet {
            gluings: [None; 4],
            vertex_tags,
            edge_tags,
        });
        for f in 0..4 {
            let mut key = face_slots(f).map(|s| tup[s]);
            key.sort_unstable();
            faces.entry(key).or_default().push((ti, f));
        }
    }
    // cone faces opposite the circle vertex go onto the old boundary faces
    for &(i, ti) in &cone_of_face {
        let (tet, face) = bmap.faces[i];
        let corners = face_slots(face);
        let mut p = [0u8; 4];
        for x in 0..3 {
            p[x] = corners[x] as u8;
        }
        p[3] = face as u8;
        raw.glue(base + ti, 3, tet, Perm4::new(p).expect("corner bijection"));
    }
    for (key, occ) in &faces {
        let is_torus = key.iter().all(|k| matches!(k, Key::Point(..)));
        match (is_torus, occ.len()) {
            (true, 1) => {}
            (false, 2) => {
                let [(ta, fa), (tb, fb)] = [occ[0], occ[1]];
                let (ua, ub) = (&tuples[ta], &tuples[tb]);
                let mut p = [0u8; 4];
                p[fa] = fb as u8;
                for s in face_slots(fa) {
                    p[s] = ub.iter().position(|k| *k == ua[s]).expect("shared key") as u8;
                }
                raw.glue(base + ta, fa, base + tb, Perm4::new(p).expect("slot bijection"));
            }
            _ => {
                return Err(incompatible(format!(
                    "face {key:?} would lie in {} new tetrahedra",
                    occ.len()
                )))
            }
        }
    }
    for j in 0..m {
        raw.labels.insert(nv + j as u32, VertexLabel::Name(format!("c{j}")));
    }
    let out = Triangulation::from_raw(&raw).map_err(|e| incompatible(e.to_string()))?;
    let circle_vertices = (0..m)
        .map(|j| {
            let ti = tuples.iter().position(|tup| tup.contains(&Key::Circle(j))).expect("every level is hit");
            let slot = tuples[ti].iter().position(|k| *k == Key::Circle(j)).expect("present");
            out.vertex_of(base + ti, slot)
        })
        .collect();
    Ok((
        out,
        MappingCylinderInfo {
            functional,
            period,
            circle_vertices,
        },
    ))
}

/// A seed from the example library: a 3-complex or a closed 2-complex.
#[derive(Clone, Debug)]
pub enum Example {
    Complex(Triangulation),
    Surface(SurfaceComplex),
}

pub const EXAMPLE_NAMES: [&str; 7] = [
    "s3-bd4simplex",
    "s3-two-tet",
    "torus7",
    "solid-torus",
    "sphere-bd-tet",
    "pinched-s3",
    "susp-torus",
];

/// Boundary of the 4-simplex: the five 4-subsets of {0, …, 4}.
pub fn boundary_4simplex() -> Triangulation {
    let tuples: Vec<[i64; 4]> = (0..5)
        .map(|skip| {
            let v: Vec<i64> = (0..5).filter(|&x| x != skip).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    Triangulation::from_vertex_tuples(&tuples).expect("valid simplicial complex")
}

/// Two tetrahedra glued along all four faces by the identity.
pub fn two_tet_sphere() -> Triangulation {
    let gl: Vec<_> = (0..4).map(|f| (0, f, 1, f, Perm4::IDENTITY)).collect();
    Triangulation::build_from_gluings(2, &gl).expect("valid gluings")
}

/// The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
pub fn torus7() -> SurfaceComplex {
    let tris: Vec<[VertexLabel; 3]> = (0..7i64)
        .flat_map(|i| {
            [
                [i, (i + 1) % 7, (i + 3) % 7].map(VertexLabel::Int),
                [i, (i + 2) % 7, (i + 3) % 7].map(VertexLabel::Int),
            ]
        })
        .collect();
    SurfaceComplex::from_labelled_triangles(&tris).expect("valid torus")
}

pub fn tetrahedron_boundary() -> SurfaceComplex {
    let tris: Vec<[VertexLabel; 3]> = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
        .iter()
        .map(|t| t.map(VertexLabel::Int))
        .collect();
    SurfaceComplex::from_labelled_triangles(&tris).expect("valid sphere")
}

/// D² × S¹ as a cone on an `n`-gon times a circle of `p` segments. Each prism
/// over a cone triangle (o, p_i, p_{i+1}) is split into three tetrahedra by
/// the staircase along that vertex order, so the boundary torus is the
/// regular lattice quotient with periods (n, 0) and (0, p).
pub fn solid_torus(n: usize, p: usize) -> Triangulation {
    let name = |v: String, s: usize| format!("{v}@{}", s % p);
    let mut tuples: Vec<[VertexLabel; 4]> = Vec::new();
    for s in 0..p {
        for i in 0..n {
            let a = [
                name("o".into(), s),
                name(format!("p{i}"), s),
                name(format!("p{}", (i + 1) % n), s),
            ];
            let b = [
                name("o".into(), s + 1),
                name(format!("p{i}"), s + 1),
                name(format!("p{}", (i + 1) % n), s + 1),
            ];
            let stair = [
                [&a[0], &a[1], &a[2], &b[2]],
                [&a[0], &a[1], &b[1], &b[2]],
                [&a[0], &b[0], &b[1], &b[2]],
            ];
            for tet in stair {
                tuples.push(tet.map(|l| VertexLabel::Name(l.clone())));
            }
        }
    }
    Triangulation::build_from_vertex_tuples(&tuples).expect("valid solid torus")
}

/// The tetrahelix: tetrahedra {i, i+1, i+2, i+3} mod `n` chained along
/// their shared faces. Its boundary is the lattice torus with triangles
/// {i, i+1, i+3} and {i, i+2, i+3}; the longitude x + 2y has period `n` and
/// edge spread 3, so it admits mapping cylinders with 3·k·m ≤ n.
pub fn tetrahelix(n: usize) -> Triangulation {
    assert!(n >= 7, "the tetrahelix needs at least 7 tetrahedra");
    let tuples: Vec<[i64; 4]> = (0..n)
        .map(|i| std::array::from_fn(|j| ((i + j) % n) as i64))
        .collect();
    Triangulation::from_vertex_tuples(&tuples).expect("valid tetrahelix")
}

/// Length of the library solid torus: k·m ≤ 8 fits.
pub const SOLID_TORUS_LENGTH: usize = 24;

pub fn pinched_sphere() -> Triangulation {
    identify_vertices(&boundary_4simplex(), &[vec![0, 1]]).expect("valid vertices")
}

pub fn example(name: &str) -> Result<Example, ConstructionError> {
    Ok(match name {
        "s3-bd4simplex" => Example::Complex(boundary_4simplex()),
        "s3-two-tet" => Example::Complex(two_tet_sphere()),
        "torus7" => Example::Surface(torus7()),
        "solid-torus" => Example::Complex(tetrahelix(SOLID_TORUS_LENGTH)),
        "sphere-bd-tet" => Example::Surface(tetrahedron_boundary()),
        "pinched-s3" => Example::Complex(pinched_sphere()),
        "susp-torus" => Example::Complex(suspension(&torus7())?),
        other => return Err(ConstructionError::UnknownExample(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{skeletons, validate, vertex_nature, GammaNode, Validation, VertexNature};
    use crate::signature::isomorphism_signature;

    #[test]
    fn cone_on_tetrahedron_is_sphere() {
        let one = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        let b = boundary_components(&one);
        assert_eq!(b.components.len(), 1);
        assert_eq!(b.components[0].euler, 2);
        let coned = cone_boundary(&one, &[vec![0]]).unwrap();
        assert_eq!(validate(&coned), Validation::ClosedPseudomanifold);
        assert_eq!(isomorphism_signature(&coned), isomorphism_signature(&boundary_4simplex()));
        assert_eq!(cone_boundary(&coned, &[vec![0]]).unwrap_err(), ConstructionError::NotBoundary);
        assert!(matches!(cone_boundary(&one, &[]), Err(ConstructionError::PartitionInvalid(_))));
        assert!(matches!(
            cone_boundary(&one, &[vec![0], vec![0]]),
            Err(ConstructionError::PartitionInvalid(_))
        ));
    }

    #[test]
    fn solid_torus_boundary_and_cone() {
        let st = solid_torus(3, 8);
        assert_eq!(st.num_tetrahedra(), 72);
        let b = boundary_components(&st);
        assert_eq!(b.components.len(), 1);
        assert!(b.components[0].orientable);
        assert_eq!(b.components[0].euler, 0);
        let coned = cone_boundary(&st, &[vec![0]]).unwrap();
        assert_eq!(validate(&coned), Validation::ClosedPseudomanifold);
        let apex = coned.num_vertices() - 1;
        assert_eq!(vertex_nature(&coned, apex).unwrap(), VertexNature::X0Point);
        let rep = skeletons(&coned).unwrap();
        assert_eq!(rep.x0_vertices, vec![apex]);
    }

    #[test]
    fn two_component_boundary_partitions() {
        // two disjoint tetrahedra: two sphere boundary components
        let two = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3], [4, 5, 6, 7]]).unwrap();
        assert_eq!(boundary_components(&two).components.len(), 2);
        let separate = cone_boundary(&two, &[vec![0], vec![1]]).unwrap();
        let joint = cone_boundary(&two, &[vec![0, 1]]).unwrap();
        assert_eq!(separate.num_vertices(), 10);
        assert_eq!(joint.num_vertices(), 9);
        assert!(separate.is_closed() && joint.is_closed());
    }

    #[test]
    fn pinch_and_wedge() {
        let p = pinched_sphere();
        assert_eq!(p.num_vertices(), 4);
        let rep = skeletons(&p).unwrap();
        assert_eq!(rep.x0_vertices.len(), 1);
        let merged = rep.x0_vertices[0];
        let cls = p.vertex_link(merged).unwrap().classify();
        assert_eq!(cls.components.len(), 2);
        assert!(cls.components.iter().all(|c| c.orientable && c.euler == 2));
        assert!(cls.pinches.is_empty());
        let same = identify_vertices(&p, &[]).unwrap();
        assert_eq!(isomorphism_signature(&same), isomorphism_signature(&p));
        assert_eq!(
            identify_vertices(&p, &[vec![0, 1], vec![1, 2]]).unwrap_err(),
            ConstructionError::OverlappingGroups(1)
        );
    }

    #[test]
    fn suspensions() {
        let s = suspension(&tetrahedron_boundary()).unwrap();
        assert_eq!(s.num_tetrahedra(), 8);
        let rep = skeletons(&s).unwrap();
        assert!(rep.x0_vertices.is_empty());
        let st = suspension(&torus7()).unwrap();
        assert_eq!(st.num_tetrahedra(), 28);
        assert_eq!(st.num_vertices(), 9);
        assert_eq!(st.num_edges(), 21 + 14);
        assert_eq!(validate(&st), Validation::ClosedPseudomanifold);
        let rep = skeletons(&st).unwrap();
        assert_eq!(rep.x0_vertices.len(), 2);
        assert_eq!(rep.x1_vertices, rep.x0_vertices);
        assert!(rep.x1_edges.is_empty());
        assert_eq!(rep.gamma.nodes.len(), 2);
        for &v in &rep.x0_vertices {
            let c = st.vertex_link(v).unwrap().classify();
            assert_eq!(st.vertex_link(v).unwrap().num_triangles(), 14);
            assert_eq!(c.components.len(), 1);
            assert_eq!(c.components[0].euler, 0);
        }
        let open = SurfaceComplex::from_labelled_triangles(&[[0i64, 1, 2].map(VertexLabel::Int)]).unwrap();
        assert_eq!(suspension(&open).unwrap_err(), ConstructionError::NotClosedSurfaceComplex);
    }

    #[test]
    fn lattice_normal_form() {
        let l = Lattice::from_generators(&[(3, 0), (0, 8), (6, 8)]).unwrap();
        assert_eq!(l, Lattice { a: 3, b: 0, d: 8 });
        assert_eq!(l.reduce((4, 9)), (1, 1));
        assert_eq!(l.reduce((-1, -1)), (2, 7));
        let l = Lattice::from_generators(&[(2, 1), (1, 3)]).unwrap();
        assert_eq!(l.index(), 5);
        assert!(Lattice::from_generators(&[(1, 1), (2, 2)]).is_none());
    }

    #[test]
    fn mapping_cylinder_singular_circle() {
        let helix = tetrahelix(SOLID_TORUS_LENGTH);
        let b = boundary_components(&helix);
        assert_eq!((b.components.len(), b.components[0].euler), (1, 0));
        let prism = solid_torus(3, 8);
        assert_eq!(mapping_cylinder_attach(&prism, 0, 2, 4).unwrap().1.functional, (0, 1));
        let st = helix;
        for (k, m) in [(2, 3), (2, 4), (3, 3)] {
            if k * m > 8 {
                assert!(matches!(
                    mapping_cylinder_attach(&st, 0, k, m),
                    Err(ConstructionError::GridIncompatible { .. })
                ));
                continue;
            }
            let (mc, info) = mapping_cylinder_attach(&st, 0, k, m).unwrap();
            assert_eq!((info.period, edge_spread(info.functional)), (24, 3));
            assert_eq!(validate(&mc), Validation::ClosedPseudomanifold);
            let rep = skeletons(&mc).unwrap();
            assert!(rep.x0_vertices.is_empty());
            assert_eq!(rep.x1_edges.len(), m);
            for &e in &rep.x1_edges {
                assert_eq!(rep.edge_circles[e], k);
            }
            for &v in &info.circle_vertices {
                assert_eq!(rep.natures[v], VertexNature::X1NotX0 { k });
            }
            assert_eq!(rep.gamma.nodes, vec![GammaNode::Circle { edges: m, k }]);
        }
        let (mc1, _) = mapping_cylinder_attach(&st, 0, 1, 3).unwrap();
        let rep = skeletons(&mc1).unwrap();
        assert!(rep.natures.iter().all(|n| *n == VertexNature::ManifoldPoint));
        let one = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        assert_eq!(
            mapping_cylinder_attach(&one, 0, 2, 3).unwrap_err(),
            ConstructionError::NotTorusBoundary(0)
        );
    }

    #[test]
    fn example_library() {
        for name in EXAMPLE_NAMES {
            example(name).unwrap();
        }
        assert!(matches!(example("nope"), Err(ConstructionError::UnknownExample(_))));
    }
}
