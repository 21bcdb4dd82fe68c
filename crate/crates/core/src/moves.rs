//! Bistellar (Pachner) moves 1-4, 4-1, 2-3, 3-2 on Δ-complexes, and seeded
//! random walks built from them.
//!
//! Every move is a local ball replacement expressed through [`replace`]: the
//! removed tetrahedra's outer faces are mapped onto faces of the new
//! tetrahedra, outer gluings are rewired through those maps, and the new
//! tetrahedra inherit the identification tags of the outer faces. Simplices
//! interior to the ball get fresh tags, so singular simplices (which never
//! lie inside such a ball) are left untouched.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{edge_index, face_slots, Perm4, EDGE_SLOTS};
use crate::tri::{EdgeTag, RawTet, RawTriangulation, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("tetrahedron {0} does not exist")]
    InvalidTetrahedron(usize),
    #[error("vertex class {0} does not exist")]
    InvalidVertex(usize),
    #[error("face class {0} does not exist")]
    InvalidFace(usize),
    #[error("edge class {0} does not exist")]
    InvalidEdge(usize),
    #[error("vertex {vertex} lies in {corners} tetrahedron corners (need 4 distinct tetrahedra)")]
    NotFourValent { vertex: usize, corners: usize },
    #[error("link of vertex {0} is not the boundary of a tetrahedron")]
    LinkNotSphere(usize),
    #[error("face class {0} is a boundary face")]
    BoundaryFace(usize),
    #[error("face class {0} joins a tetrahedron to itself")]
    SameTetrahedron(usize),
    #[error("edge {edge} does not have a single link circle of length 3 (degree {degree})")]
    EdgeDegreeNot3 { edge: usize, degree: usize },
    #[error("edge {edge} is singular ({circles} link circles)")]
    SingularEdge { edge: usize, circles: usize },
    #[error("edge {0} meets a tetrahedron more than once")]
    RepeatedTetrahedron(usize),
    #[error("no legal move among the enabled kinds")]
    NoLegalMove,
    #[error("random walks need a closed complex")]
    NotClosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    M14,
    M41,
    M23,
    M32,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [MoveKind::M14, MoveKind::M41, MoveKind::M23, MoveKind::M32];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::M14 => "m14",
            MoveKind::M41 => "m41",
            MoveKind::M23 => "m23",
            MoveKind::M32 => "m32",
        }
    }
}

/// A move and its target: a tetrahedron (m14), vertex class (m41), face
/// class (m23) or edge class (m32).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveDescriptor {
    pub kind: MoveKind,
    pub target: usize,
}

/// Where an outer face of the removed ball goes: `(old tet, old face)` is
/// carried onto face `new_face` of new tetrahedron `new_tet`, with `phi`
/// sending new slots to old slots.
#[derive(Clone, Copy, Debug)]
struct BoundaryMap {
    old_tet: usize,
    old_face: usize,
    new_tet: usize,
    new_face: usize,
    phi: Perm4,
}

/// Replaces `removed` by `new_count` tetrahedra. `internal` lists gluings
/// among the new tetrahedra as `(a, face, b, perm)`.
fn replace(
    t: &Triangulation,
    removed: &[usize],
    new_count: usize,
    internal: &[(usize, usize, usize, Perm4)],
    boundary: &[BoundaryMap],
) -> Triangulation {
    let raw = t.to_raw();
    let removed_set: HashSet<usize> = removed.iter().copied().collect();
    let mut new_index = vec![usize::MAX; raw.tets.len()];
    let mut kept = 0;
    for (old, slot) in new_index.iter_mut().enumerate() {
        if !removed_set.contains(&old) {
            *slot = kept;
            kept += 1;
        }
    }
    let bmap: HashMap<(usize, usize), &BoundaryMap> =
        boundary.iter().map(|b| ((b.old_tet, b.old_face), b)).collect();
    debug_assert!(removed.iter().all(|&u| (0..4).all(|f| {
        bmap.contains_key(&(u, f))
            || matches!(raw.tets[u].gluings[f], Some((w, h))
                if removed_set.contains(&w) && !bmap.contains_key(&(w, h.apply(f))))
    })));

    let mut next_vtag = t.num_vertices() as u32;
    let mut next_etag = t.num_edges() as u32;
    let mut tets: Vec<RawTet> = Vec::with_capacity(kept + new_count);
    for (old, tet) in raw.tets.iter().enumerate() {
        if removed_set.contains(&old) {
            continue;
        }
        let mut tet = tet.clone();
        for f in 0..4 {
            tet.gluings[f] = tet.gluings[f].map(|(u, h)| {
                if removed_set.contains(&u) {
                    let b = bmap[&(u, h.apply(f))];
                    (kept + b.new_tet, b.phi.inverse().compose(h))
                } else {
                    (new_index[u], h)
                }
            });
        }
        tets.push(tet);
    }
    for _ in 0..new_count {
        let vertex_tags = std::array::from_fn(|_| {
            next_vtag += 1;
            next_vtag - 1
        });
        let edge_tags = std::array::from_fn(|_| {
            next_etag += 1;
            EdgeTag {
                id: next_etag - 1,
                reversed: false,
            }
        });
        tets.push(RawTet {
            gluings: [None; 4],
            vertex_tags,
            edge_tags,
        });
    }
    for &(a, f, b, p) in internal {
        tets[kept + a].gluings[f] = Some((kept + b, p));
        tets[kept + b].gluings[p.apply(f)] = Some((kept + a, p.inverse()));
    }
    for b in boundary {
        let n = kept + b.new_tet;
        let old = &raw.tets[b.old_tet];
        tets[n].gluings[b.new_face] = old.gluings[b.old_face].map(|(w, h)| {
            if removed_set.contains(&w) {
                let other = bmap[&(w, h.apply(b.old_face))];
                (kept + other.new_tet, other.phi.inverse().compose(h).compose(b.phi))
            } else {
                (new_index[w], h.compose(b.phi))
            }
        });
        for s in face_slots(b.new_face) {
            tets[n].vertex_tags[s] = old.vertex_tags[b.phi.apply(s)];
        }
        for (e, &(x, y)) in EDGE_SLOTS.iter().enumerate() {
            if x == b.new_face || y == b.new_face {
                continue;
            }
            let (oa, ob) = (b.phi.apply(x), b.phi.apply(y));
            let tag = old.edge_tags[edge_index(oa, ob)];
            tets[n].edge_tags[e] = EdgeTag {
                id: tag.id,
                reversed: tag.reversed ^ (oa > ob),
            };
        }
    }
    let out = RawTriangulation {
        tets,
        labels: raw.labels,
    };
    Triangulation::from_raw(&out).expect("local replacement keeps the complex valid")
}

/// 1-4 move: cones tetrahedron `tet` from a new interior vertex.
pub fn move_14(t: &Triangulation, tet: usize) -> Result<Triangulation, MoveError> {
    if tet >= t.num_tetrahedra() {
        return Err(MoveError::InvalidTetrahedron(tet));
    }
    // new tet i keeps the slots of `tet` except slot i, which becomes the apex
    let mut internal = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            internal.push((i, j, j, Perm4::transposition(i, j)));
        }
    }
    let boundary: Vec<BoundaryMap> = (0..4)
        .map(|i| BoundaryMap {
            old_tet: tet,
            old_face: i,
            new_tet: i,
            new_face: i,
            phi: Perm4::IDENTITY,
        })
        .collect();
    Ok(replace(t, &[tet], 4, &internal, &boundary))
}

/// The structure around a vertex removable by a 4-1 move: tetrahedron
/// `base` holding the vertex at slot `s`, and its neighbours across the
/// other three faces.
fn star_of_41(t: &Triangulation, v: usize) -> Result<(usize, usize, [(usize, Perm4); 4]), MoveError> {
    if v >= t.num_vertices() {
        return Err(MoveError::InvalidVertex(v));
    }
    let corners = t.vertex_slots(v);
    let distinct: HashSet<usize> = corners.iter().map(|c| c.0).collect();
    if corners.len() != 4 || distinct.len() != 4 {
        return Err(MoveError::NotFourValent {
            vertex: v,
            corners: corners.len(),
        });
    }
    let link = t.vertex_link_unchecked(v);
    if !link.is_closed() || !link.classify().is_sphere() {
        return Err(MoveError::LinkNotSphere(v));
    }
    // the link must be the boundary of a tetrahedron: every corner meets the
    // other three tetrahedra across its three faces through v
    for &(tet, slot) in corners {
        let mut seen = HashSet::new();
        for x in (0..4).filter(|&x| x != slot) {
            match t.gluing(tet, x) {
                Some((u, _)) if u != tet && seen.insert(u) => {}
                _ => return Err(MoveError::LinkNotSphere(v)),
            }
        }
    }
    let (base, s) = corners[0];
    let mut nbrs = [(base, Perm4::IDENTITY); 4];
    for x in 0..4 {
        if x == s {
            continue;
        }
        let (u, g) = t.gluing(base, x).ok_or(MoveError::LinkNotSphere(v))?;
        if u == base || t.vertex_of(u, g.apply(s)) != v {
            return Err(MoveError::LinkNotSphere(v));
        }
        nbrs[x] = (u, g);
    }
    Ok((base, s, nbrs))
}

/// 4-1 move: removes a vertex whose star is four tetrahedra forming a
/// subdivided tetrahedron.
pub fn move_41(t: &Triangulation, v: usize) -> Result<Triangulation, MoveError> {
    let (base, s, nbrs) = star_of_41(t, v)?;
    let mut removed = vec![base];
    let mut boundary = vec![BoundaryMap {
        old_tet: base,
        old_face: s,
        new_tet: 0,
        new_face: s,
        phi: Perm4::IDENTITY,
    }];
    for x in 0..4 {
        if x == s {
            continue;
        }
        let (u, g) = nbrs[x];
        removed.push(u);
        boundary.push(BoundaryMap {
            old_tet: u,
            old_face: g.apply(s),
            new_tet: 0,
            new_face: x,
            phi: g.compose(Perm4::transposition(s, x)),
        });
    }
    Ok(replace(t, &removed, 1, &[], &boundary))
}

/// 2-3 move across face class `f`.
pub fn move_23(t: &Triangulation, f: usize) -> Result<Triangulation, MoveError> {
    if f >= t.num_faces() {
        return Err(MoveError::InvalidFace(f));
    }
    let slots = t.face_slots(f);
    if slots.len() != 2 {
        return Err(MoveError::BoundaryFace(f));
    }
    let (t1, f1) = slots[0];
    let (t2, g) = t.gluing(t1, f1).expect("face class with two slots is glued");
    if t1 == t2 {
        return Err(MoveError::SameTetrahedron(f));
    }
    // new tet x (x ≠ f1) is t1 with slot x replaced by the apex of t2
    let others: Vec<usize> = (0..4).filter(|&x| x != f1).collect();
    let idx = |x: usize| others.iter().position(|&o| o == x).expect("slot other than f1");
    let mut internal = Vec::new();
    for (a, &x) in others.iter().enumerate() {
        for &y in &others[a + 1..] {
            internal.push((idx(x), y, idx(y), Perm4::transposition(x, y)));
        }
    }
    let mut boundary = Vec::new();
    for &x in &others {
        boundary.push(BoundaryMap {
            old_tet: t1,
            old_face: x,
            new_tet: idx(x),
            new_face: x,
            phi: Perm4::IDENTITY,
        });
        boundary.push(BoundaryMap {
            old_tet: t2,
            old_face: g.apply(x),
            new_tet: idx(x),
            new_face: f1,
            phi: g.compose(Perm4::transposition(x, f1)),
        });
    }
    Ok(replace(t, &[t1, t2], 3, &internal, &boundary))
}

/// The three tetrahedra around an edge removable by a 3-2 move, with the
/// slots `(p, q, c, d)` of the edge and its opposite edge in the first one.
fn star_of_32(t: &Triangulation, e: usize) -> Result<([usize; 3], [usize; 4], [Perm4; 2]), MoveError> {
    let info = t.edge_link(e).map_err(|_| MoveError::InvalidEdge(e))?;
    if info.circles.len() >= 2 {
        return Err(MoveError::SingularEdge {
            edge: e,
            circles: info.circles.len(),
        });
    }
    if !info.arcs.is_empty() || info.circles[0].len() != 3 {
        return Err(MoveError::EdgeDegreeNot3 {
            edge: e,
            degree: info.slots.len(),
        });
    }
    let circle = &info.circles[0];
    let tets = [circle[0].tet, circle[1].tet, circle[2].tet];
    if tets[0] == tets[1] || tets[1] == tets[2] || tets[0] == tets[2] {
        return Err(MoveError::RepeatedTetrahedron(e));
    }
    let (p, q) = (circle[0].tail, circle[0].head);
    let rest: Vec<usize> = (0..4).filter(|&x| x != p && x != q).collect();
    let (c, d) = (rest[0], rest[1]);
    let (u1, h1) = t.gluing(tets[0], c).expect("closed edge link");
    let (u2, h2) = t.gluing(u1, h1.apply(d)).expect("closed edge link");
    debug_assert!(u1 != tets[0] && u2 != tets[0] && u1 != u2);
    Ok(([tets[0], u1, u2], [p, q, c, d], [h1, h2]))
}

/// 3-2 move removing edge class `e`.
pub fn move_32(t: &Triangulation, e: usize) -> Result<Triangulation, MoveError> {
    let ([t0, t1, t2], [p, q, c, d], [h1, h2]) = star_of_32(t, e)?;
    let k = h2.compose(h1);
    // new tet 0 = t0 with Q replaced by the far vertex; new tet 1 likewise for P
    let cycle = |a: usize, b: usize, c: usize, d: usize| {
        // a↦a, b↦c, c↦d, d↦b
        let mut im = [0u8; 4];
        im[a] = a as u8;
        im[b] = c as u8;
        im[c] = d as u8;
        im[d] = b as u8;
        Perm4::new(im).expect("3-cycle")
    };
    let boundary = vec![
        BoundaryMap { old_tet: t0, old_face: q, new_tet: 0, new_face: q, phi: Perm4::IDENTITY },
        BoundaryMap { old_tet: t0, old_face: p, new_tet: 1, new_face: p, phi: Perm4::IDENTITY },
        BoundaryMap {
            old_tet: t1,
            old_face: h1.apply(q),
            new_tet: 0,
            new_face: c,
            phi: h1.compose(Perm4::transposition(q, c)),
        },
        BoundaryMap {
            old_tet: t1,
            old_face: h1.apply(p),
            new_tet: 1,
            new_face: c,
            phi: h1.compose(Perm4::transposition(p, c)),
        },
        BoundaryMap { old_tet: t2, old_face: k.apply(q), new_tet: 0, new_face: d, phi: k.compose(cycle(p, q, c, d)) },
        BoundaryMap { old_tet: t2, old_face: k.apply(p), new_tet: 1, new_face: d, phi: k.compose(cycle(q, p, c, d)) },
    ];
    let internal = [(0, p, 1, Perm4::transposition(p, q))];
    Ok(replace(t, &[t0, t1, t2], 2, &internal, &boundary))
}

pub fn apply_move(t: &Triangulation, m: MoveDescriptor) -> Result<Triangulation, MoveError> {
    match m.kind {
        MoveKind::M14 => move_14(t, m.target),
        MoveKind::M41 => move_41(t, m.target),
        MoveKind::M23 => move_23(t, m.target),
        MoveKind::M32 => move_32(t, m.target),
    }
}

/// All legal targets of one move kind, in increasing order.
pub fn legal_targets(t: &Triangulation, kind: MoveKind) -> Vec<usize> {
    match kind {
        MoveKind::M14 => (0..t.num_tetrahedra()).collect(),
        MoveKind::M41 => (0..t.num_vertices()).filter(|&v| star_of_41(t, v).is_ok()).collect(),
        MoveKind::M23 => (0..t.num_faces())
            .filter(|&f| {
                let s = t.face_slots(f);
                s.len() == 2 && s[0].0 != s[1].0
            })
            .collect(),
        MoveKind::M32 => (0..t.num_edges()).filter(|&e| star_of_32(t, e).is_ok()).collect(),
    }
}

/// Relative selection weights of the four move kinds; zero disables a kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveWeights {
    pub m14: f64,
    pub m41: f64,
    pub m23: f64,
    pub m32: f64,
}

impl Default for MoveWeights {
    /// Favours the size-reducing moves a little so walks stay small.
    fn default() -> Self {
        MoveWeights {
            m14: 1.0,
            m41: 2.0,
            m23: 2.0,
            m32: 3.0,
        }
    }
}

impl MoveWeights {
    pub fn uniform() -> Self {
        MoveWeights {
            m14: 1.0,
            m41: 1.0,
            m23: 1.0,
            m32: 1.0,
        }
    }

    pub fn get(&self, kind: MoveKind) -> f64 {
        match kind {
            MoveKind::M14 => self.m14,
            MoveKind::M41 => self.m41,
            MoveKind::M23 => self.m23,
            MoveKind::M32 => self.m32,
        }
    }
}

/// Applies `steps` random legal moves. Each step picks a kind among those
/// with positive weight and at least one legal target (probability
/// proportional to weight), then a uniform target of that kind.
pub fn random_walk(
    t: &Triangulation,
    steps: usize,
    seed: u64,
    weights: &MoveWeights,
) -> Result<(Triangulation, Vec<MoveDescriptor>), MoveError> {
    let mut trace = Vec::with_capacity(steps);
    let cur = random_walk_with(t, steps, seed, weights, |_, m, _| trace.push(m))?;
    Ok((cur, trace))
}

/// Like [`random_walk`], calling `observe(step, move, result)` after each
/// step.
pub fn random_walk_with<F>(
    t: &Triangulation,
    steps: usize,
    seed: u64,
    weights: &MoveWeights,
    mut observe: F,
) -> Result<Triangulation, MoveError>
where
    F: FnMut(usize, MoveDescriptor, &Triangulation),
{
    if !t.is_closed() {
        return Err(MoveError::NotClosed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = t.clone();
    for step in 0..steps {
        let options: Vec<(MoveKind, Vec<usize>)> = MoveKind::ALL
            .iter()
            .filter(|&&k| weights.get(k) > 0.0)
            .map(|&k| (k, legal_targets(&cur, k)))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        if options.is_empty() {
            return Err(MoveError::NoLegalMove);
        }
        let total: f64 = options.iter().map(|(k, _)| weights.get(*k)).sum();
        let mut x = rng.gen::<f64>() * total;
        let mut choice = options.len() - 1;
        for (i, (k, _)) in options.iter().enumerate() {
            x -= weights.get(*k);
            if x < 0.0 {
                choice = i;
                break;
            }
        }
        let (kind, targets) = &options[choice];
        let target = targets[rng.gen_range(0..targets.len())];
        let m = MoveDescriptor { kind: *kind, target };
        log::debug!("walk step {step}: {} {target}", kind.name());
        cur = apply_move(&cur, m)?;
        observe(step, m, &cur);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{skeletons, validate, Validation};
    use crate::signature::isomorphism_signature;

    fn bd4simplex() -> Triangulation {
        let tuples: Vec<[i64; 4]> = (0..5)
            .map(|skip| {
                let v: Vec<i64> = (0..5).filter(|&x| x != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        Triangulation::from_vertex_tuples(&tuples).unwrap()
    }

    fn two_tet() -> Triangulation {
        let gl: Vec<_> = (0..4).map(|f| (0, f, 1, f, Perm4::IDENTITY)).collect();
        Triangulation::build_from_gluings(2, &gl).unwrap()
    }

    fn check_manifold(t: &Triangulation) {
        assert_eq!(validate(t), Validation::ClosedPseudomanifold);
        let rep = skeletons(t).unwrap();
        assert!(rep.x0_vertices.is_empty() && rep.x1_edges.is_empty());
    }

    #[test]
    fn one_four_and_back() {
        let t = bd4simplex();
        for tet in 0..5 {
            let u = move_14(&t, tet).unwrap();
            assert_eq!(u.num_tetrahedra(), 8);
            assert_eq!(u.num_vertices(), 6);
            assert_eq!(u.num_edges(), 14);
            assert_eq!(u.num_faces(), 16);
            assert_eq!(u.euler_characteristic(), 0);
            check_manifold(&u);
            let apex = (0..u.num_vertices()).find(|&v| u.label(v).is_none()).unwrap();
            let back = move_41(&u, apex).unwrap();
            assert_eq!(isomorphism_signature(&back), isomorphism_signature(&t));
        }
    }

    #[test]
    fn four_one_on_sphere_vertex() {
        let t = bd4simplex();
        let u = move_41(&t, 0).unwrap();
        assert_eq!(u.num_tetrahedra(), 2);
        assert_eq!(u.num_vertices(), 4);
        check_manifold(&u);
        assert_eq!(isomorphism_signature(&u), isomorphism_signature(&two_tet()));
        let bigger = move_14(&t, 0).unwrap();
        let deg = (0..bigger.num_vertices())
            .find(|&v| bigger.vertex_slots(v).len() != 4)
            .unwrap();
        assert!(matches!(move_41(&bigger, deg), Err(MoveError::NotFourValent { .. })));
    }

    #[test]
    fn two_three_and_back() {
        for t in [bd4simplex(), two_tet()] {
            for f in 0..t.num_faces() {
                let u = move_23(&t, f).unwrap();
                assert_eq!(u.num_tetrahedra(), t.num_tetrahedra() + 1);
                assert_eq!(u.num_vertices(), t.num_vertices());
                assert_eq!(u.num_edges(), t.num_edges() + 1);
                assert_eq!(u.euler_characteristic(), t.euler_characteristic());
                check_manifold(&u);
                let new_edge = (0..u.num_edges())
                    .filter(|&e| legal_targets(&u, MoveKind::M32).contains(&e))
                    .collect::<Vec<_>>();
                assert!(!new_edge.is_empty());
                let back = new_edge
                    .iter()
                    .map(|&e| isomorphism_signature(&move_32(&u, e).unwrap()))
                    .any(|s| s == isomorphism_signature(&t));
                assert!(back, "no 3-2 move undoes 2-3 on face {f}");
            }
        }
    }

    #[test]
    fn move_errors() {
        let one = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        assert_eq!(move_23(&one, 0).unwrap_err(), MoveError::BoundaryFace(0));
        let t = bd4simplex();
        // every edge of the sphere has degree 3 but sits in 3 distinct tets
        assert!(move_32(&t, 0).is_ok());
        let u = move_14(&t, 0).unwrap();
        let e4 = (0..u.num_edges())
            .find(|&e| u.edge_slots(e).len() == 4)
            .unwrap();
        assert!(matches!(move_32(&u, e4), Err(MoveError::EdgeDegreeNot3 { degree: 4, .. })));
        let tt = two_tet();
        assert!(matches!(move_32(&tt, 0), Err(MoveError::EdgeDegreeNot3 { .. })));
    }

    #[test]
    fn walks_are_deterministic_and_preserve_structure() {
        let t = bd4simplex();
        let w = MoveWeights::uniform();
        let (a, ta) = random_walk(&t, 30, 42, &w).unwrap();
        let (b, tb) = random_walk(&t, 30, 42, &w).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(isomorphism_signature(&a), isomorphism_signature(&b));
        check_manifold(&a);
        assert_eq!(a.euler_characteristic(), 0);
        let (same, trace) = random_walk(&t, 0, 1, &w).unwrap();
        assert!(trace.is_empty());
        assert_eq!(isomorphism_signature(&same), isomorphism_signature(&t));
        let only41 = MoveWeights { m14: 0.0, m41: 1.0, m23: 0.0, m32: 0.0 };
        let (small, _) = random_walk(&t, 1, 3, &only41).unwrap();
        assert_eq!(random_walk(&small, 1, 3, &only41).unwrap_err(), MoveError::NoLegalMove);
    }

    #[test]
    fn every_move_kind_round_trips_on_walk_states() {
        let t = bd4simplex();
        let (w, _) = random_walk(&t, 15, 9, &MoveWeights::uniform()).unwrap();
        let sig = isomorphism_signature(&w);
        for f in legal_targets(&w, MoveKind::M23).into_iter().take(5) {
            let u = move_23(&w, f).unwrap();
            check_manifold(&u);
            let ok = legal_targets(&u, MoveKind::M32)
                .into_iter()
                .any(|e| isomorphism_signature(&move_32(&u, e).unwrap()) == sig);
            assert!(ok);
        }
        for e in legal_targets(&w, MoveKind::M32).into_iter().take(5) {
            let u = move_32(&w, e).unwrap();
            check_manifold(&u);
            assert_eq!(u.euler_characteristic(), 0);
        }
    }
}
