//! Canonical isomorphism signatures.
//!
//! For each connected component every (start tetrahedron, slot relabeling)
//! pair seeds a breadth-first renumbering; the lexicographically smallest
//! encoding wins. The encoding covers gluings and the vertex and edge
//! identifications, so two complexes share a signature exactly when they are
//! combinatorially isomorphic.

use std::collections::{HashMap, VecDeque};

use crate::perm::{Perm4, EDGE_SLOTS};
use crate::tri::Triangulation;

const BOUNDARY: u32 = u32::MAX;

fn components(t: &Triangulation) -> Vec<Vec<usize>> {
    let n = t.num_tetrahedra();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    // tets sharing a vertex or edge class are connected even without a gluing
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); t.num_vertices()];
    for tet in 0..n {
        for s in 0..4 {
            by_vertex[t.vertex_of(tet, s)].push(tet);
        }
    }
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        comp[start] = id;
        while let Some(tet) = queue.pop_front() {
            members.push(tet);
            let glued = (0..4).filter_map(|f| t.gluing(tet, f).map(|(u, _)| u));
            let shared = (0..4).flat_map(|s| by_vertex[t.vertex_of(tet, s)].iter().copied());
            for u in glued.chain(shared) {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn perm_code(p: Perm4) -> u32 {
    let im = p.images();
    (im[0] as u32) * 64 + (im[1] as u32) * 16 + (im[2] as u32) * 4 + im[3] as u32
}

#[derive(Clone)]
struct Encoder<'a> {
    t: &'a Triangulation,
    index: HashMap<usize, u32>,
    order: Vec<(usize, Perm4)>,
    code: Vec<u32>,
    vids: HashMap<usize, u32>,
    eids: HashMap<usize, (u32, bool)>,
    pos: usize,
    // set once the code is already known to be below the current best
    below: bool,
}

impl<'a> Encoder<'a> {
    fn new(t: &'a Triangulation) -> Self {
        Encoder {
            t,
            index: HashMap::new(),
            order: Vec::new(),
            code: Vec::new(),
            vids: HashMap::new(),
            eids: HashMap::new(),
            pos: 0,
            below: false,
        }
    }

    fn push(&mut self, x: u32, best: Option<&[u32]>) -> bool {
        self.code.push(x);
        if !self.below {
            if let Some(b) = best {
                match x.cmp(&b[self.code.len() - 1]) {
                    std::cmp::Ordering::Less => self.below = true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    }

    fn discover(&mut self, tet: usize, pi: Perm4) -> u32 {
        let next = self.order.len() as u32;
        let id = *self.index.entry(tet).or_insert(next);
        if id == next {
            self.order.push((tet, pi));
        }
        id
    }

    /// Encodes the queued tetrahedra, then any members reachable only
    /// through shared vertex or edge classes, branching over the
    /// canonically admissible continuations.
    fn run(mut self, members: &[usize], best: Option<&[u32]>) -> Option<Vec<u32>> {
        let t = self.t;
        while self.pos < self.order.len() {
            let (tet, pi) = self.order[self.pos];
            let inv = pi.inverse();
            for nf in 0..4 {
                let of = inv.apply(nf);
                let (a, b) = match t.gluing(tet, of) {
                    None => (BOUNDARY, 0),
                    Some((u, h)) => {
                        // chosen so the gluing reads as the identity
                        let ui = self.discover(u, pi.compose(h.inverse()));
                        let pu = self.order[ui as usize].1;
                        (ui, perm_code(pu.compose(h).compose(inv)))
                    }
                };
                if !self.push(a, best) || !self.push(b, best) {
                    return None;
                }
            }
            for ns in 0..4 {
                let v = t.vertex_of(tet, inv.apply(ns));
                let next = self.vids.len() as u32;
                let id = *self.vids.entry(v).or_insert(next);
                if !self.push(id, best) {
                    return None;
                }
            }
            for &(na, nb) in &EDGE_SLOTS {
                let (oa, ob) = (inv.apply(na), inv.apply(nb));
                let oe = crate::perm::edge_index(oa, ob);
                let e = t.edge_of(tet, oe);
                let rev = t.edge_reversed(tet, oe) ^ (oa > ob);
                let next = self.eids.len() as u32;
                let (id, ref_rev) = *self.eids.entry(e).or_insert((next, rev));
                if !self.push(2 * id + (rev ^ ref_rev) as u32, best) {
                    return None;
                }
            }
            self.pos += 1;
        }
        if self.order.len() == members.len() {
            return Some(self.code);
        }
        // continue from the smallest already numbered vertex class
        let mut target = u32::MAX;
        for &m in members {
            if self.index.contains_key(&m) {
                continue;
            }
            for s in 0..4 {
                if let Some(&id) = self.vids.get(&t.vertex_of(m, s)) {
                    target = target.min(id);
                }
            }
        }
        let mut result: Option<Vec<u32>> = None;
        for &m in members {
            if self.index.contains_key(&m) {
                continue;
            }
            for s in 0..4 {
                if self.vids.get(&t.vertex_of(m, s)) != Some(&target) {
                    continue;
                }
                for sigma in Perm4::all().filter(|p| p.apply(s) == 0) {
                    let mut branch = self.clone();
                    branch.discover(m, sigma);
                    let bound = match (&result, best) {
                        (Some(r), _) => Some(r.as_slice()),
                        (None, b) if !self.below => b,
                        _ => None,
                    };
                    if let Some(code) = branch.run(members, bound) {
                        if result.as_ref().map_or(true, |r| code < *r) {
                            result = Some(code);
                        }
                    }
                }
            }
        }
        result
    }
}

/// Canonical string; equal strings iff the complexes are isomorphic.
pub fn isomorphism_signature(t: &Triangulation) -> String {
    let mut parts: Vec<Vec<u32>> = components(t)
        .iter()
        .map(|members| {
            let mut best: Option<Vec<u32>> = None;
            for &start in members {
                for sigma in Perm4::all() {
                    let mut enc = Encoder::new(t);
                    enc.discover(start, sigma);
                    if let Some(code) = enc.run(members, best.as_deref()) {
                        if best.as_ref().map_or(true, |b| code < *b) {
                            best = Some(code);
                        }
                    }
                }
            }
            best.unwrap_or_default()
        })
        .collect();
    parts.sort();
    let render = |code: &Vec<u32>| {
        code.iter()
            .map(|x| if *x == BOUNDARY { "b".to_string() } else { x.to_string() })
            .collect::<Vec<_>>()
            .join(".")
    };
    parts.iter().map(render).collect::<Vec<_>>().join("+")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bd4simplex() -> Triangulation {
        let tuples: Vec<[i64; 4]> = (0..5)
            .map(|skip| {
                let v: Vec<i64> = (0..5).filter(|&x| x != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        Triangulation::from_vertex_tuples(&tuples).unwrap()
    }

    #[test]
    fn relabel_invariance() {
        let t = bd4simplex();
        let sig = isomorphism_signature(&t);
        let all: Vec<Perm4> = Perm4::all().collect();
        for k in 0..10 {
            let tets = [(k + 1) % 5, (k + 3) % 5, k % 5, (k + 4) % 5, (k + 2) % 5];
            let slots: Vec<Perm4> = (0..5).map(|i| all[(7 * i + 5 * k) % 24]).collect();
            assert_eq!(isomorphism_signature(&t.relabel(&tets, &slots)), sig);
        }
    }

    #[test]
    fn distinguishes_complexes() {
        let t = bd4simplex();
        let gl: Vec<_> = (0..4).map(|f| (0, f, 1, f, Perm4::IDENTITY)).collect();
        let two = Triangulation::build_from_gluings(2, &gl).unwrap();
        assert_ne!(isomorphism_signature(&t), isomorphism_signature(&two));
        // one tet vs two tets sharing a face
        let a = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        let b = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3], [0, 1, 2, 4]]).unwrap();
        assert_ne!(isomorphism_signature(&a), isomorphism_signature(&b));
    }

    #[test]
    fn vertex_identifications_matter() {
        let t = bd4simplex();
        let mut raw = t.to_raw();
        for tet in raw.tets.iter_mut() {
            for tag in tet.vertex_tags.iter_mut() {
                if *tag == 1 {
                    *tag = 0;
                }
            }
        }
        let pinched = Triangulation::from_raw(&raw).unwrap();
        assert_eq!(pinched.num_vertices(), 4);
        assert_ne!(isomorphism_signature(&t), isomorphism_signature(&pinched));
    }

    #[test]
    fn union_order_does_not_matter() {
        let t = bd4simplex();
        let gl: Vec<_> = (0..4).map(|f| (0, f, 1, f, Perm4::IDENTITY)).collect();
        let two = Triangulation::build_from_gluings(2, &gl).unwrap();
        assert_eq!(
            isomorphism_signature(&t.disjoint_union(&two)),
            isomorphism_signature(&two.disjoint_union(&t))
        );
    }
}
