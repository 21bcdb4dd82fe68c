//! Pseudomanifold validation, vertex-link classification and the singular
//! skeletons X(1) ⊇ X(0) with their weighted Γ-signature.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::surface::SurfaceClassification;
use crate::tri::{TriError, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("complex is not closed; cone off the boundary first")]
    NotClosed,
    #[error("vertex class {0} does not exist")]
    InvalidVertex(usize),
    #[error("complex is not a pseudomanifold: {0}")]
    NotPseudomanifold(String),
    #[error("inconsistent skeleton: {0}")]
    InconsistentSkeleton(String),
}

impl From<TriError> for AnalysisError {
    fn from(e: TriError) -> Self {
        match e {
            TriError::InvalidVertex(v) => AnalysisError::InvalidVertex(v),
            TriError::ComplexNotClosed => AnalysisError::NotClosed,
            other => AnalysisError::NotPseudomanifold(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum Validation {
    ClosedPseudomanifold,
    PseudomanifoldWithBoundary { boundary_faces: usize },
    Invalid { reason: String },
}

impl Validation {
    pub fn describe(&self) -> String {
        match self {
            Validation::ClosedPseudomanifold => "closed pseudomanifold".into(),
            Validation::PseudomanifoldWithBoundary { .. } => "pseudomanifold with boundary".into(),
            Validation::Invalid { reason } => format!("invalid: {reason}"),
        }
    }
}

/// Face-count validation. Face slots can never be shared by three
/// tetrahedra once a [`Triangulation`] exists, so the remaining failure is an
/// edge identified with itself in reverse, whose midpoint would be a
/// singular point off the vertex set.
pub fn validate(t: &Triangulation) -> Validation {
    if let Some(&e) = t.self_reversed_edges().first() {
        return Validation::Invalid {
            reason: format!("edge class {e} is identified with its own reverse"),
        };
    }
    for f in 0..t.num_faces() {
        let n = t.face_slots(f).len();
        if n > 2 {
            return Validation::Invalid {
                reason: format!("face class {f} lies in {n} tetrahedra"),
            };
        }
    }
    let boundary = t.boundary_faces().len();
    if boundary == 0 {
        Validation::ClosedPseudomanifold
    } else {
        Validation::PseudomanifoldWithBoundary {
            boundary_faces: boundary,
        }
    }
}

fn require_closed(t: &Triangulation) -> Result<(), AnalysisError> {
    match validate(t) {
        Validation::ClosedPseudomanifold => Ok(()),
        Validation::PseudomanifoldWithBoundary { .. } => Err(AnalysisError::NotClosed),
        Validation::Invalid { reason } => Err(AnalysisError::NotPseudomanifold(reason)),
    }
}

pub fn classify_vertex_link(t: &Triangulation, v: usize) -> Result<SurfaceClassification, AnalysisError> {
    Ok(t.vertex_link(v)?.classify())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum VertexNature {
    ManifoldPoint,
    /// Link is the suspension of `k` circles.
    X1NotX0 { k: usize },
    X0Point,
}

/// Decides the local type of a vertex from its link classification.
pub fn nature_from_link(c: &SurfaceClassification) -> VertexNature {
    if c.is_sphere() {
        return VertexNature::ManifoldPoint;
    }
    let k = c.components.len();
    if c.pinches.len() != 2 || k < 2 {
        return VertexNature::X0Point;
    }
    if !c.components.iter().all(|comp| comp.orientable && comp.euler == 2) {
        return VertexNature::X0Point;
    }
    for pinch in &c.pinches {
        let mut seen = vec![false; k];
        for &comp in &pinch.components {
            if seen[comp] {
                return VertexNature::X0Point;
            }
            seen[comp] = true;
        }
        if !seen.iter().all(|&s| s) {
            return VertexNature::X0Point;
        }
    }
    VertexNature::X1NotX0 { k }
}

pub fn vertex_nature(t: &Triangulation, v: usize) -> Result<VertexNature, AnalysisError> {
    Ok(nature_from_link(&classify_vertex_link(t, v)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum GammaNode {
    Point { vertex: usize },
    /// A closed singular circle through `edges` singular edges.
    Circle { edges: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaArc {
    /// Node indices of the two ends.
    pub endpoints: [usize; 2],
    pub interior_vertices: usize,
    pub k: usize,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GammaSignature {
    pub nodes: Vec<GammaNode>,
    pub arcs: Vec<GammaArc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkeletonReport {
    pub x0_vertices: Vec<usize>,
    pub x1_vertices: Vec<usize>,
    pub x1_edges: Vec<usize>,
    /// Link circle count of every edge class.
    pub edge_circles: Vec<usize>,
    pub natures: Vec<VertexNature>,
    pub gamma: GammaSignature,
}

pub fn skeletons(t: &Triangulation) -> Result<SkeletonReport, AnalysisError> {
    require_closed(t)?;
    let edge_circles: Vec<usize> = t.edge_links().iter().map(|l| l.circles.len()).collect();
    let x1_edges: Vec<usize> = (0..t.num_edges()).filter(|&e| edge_circles[e] >= 2).collect();
    let natures = (0..t.num_vertices())
        .map(|v| vertex_nature(t, v))
        .collect::<Result<Vec<_>, _>>()?;

    // singular edge ends at each vertex: (edge, end) with end 0 = tail
    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.num_vertices()];
    for &e in &x1_edges {
        let (a, b) = t.edge_ends(e);
        ends[a].push((e, 0));
        ends[b].push((e, 1));
    }
    let mut x1_vertices = Vec::new();
    let mut x0_vertices = Vec::new();
    for v in 0..t.num_vertices() {
        match natures[v] {
            VertexNature::ManifoldPoint => {
                if !ends[v].is_empty() {
                    return Err(AnalysisError::InconsistentSkeleton(format!(
                        "singular edge {} ends at manifold vertex {v}",
                        ends[v][0].0
                    )));
                }
            }
            VertexNature::X1NotX0 { k } => {
                if ends[v].len() != 2 {
                    return Err(AnalysisError::InconsistentSkeleton(format!(
                        "vertex {v} has {} singular edge ends, expected 2",
                        ends[v].len()
                    )));
                }
                for &(e, _) in &ends[v] {
                    if edge_circles[e] != k {
                        return Err(AnalysisError::InconsistentSkeleton(format!(
                            "edge {e} has {} link circles but vertex {v} expects {k}",
                            edge_circles[e]
                        )));
                    }
                }
                x1_vertices.push(v);
            }
            VertexNature::X0Point => {
                x1_vertices.push(v);
                x0_vertices.push(v);
            }
        }
    }

    let gamma = gamma_signature(t, &natures, &ends, &x1_edges, &edge_circles);
    Ok(SkeletonReport {
        x0_vertices,
        x1_vertices,
        x1_edges,
        edge_circles,
        natures,
        gamma,
    })
}

fn gamma_signature(
    t: &Triangulation,
    natures: &[VertexNature],
    ends: &[Vec<(usize, usize)>],
    x1_edges: &[usize],
    edge_circles: &[usize],
) -> GammaSignature {
    let mut nodes = Vec::new();
    let mut node_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, n) in natures.iter().enumerate() {
        if *n == VertexNature::X0Point {
            node_of.insert(v, nodes.len());
            nodes.push(GammaNode::Point { vertex: v });
        }
    }
    let other_end = |e: usize, side: usize| {
        let (a, b) = t.edge_ends(e);
        if side == 0 {
            (b, 1)
        } else {
            (a, 0)
        }
    };
    let mut used = vec![false; t.num_edges()];
    let mut arcs = Vec::new();
    for (&v, &node) in &node_of {
        for &(e0, side0) in &ends[v] {
            if used[e0] {
                continue;
            }
            // a loop at an X(0) vertex is listed twice; the first use wins
            let mut edges = vec![e0];
            used[e0] = true;
            let (mut w, mut arrived) = other_end(e0, side0);
            let mut interior = 0;
            while let VertexNature::X1NotX0 { .. } = natures[w] {
                interior += 1;
                let (e, side) = *ends[w]
                    .iter()
                    .find(|&&(e, s)| (e, s) != (edges[edges.len() - 1], arrived))
                    .expect("two singular ends");
                edges.push(e);
                used[e] = true;
                let next = other_end(e, side);
                w = next.0;
                arrived = next.1;
            }
            arcs.push(GammaArc {
                endpoints: [node, node_of[&w]],
                interior_vertices: interior,
                k: edge_circles[e0],
                edges,
            });
        }
    }
    // remaining singular edges form closed circles through X1∖X0 vertices
    for &e0 in x1_edges {
        if used[e0] {
            continue;
        }
        used[e0] = true;
        let mut count = 1;
        let (mut w, mut arrived) = other_end(e0, 0);
        let mut last = e0;
        loop {
            let (e, side) = *ends[w]
                .iter()
                .find(|&&(e, s)| (e, s) != (last, arrived))
                .expect("two singular ends");
            if e == e0 {
                break;
            }
            used[e] = true;
            count += 1;
            let next = other_end(e, side);
            w = next.0;
            arrived = next.1;
            last = e;
        }
        nodes.push(GammaNode::Circle {
            edges: count,
            k: edge_circles[e0],
        });
    }
    GammaSignature { nodes, arcs }
}

/// Weighted multigraph isomorphism of two Γ-signatures.
pub fn same_gamma_class(r1: &SkeletonReport, r2: &SkeletonReport) -> bool {
    same_gamma(&r1.gamma, &r2.gamma)
}

pub fn same_gamma(g1: &GammaSignature, g2: &GammaSignature) -> bool {
    let circles = |g: &GammaSignature| {
        let mut c: Vec<(usize, usize)> = g
            .nodes
            .iter()
            .filter_map(|n| match n {
                GammaNode::Circle { edges, k } => Some((*edges, *k)),
                _ => None,
            })
            .collect();
        c.sort_unstable();
        c
    };
    if circles(g1) != circles(g2) || g1.arcs.len() != g2.arcs.len() {
        return false;
    }
    let points = |g: &GammaSignature| -> Vec<usize> {
        (0..g.nodes.len())
            .filter(|&i| matches!(g.nodes[i], GammaNode::Point { .. }))
            .collect()
    };
    let p1 = points(g1);
    let p2 = points(g2);
    if p1.len() != p2.len() {
        return false;
    }
    // arc multisets keyed by unordered endpoint pair
    let arc_map = |g: &GammaSignature| {
        let mut m: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for a in &g.arcs {
            let key = (a.endpoints[0].min(a.endpoints[1]), a.endpoints[0].max(a.endpoints[1]));
            m.entry(key).or_default().push((a.interior_vertices, a.k));
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    };
    let m1 = arc_map(g1);
    let m2 = arc_map(g2);
    let degree = |m: &BTreeMap<(usize, usize), Vec<(usize, usize)>>, n: usize| {
        let mut d: Vec<(usize, usize)> = m
            .iter()
            .filter(|((a, b), _)| *a == n || *b == n)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        d.sort_unstable();
        d
    };
    let d1: Vec<_> = p1.iter().map(|&n| degree(&m1, n)).collect();
    let d2: Vec<_> = p2.iter().map(|&n| degree(&m2, n)).collect();

    fn extend(
        i: usize,
        p1: &[usize],
        p2: &[usize],
        d1: &[Vec<(usize, usize)>],
        d2: &[Vec<(usize, usize)>],
        m1: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
        m2: &BTreeMap<(usize, usize), Vec<(usize, usize)>>,
        map: &mut Vec<usize>,
        taken: &mut Vec<bool>,
    ) -> bool {
        if i == p1.len() {
            return true;
        }
        for j in 0..p2.len() {
            if taken[j] || d1[i] != d2[j] {
                continue;
            }
            map.push(j);
            let ok = (0..=i).all(|x| {
                let a = (p1[x].min(p1[i]), p1[x].max(p1[i]));
                let (bx, bi) = (p2[map[x]], p2[j]);
                let b = (bx.min(bi), bx.max(bi));
                m1.get(&a) == m2.get(&b)
            });
            if ok {
                taken[j] = true;
                if extend(i + 1, p1, p2, d1, d2, m1, m2, map, taken) {
                    return true;
                }
                taken[j] = false;
            }
            map.pop();
        }
        false
    }
    let mut map = Vec::new();
    let mut taken = vec![false; p2.len()];
    extend(0, &p1, &p2, &d1, &d2, &m1, &m2, &mut map, &mut taken)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm4;

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
    fn validation_states() {
        assert_eq!(validate(&bd4simplex()), Validation::ClosedPseudomanifold);
        let one = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        assert_eq!(
            validate(&one),
            Validation::PseudomanifoldWithBoundary { boundary_faces: 4 }
        );
        assert_eq!(skeletons(&one).unwrap_err(), AnalysisError::NotClosed);
    }

    #[test]
    fn self_reversed_edge_is_invalid() {
        // face 3 (slots 0,1,2) glued to face 2 (slots 0,1,3) of the same tet
        // swapping slots 0 and 1 reverses edge 01
        let p = Perm4::new([1, 0, 3, 2]).unwrap();
        let t = Triangulation::build_from_gluings(1, &[(0, 3, 0, 2, p)]).unwrap();
        assert!(matches!(validate(&t), Validation::Invalid { .. }));
    }

    #[test]
    fn sphere_is_all_manifold() {
        let t = bd4simplex();
        for v in 0..5 {
            assert_eq!(vertex_nature(&t, v).unwrap(), VertexNature::ManifoldPoint);
            let c = classify_vertex_link(&t, v).unwrap();
            assert_eq!(c.components.len(), 1);
            assert!(c.pinches.is_empty());
        }
        let rep = skeletons(&t).unwrap();
        assert!(rep.x0_vertices.is_empty());
        assert!(rep.x1_edges.is_empty());
        assert!(rep.gamma.nodes.is_empty());
        assert!(same_gamma_class(&rep, &rep));
    }

    fn circle_sig(m: usize, k: usize) -> GammaSignature {
        GammaSignature {
            nodes: vec![GammaNode::Circle { edges: m, k }],
            arcs: vec![],
        }
    }

    #[test]
    fn gamma_isomorphism() {
        assert!(same_gamma(&circle_sig(3, 2), &circle_sig(3, 2)));
        assert!(!same_gamma(&circle_sig(3, 2), &circle_sig(4, 2)));
        assert!(!same_gamma(&circle_sig(3, 2), &circle_sig(3, 3)));
        let arc = |a, b, i, k| GammaArc {
            endpoints: [a, b],
            interior_vertices: i,
            k,
            edges: vec![],
        };
        let pts = |n: usize| (0..n).map(|v| GammaNode::Point { vertex: v }).collect::<Vec<_>>();
        // path 0 -(1)- 1 -(2)- 2 versus the same path relabelled
        let g1 = GammaSignature {
            nodes: pts(3),
            arcs: vec![arc(0, 1, 1, 2), arc(1, 2, 2, 2)],
        };
        let g2 = GammaSignature {
            nodes: pts(3),
            arcs: vec![arc(2, 0, 2, 2), arc(1, 2, 1, 2)],
        };
        let g3 = GammaSignature {
            nodes: pts(3),
            arcs: vec![arc(0, 1, 1, 2), arc(0, 2, 2, 3)],
        };
        assert!(same_gamma(&g1, &g2));
        assert!(!same_gamma(&g1, &g3));
    }
}
