//! The `ptri-1` (3-complex) and `ptri2-1` (2-complex) JSON file formats.
//!
//! ```json
//! { "format": "ptri-1", "mode": "vertex" | "gluing",
//!   "tetrahedra": [[l0, l1, l2, l3], ...],
//!   "gluings": [[tet, face, otherTet, otherFace, [p0, p1, p2]], ...] }
//! ```
//!
//! In vertex mode gluings are inferred from shared vertex triples. In gluing
//! mode `tetrahedra` is optional; when present, corners carrying the same
//! label are the same vertex. The gluing code lists, for the three slots of
//! `face` in ascending order, the position of each image among the ascending
//! slots of `otherFace`.
//!
//! Two optional fields keep gluing mode lossless for quotient complexes:
//! `"labels": false` marks the tetrahedron entries as bare vertex ids, and
//! `"edges"` gives per tetrahedron six `[id, reversed]` edge identifications
//! for edges that are identified beyond what the gluings imply.
//!
//! `ptri2-1` is the same with `"triangles"` (three labels each) and gluing
//! codes `[tri, edge, otherTri, otherEdge, [q0, q1]]` over the two corners of
//! an edge.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{Perm3, Perm4};
use crate::surface::{SurfaceComplex, SurfaceError};
use crate::tri::{raw_from_gluings, EdgeTag, TriError, Triangulation, VertexLabel};

pub const FORMAT_3D: &str = "ptri-1";
pub const FORMAT_2D: &str = "ptri2-1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format {found:?} (expected {expected:?})")]
    Format { found: String, expected: &'static str },
    #[error("invalid file: {0}")]
    Invalid(String),
    #[error(transparent)]
    Triangulation(#[from] TriError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Vertex,
    Gluing,
}

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtriFile {
    pub format: String,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tetrahedra: Option<Vec<[VertexLabel; 4]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gluings: Vec<(usize, usize, usize, usize, [u8; 3])>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub labels: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[(u32, bool); 6]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ptri2File {
    pub format: String,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangles: Option<Vec<[VertexLabel; 3]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gluings: Vec<(usize, usize, usize, usize, [u8; 2])>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub labels: bool,
}

fn check_format(found: &str, expected: &'static str) -> Result<(), IoError> {
    if found == expected {
        Ok(())
    } else {
        Err(IoError::Format {
            found: found.to_string(),
            expected,
        })
    }
}

/// Per-class names: the user labels when every class has a distinct one,
/// otherwise the class ids.
fn class_names(n: usize, label: impl Fn(usize) -> Option<VertexLabel>) -> (Vec<VertexLabel>, bool) {
    let labels: Vec<Option<VertexLabel>> = (0..n).map(label).collect();
    let mut seen = std::collections::BTreeSet::new();
    let distinct = labels.iter().all(|l| l.as_ref().is_some_and(|l| seen.insert(l.clone())));
    if distinct && n > 0 {
        (labels.into_iter().map(|l| l.expect("checked")).collect(), true)
    } else {
        ((0..n).map(|v| VertexLabel::Int(v as i64)).collect(), false)
    }
}

/// Same gluings and the same vertex and edge classes, tetrahedron by
/// tetrahedron (class ids may be numbered differently).
fn same_structure(a: &Triangulation, b: &Triangulation) -> bool {
    if a.num_tetrahedra() != b.num_tetrahedra()
        || a.num_vertices() != b.num_vertices()
        || a.num_edges() != b.num_edges()
    {
        return false;
    }
    let mut vmap = HashMap::new();
    let mut emap = HashMap::new();
    for t in 0..a.num_tetrahedra() {
        for f in 0..4 {
            if a.gluing(t, f) != b.gluing(t, f) {
                return false;
            }
        }
        for s in 0..4 {
            if *vmap.entry(a.vertex_of(t, s)).or_insert(b.vertex_of(t, s)) != b.vertex_of(t, s) {
                return false;
            }
        }
        for e in 0..6 {
            let flip = a.edge_reversed(t, e) ^ b.edge_reversed(t, e);
            let want = (b.edge_of(t, e), flip);
            let got = *emap.entry(a.edge_of(t, e)).or_insert(want);
            if got != want {
                return false;
            }
        }
    }
    true
}

pub fn to_ptri(t: &Triangulation) -> PtriFile {
    let (names, labelled) = class_names(t.num_vertices(), |v| t.label(v).cloned());
    let tuples: Vec<[VertexLabel; 4]> = (0..t.num_tetrahedra())
        .map(|tet| std::array::from_fn(|s| names[t.vertex_of(tet, s)].clone()))
        .collect();
    if let Ok(rebuilt) = Triangulation::build_from_vertex_tuples(&tuples) {
        if same_structure(t, &rebuilt) {
            return PtriFile {
                format: FORMAT_3D.into(),
                mode: Mode::Vertex,
                tetrahedra: Some(tuples),
                gluings: Vec::new(),
                labels: labelled,
                edges: None,
            };
        }
    }
    let mut gluings = Vec::new();
    for tet in 0..t.num_tetrahedra() {
        for f in 0..4 {
            if let Some((u, p)) = t.gluing(tet, f) {
                if (u, p.apply(f)) > (tet, f) {
                    gluings.push((tet, f, u, p.apply(f), p.to_face_code(f)));
                }
            }
        }
    }
    let mut file = PtriFile {
        format: FORMAT_3D.into(),
        mode: Mode::Gluing,
        tetrahedra: Some(tuples),
        gluings,
        labels: labelled,
        edges: None,
    };
    let implied = from_ptri(&file).expect("gluings of a valid complex");
    if implied.num_edges() != t.num_edges() {
        file.edges = Some(
            (0..t.num_tetrahedra())
                .map(|tet| std::array::from_fn(|e| (t.edge_of(tet, e) as u32, t.edge_reversed(tet, e))))
                .collect(),
        );
    }
    file
}

pub fn from_ptri(file: &PtriFile) -> Result<Triangulation, IoError> {
    check_format(&file.format, FORMAT_3D)?;
    match file.mode {
        Mode::Vertex => {
            let tuples = file
                .tetrahedra
                .as_ref()
                .ok_or_else(|| IoError::Invalid("vertex mode needs \"tetrahedra\"".into()))?;
            if !file.gluings.is_empty() || file.edges.is_some() {
                return Err(IoError::Invalid("vertex mode takes no gluings or edges".into()));
            }
            let mut t = Triangulation::build_from_vertex_tuples(tuples)?;
            if !file.labels {
                let mut raw = t.to_raw();
                raw.labels.clear();
                t = Triangulation::from_raw(&raw)?;
            }
            Ok(t)
        }
        Mode::Gluing => {
            let n = match &file.tetrahedra {
                Some(tets) => tets.len(),
                None => file.gluings.iter().map(|g| g.0.max(g.2) + 1).max().unwrap_or(0),
            };
            let mut list = Vec::with_capacity(file.gluings.len());
            for &(tet, f, u, g, code) in &file.gluings {
                let p = Perm4::from_face_code(f, g, code).ok_or(TriError::BadPermutation { tet, face: f })?;
                list.push((tet, f, u, g, p));
            }
            let mut raw = raw_from_gluings(n, &list)?;
            if let Some(tets) = &file.tetrahedra {
                let mut ids: BTreeMap<&VertexLabel, u32> = BTreeMap::new();
                for (tet, labels) in tets.iter().enumerate() {
                    for (s, l) in labels.iter().enumerate() {
                        let next = ids.len() as u32;
                        let id = *ids.entry(l).or_insert(next);
                        raw.tets[tet].vertex_tags[s] = id;
                    }
                }
                if file.labels {
                    raw.labels = ids.into_iter().map(|(l, id)| (id, l.clone())).collect();
                }
            }
            if let Some(edges) = &file.edges {
                if edges.len() != n {
                    return Err(IoError::Invalid(format!("\"edges\" has {} entries for {n} tetrahedra", edges.len())));
                }
                for (tet, es) in edges.iter().enumerate() {
                    for (e, &(id, reversed)) in es.iter().enumerate() {
                        raw.tets[tet].edge_tags[e] = EdgeTag { id, reversed };
                    }
                }
            }
            Ok(Triangulation::from_raw(&raw)?)
        }
    }
}

pub fn to_ptri2(s: &SurfaceComplex) -> Ptri2File {
    let (names, labelled) = class_names(s.num_vertices(), |v| s.label(v).cloned());
    let tris: Vec<[VertexLabel; 3]> = (0..s.num_triangles())
        .map(|i| std::array::from_fn(|k| names[s.vertex_of(i, k)].clone()))
        .collect();
    if let Ok(rebuilt) = SurfaceComplex::from_labelled_triangles(&tris) {
        let same = (0..s.num_triangles()).all(|i| (0..3).all(|j| rebuilt.gluing(i, j) == s.gluing(i, j)))
            && rebuilt.num_vertices() == s.num_vertices();
        if same {
            return Ptri2File {
                format: FORMAT_2D.into(),
                mode: Mode::Vertex,
                triangles: Some(tris),
                gluings: Vec::new(),
                labels: labelled,
            };
        }
    }
    let mut gluings = Vec::new();
    for i in 0..s.num_triangles() {
        for j in 0..3 {
            if let Some((u, q)) = s.gluing(i, j) {
                let k = q.apply(j);
                if (u, k) > (i, j) {
                    gluings.push((i, j, u, k, edge_code(q, j)));
                }
            }
        }
    }
    Ptri2File {
        format: FORMAT_2D.into(),
        mode: Mode::Gluing,
        triangles: Some(tris),
        gluings,
        labels: labelled,
    }
}

/// The two corners of edge `j`, ascending.
fn edge_corners(j: usize) -> [usize; 2] {
    let mut c = [(j + 1) % 3, (j + 2) % 3];
    c.sort_unstable();
    c
}

fn edge_code(q: Perm3, j: usize) -> [u8; 2] {
    let dst = edge_corners(q.apply(j));
    edge_corners(j).map(|c| dst.iter().position(|&d| d == q.apply(c)).expect("edge maps to edge") as u8)
}

fn from_edge_code(j: usize, k: usize, code: [u8; 2]) -> Option<Perm3> {
    if j > 2 || k > 2 || code[0] > 1 || code[1] > 1 || code[0] == code[1] {
        return None;
    }
    let (src, dst) = (edge_corners(j), edge_corners(k));
    let mut q = [0u8; 3];
    q[j] = k as u8;
    for x in 0..2 {
        q[src[x]] = dst[code[x] as usize] as u8;
    }
    Perm3::new(q)
}

pub fn from_ptri2(file: &Ptri2File) -> Result<SurfaceComplex, IoError> {
    check_format(&file.format, FORMAT_2D)?;
    let mut s = match file.mode {
        Mode::Vertex => {
            let tris = file
                .triangles
                .as_ref()
                .ok_or_else(|| IoError::Invalid("vertex mode needs \"triangles\"".into()))?;
            SurfaceComplex::from_labelled_triangles(tris)?
        }
        Mode::Gluing => {
            let n = match &file.triangles {
                Some(t) => t.len(),
                None => file.gluings.iter().map(|g| g.0.max(g.2) + 1).max().unwrap_or(0),
            };
            let mut gluings = vec![[None; 3]; n];
            for &(i, j, u, k, code) in &file.gluings {
                if i >= n || u >= n {
                    return Err(IoError::Invalid(format!("gluing references triangle {} of {n}", i.max(u))));
                }
                let q = from_edge_code(j, k, code).ok_or(SurfaceError::BadGluing { tri: i, edge: j })?;
                if gluings[i][j].is_some() || gluings[u][k].is_some() {
                    return Err(IoError::Invalid(format!("edge ({i}, {j}) or ({u}, {k}) glued twice")));
                }
                gluings[i][j] = Some((u, q));
                gluings[u][k] = Some((i, q.inverse()));
            }
            let mut ids: BTreeMap<VertexLabel, u64> = BTreeMap::new();
            let tags: Vec<[u64; 3]> = match &file.triangles {
                Some(tris) => tris
                    .iter()
                    .map(|t| {
                        t.clone().map(|l| {
                            let next = ids.len() as u64;
                            *ids.entry(l).or_insert(next)
                        })
                    })
                    .collect(),
                None => (0..n).map(|i| std::array::from_fn(|k| (3 * i + k) as u64)).collect(),
            };
            let mut s = SurfaceComplex::from_parts(gluings, tags.clone())?;
            if let Some(tris) = &file.triangles {
                for (i, t) in tris.iter().enumerate() {
                    for (k, label) in t.iter().enumerate() {
                        s.set_label(s.vertex_of(i, k), Some(label.clone()));
                    }
                }
            }
            s
        }
    };
    if !file.labels {
        for v in 0..s.num_vertices() {
            s.set_label(v, None);
        }
    }
    Ok(s)
}

/// Either kind of input file.
#[derive(Clone, Debug)]
pub enum Complex {
    Three(Triangulation),
    Two(SurfaceComplex),
}

pub fn parse(text: &str) -> Result<Complex, IoError> {
    #[derive(Deserialize)]
    struct Header {
        format: String,
    }
    let header: Header = serde_json::from_str(text)?;
    match header.format.as_str() {
        FORMAT_3D => Ok(Complex::Three(from_ptri(&serde_json::from_str(text)?)?)),
        FORMAT_2D => Ok(Complex::Two(from_ptri2(&serde_json::from_str(text)?)?)),
        other => Err(IoError::Format {
            found: other.to_string(),
            expected: FORMAT_3D,
        }),
    }
}

pub fn read(path: &Path) -> Result<Complex, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

pub fn read_triangulation(path: &Path) -> Result<Triangulation, IoError> {
    match read(path)? {
        Complex::Three(t) => Ok(t),
        Complex::Two(_) => Err(IoError::Format {
            found: FORMAT_2D.into(),
            expected: FORMAT_3D,
        }),
    }
}

pub fn read_surface(path: &Path) -> Result<SurfaceComplex, IoError> {
    match read(path)? {
        Complex::Two(s) => Ok(s),
        Complex::Three(_) => Err(IoError::Format {
            found: FORMAT_3D.into(),
            expected: FORMAT_2D,
        }),
    }
}

/// Pretty output with one tetrahedron, triangle or gluing per line.
pub fn to_string(c: &Complex) -> String {
    let value = match c {
        Complex::Three(t) => serde_json::to_value(to_ptri(t)),
        Complex::Two(s) => serde_json::to_value(to_ptri2(s)),
    }
    .expect("file structs always serialize");
    let serde_json::Value::Object(fields) = value else {
        unreachable!("file structs serialize to objects")
    };
    let fields: Vec<String> = fields
        .iter()
        .map(|(k, v)| {
            let body = match v {
                serde_json::Value::Array(rows) if !rows.is_empty() => {
                    let rows: Vec<String> = rows.iter().map(|r| format!("    {r}")).collect();
                    format!("[\n{}\n  ]", rows.join(",\n"))
                }
                other => other.to_string(),
            };
            format!("  {}: {body}", serde_json::Value::from(k.as_str()))
        })
        .collect();
    format!("{{\n{}\n}}", fields.join(",\n"))
}

pub fn write(path: &Path, c: &Complex) -> Result<(), IoError> {
    std::fs::write(path, to_string(c) + "\n").map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        boundary_4simplex, example, identify_vertices, mapping_cylinder_attach, tetrahelix, two_tet_sphere,
        Example, EXAMPLE_NAMES,
    };
    use crate::signature::isomorphism_signature;

    fn roundtrip(t: &Triangulation) -> (Mode, Triangulation) {
        let file = to_ptri(t);
        let text = serde_json::to_string(&file).unwrap();
        let back = match parse(&text).unwrap() {
            Complex::Three(b) => b,
            Complex::Two(_) => panic!("wrong kind"),
        };
        (file.mode, back)
    }

    #[test]
    fn lossless_roundtrips() {
        let pinched = identify_vertices(&boundary_4simplex(), &[vec![0, 1]]).unwrap();
        let (mc, _) = mapping_cylinder_attach(&tetrahelix(24), 0, 2, 3).unwrap();
        let mc_copy = mc.clone();
        let cases = [
            (boundary_4simplex(), Mode::Vertex),
            (two_tet_sphere(), Mode::Vertex),
            (pinched, Mode::Gluing),
            (mc, to_ptri(&mc_copy).mode),
        ];
        for (t, mode) in cases {
            let (m, back) = roundtrip(&t);
            assert_eq!(m, mode);
            assert!(same_structure(&t, &back));
            assert_eq!(isomorphism_signature(&t), isomorphism_signature(&back));
            assert_eq!(t.has_labels(), back.has_labels());
        }
    }

    #[test]
    fn extra_edge_identifications_survive() {
        // identify two edges of one tetrahedron that no gluing relates
        let mut raw = crate::tri::RawTriangulation::with_fresh_tets(1);
        raw.tets[0].vertex_tags = [0, 1, 0, 1];
        raw.tets[0].edge_tags[0] = EdgeTag { id: 0, reversed: false };
        raw.tets[0].edge_tags[5] = EdgeTag { id: 0, reversed: false };
        let t = Triangulation::from_raw(&raw).unwrap();
        let file = to_ptri(&t);
        assert!(file.edges.is_some());
        let (_, back) = roundtrip(&t);
        assert!(same_structure(&t, &back));
    }

    #[test]
    fn gluing_codes_follow_ascending_slots() {
        let text = r#"{"format":"ptri-1","mode":"gluing",
            "gluings":[[0,0,1,0,[0,1,2]],[0,1,1,1,[0,1,2]],[0,2,1,2,[0,1,2]],[0,3,1,3,[0,1,2]]]}"#;
        let Complex::Three(t) = parse(text).unwrap() else { panic!() };
        assert_eq!(isomorphism_signature(&t), isomorphism_signature(&two_tet_sphere()));
        let bad = r#"{"format":"ptri-1","mode":"gluing","gluings":[[0,0,1,0,[0,0,2]]]}"#;
        assert!(matches!(parse(bad), Err(IoError::Triangulation(TriError::BadPermutation { .. }))));
        let other = r#"{"format":"ptri-9","mode":"vertex"}"#;
        assert!(matches!(parse(other), Err(IoError::Format { .. })));
        assert!(matches!(parse("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn surfaces_roundtrip() {
        for name in EXAMPLE_NAMES {
            match example(name).unwrap() {
                Example::Surface(s) => {
                    let text = to_string(&Complex::Two(s.clone()));
                    let Complex::Two(back) = parse(&text).unwrap() else { panic!() };
                    assert_eq!(back.num_triangles(), s.num_triangles());
                    assert_eq!(back.num_vertices(), s.num_vertices());
                    assert_eq!(back.euler_characteristic(), s.euler_characteristic());
                    for i in 0..s.num_triangles() {
                        for j in 0..3 {
                            assert_eq!(back.gluing(i, j), s.gluing(i, j));
                        }
                    }
                }
                Example::Complex(t) => {
                    let (_, back) = roundtrip(&t);
                    assert!(same_structure(&t, &back), "{name}");
                }
            }
        }
        // a vertex link with a pinch needs gluing mode
        let t = example("susp-torus").unwrap();
        let Example::Complex(t) = t else { panic!() };
        let link = t.vertex_link(0).unwrap();
        let file = to_ptri2(&link);
        let back = from_ptri2(&file).unwrap();
        assert_eq!(back.classify(), link.classify());
        for j in 0..3 {
            assert_eq!(from_edge_code(j, j, edge_code(Perm3::IDENTITY, j)), Some(Perm3::IDENTITY));
        }
    }
}
