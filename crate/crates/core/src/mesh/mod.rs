//! Closed oriented surfaces as 2-complexes with a normalized area form.
//!
//! Two families are built here: N×N periodic grids (genus 1) and subdivided
//! octahedra (genus 0). Face areas always sum to one.

mod area;
mod loops;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub(crate) use area::period_winding;
pub use area::{enclosed_area, enclosed_area_with, winding_numbers, DualTree, EnclosedArea};
pub(crate) use loops::vertex_path;
pub use loops::{
    random_closed_walk, random_homotopic_pair, random_null_homotopic_loop, MeshLoop, MeshLoopJson,
};

/// One oriented traversal of an edge: `sign = +1` follows the canonical
/// orientation (tail to head), `-1` runs against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: usize,
    pub sign: i8,
}

impl Step {
    pub fn new(edge: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Step { edge, sign }
    }

    pub fn reversed(self) -> Self {
        Step {
            edge: self.edge,
            sign: -self.sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    genus: usize,
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<Vec<Step>>,
    face_areas: Vec<f64>,
    basepoint: usize,
    /// Side length when the mesh is the canonical periodic grid.
    torus_n: Option<usize>,
    /// For each edge, (face, position) of its positive and negative occurrence.
    edge_faces: Vec<[(usize, usize); 2]>,
}

impl SurfaceMesh {
    /// Validates and assembles a mesh. Face boundaries are rotated to start at
    /// their lowest-index vertex.
    pub fn new(
        genus: usize,
        num_vertices: usize,
        edges: Vec<[usize; 2]>,
        faces: Vec<Vec<Step>>,
        face_areas: Vec<f64>,
        basepoint: usize,
    ) -> Result<Self> {
        if genus > 1 {
            return Err(Error::UnsupportedMesh(format!(
                "genus {genus} has no mesh support"
            )));
        }
        if basepoint >= num_vertices {
            return Err(Error::InvalidMesh(format!(
                "basepoint {basepoint} out of range"
            )));
        }
        if let Some(e) = edges
            .iter()
            .find(|e| e[0] >= num_vertices || e[1] >= num_vertices)
        {
            return Err(Error::InvalidMesh(format!(
                "edge {e:?} references a missing vertex"
            )));
        }
        if face_areas.len() != faces.len() {
            return Err(Error::SizeMismatch {
                expected: faces.len(),
                found: face_areas.len(),
            });
        }
        let mut mesh =
            SurfaceMesh::assemble(genus, num_vertices, edges, faces, face_areas, basepoint)?;
        let chi = mesh.euler_characteristic();
        if chi != 2 - 2 * genus as i64 {
            return Err(Error::InvalidMesh(format!(
                "Euler characteristic {chi} does not match genus {genus}"
            )));
        }
        if genus == 1 {
            mesh.torus_n = mesh.detect_torus_grid();
            if mesh.torus_n.is_none() {
                return Err(Error::UnsupportedMesh(
                    "genus-1 meshes must use the periodic grid layout".into(),
                ));
            }
        }
        Ok(mesh)
    }

    fn normalize_cycle(&self, f: usize, cycle: Vec<Step>) -> Result<Vec<Step>> {
        if cycle.len() < 2 {
            return Err(Error::InvalidMesh(format!(
                "face {f} has fewer than two edges"
            )));
        }
        if let Some(s) = cycle
            .iter()
            .find(|s| s.edge >= self.edges.len() || s.sign.abs() != 1)
        {
            return Err(Error::InvalidMesh(format!("face {f} has a bad step {s:?}")));
        }
        for k in 0..cycle.len() {
            let next = cycle[(k + 1) % cycle.len()];
            if self.head(cycle[k]) != self.tail(next) {
                return Err(Error::InvalidMesh(format!(
                    "face {f} boundary is not a closed cycle"
                )));
            }
        }
        let start = (0..cycle.len())
            .min_by_key(|&k| (self.tail(cycle[k]), k))
            .unwrap_or(0);
        let mut out = cycle[start..].to_vec();
        out.extend_from_slice(&cycle[..start]);
        Ok(out)
    }

    fn incidence(&self) -> Result<Vec<[(usize, usize); 2]>> {
        let mut plus = vec![None; self.edges.len()];
        let mut minus = vec![None; self.edges.len()];
        for (f, cycle) in self.faces.iter().enumerate() {
            for (k, s) in cycle.iter().enumerate() {
                let slot = if s.sign > 0 {
                    &mut plus[s.edge]
                } else {
                    &mut minus[s.edge]
                };
                if slot.replace((f, k)).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "edge {} used twice with the same sign",
                        s.edge
                    )));
                }
            }
        }
        plus.into_iter()
            .zip(minus)
            .enumerate()
            .map(|(e, pair)| match pair {
                (Some(p), Some(m)) => Ok([p, m]),
                _ => Err(Error::InvalidMesh(format!(
                    "edge {e} does not border two faces with opposite signs"
                ))),
            })
            .collect()
    }

    fn check_areas(&self, policy: &NumericPolicy) -> Result<()> {
        if self.face_areas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidMesh("face areas must be positive".into()));
        }
        let total: f64 = self.face_areas.iter().sum();
        if (total - 1.0).abs() > policy.area_sum_tol {
            return Err(Error::InvalidMesh(format!(
                "face areas sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    fn detect_torus_grid(&self) -> Option<usize> {
        let n = (self.num_vertices as f64).sqrt().round() as usize;
        if n < 2 || n * n != self.num_vertices || self.basepoint != 0 {
            return None;
        }
        let grid = build_torus_mesh(n).ok()?;
        (grid.edges == self.edges && grid.faces == self.faces).then_some(n)
    }

    /// Replaces the area form. The new areas must be positive and sum to one.
    pub fn with_face_areas(mut self, areas: Vec<f64>) -> Result<Self> {
        if areas.len() != self.faces.len() {
            return Err(Error::SizeMismatch {
                expected: self.faces.len(),
                found: areas.len(),
            });
        }
        self.face_areas = areas;
        self.check_areas(&NumericPolicy::DEFAULT)?;
        Ok(self)
    }

    /// Multiplies every face area by `factor`, breaking the normalization.
    #[cfg(test)]
    pub(crate) fn scale_areas_unchecked(mut self, factor: f64) -> Self {
        for a in &mut self.face_areas {
            *a *= factor;
        }
        self
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn face(&self, f: usize) -> &[Step] {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Vec<Step>] {
        &self.faces
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.face_areas[f]
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn torus_n(&self) -> Option<usize> {
        self.torus_n
    }

    /// (face, position) of the positive and the negative occurrence of `edge`.
    pub fn edge_faces(&self, edge: usize) -> [(usize, usize); 2] {
        self.edge_faces[edge]
    }

    pub fn tail(&self, s: Step) -> usize {
        let [t, h] = self.edges[s.edge];
        if s.sign > 0 {
            t
        } else {
            h
        }
    }

    pub fn head(&self, s: Step) -> usize {
        self.tail(s.reversed())
    }

    /// First vertex of the face boundary (its lowest-index vertex).
    pub fn face_start(&self, f: usize) -> usize {
        self.tail(self.faces[f][0])
    }

    /// Torus grid coordinates of a vertex.
    pub(crate) fn grid_coords(&self, v: usize) -> Option<(i64, i64)> {
        let n = self.torus_n?;
        Some(((v % n) as i64, (v / n) as i64))
    }

    /// Universal-cover displacement of an edge in its canonical orientation.
    pub(crate) fn grid_displacement(&self, e: usize) -> (i64, i64) {
        if e % 2 == 0 {
            (1, 0)
        } else {
            (0, 1)
        }
    }

    /// The horizontal period cycle through the basepoint (torus only).
    pub fn alpha_loop(&self) -> Option<MeshLoop> {
        let n = self.torus_n?;
        Some(MeshLoop::new(
            self.basepoint,
            (0..n).map(|x| Step::new(2 * x, 1)).collect(),
        ))
    }

    /// The vertical period cycle through the basepoint (torus only).
    pub fn beta_loop(&self) -> Option<MeshLoop> {
        let n = self.torus_n?;
        Some(MeshLoop::new(
            self.basepoint,
            (0..n).map(|y| Step::new(2 * (n * y) + 1, 1)).collect(),
        ))
    }

    pub fn to_json(&self) -> MeshJson {
        MeshJson {
            genus: self.genus,
            vertices: self.num_vertices,
            edges: self.edges.clone(),
            faces: self
                .faces
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|s| s.sign as i64 * (s.edge as i64 + 1))
                        .collect()
                })
                .collect(),
            face_areas: self.face_areas.clone(),
            basepoint: self.basepoint,
        }
    }

    pub fn from_json(json: &MeshJson) -> Result<Self> {
        let faces = json
            .faces
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&k| {
                        if k == 0 {
                            Err(Error::Parse(
                                "signed edge index 0 is not allowed (indices are 1-based)".into(),
                            ))
                        } else {
                            Ok(Step::new(k.unsigned_abs() as usize - 1, k.signum() as i8))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SurfaceMesh::new(
            json.genus,
            json.vertices,
            json.edges.clone(),
            faces,
            json.face_areas.clone(),
            json.basepoint,
        )
    }
}

/// Wire form of a mesh. Face boundaries list signed 1-based edge indices:
/// `+(e+1)` traverses edge `e` forward, `-(e+1)` backward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub genus: usize,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<Vec<i64>>,
    pub face_areas: Vec<f64>,
    pub basepoint: usize,
}

/// N×N periodic grid. Vertex `(x, y)` has index `x + N·y`; edge `2v` runs
/// from `v` in the +x direction, edge `2v + 1` in the +y direction.
///
/// Faces are oriented so that the commutator of the two period cycles
/// (`α β α⁻¹ β⁻¹`, rightmost traversed first) winds +1 around every face.
pub fn build_torus_mesh(n: usize) -> Result<SurfaceMesh> {
    if n < 2 {
        return Err(Error::InvalidMesh(format!(
            "torus grid needs N >= 2, got {n}"
        )));
    }
    let v = |x: usize, y: usize| (x % n) + n * (y % n);
    let mut edges = Vec::with_capacity(2 * n * n);
    for y in 0..n {
        for x in 0..n {
            edges.push([v(x, y), v(x + 1, y)]);
            edges.push([v(x, y), v(x, y + 1)]);
        }
    }
    let horiz = |x: usize, y: usize| 2 * v(x, y);
    let vert = |x: usize, y: usize| 2 * v(x, y) + 1;
    let mut faces = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            faces.push(vec![
                Step::new(vert(x, y), 1),
                Step::new(horiz(x, y + 1), 1),
                Step::new(vert(x + 1, y), -1),
                Step::new(horiz(x, y), -1),
            ]);
        }
    }
    let areas = vec![1.0 / (n * n) as f64; n * n];
    let mut mesh = SurfaceMesh::assemble(1, n * n, edges, faces, areas, 0)?;
    mesh.torus_n = Some(n);
    Ok(mesh)
}

/// Octahedron with each face cut into `subdiv²` congruent triangles.
/// Vertices are the integer points with `|x| + |y| + |z| = subdiv`.
pub fn build_sphere_mesh(subdiv: usize) -> Result<SurfaceMesh> {
    if subdiv < 1 {
        return Err(Error::InvalidMesh("sphere subdivision must be >= 1".into()));
    }
    let s = subdiv as i64;
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut points: Vec<[i64; 3]> = Vec::new();
    let mut vertex = |p: [i64; 3]| {
        *index.entry(p).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut coords: Vec<[[i64; 3]; 3]> = Vec::new();
    for &sx in &[1i64, -1] {
        for &sy in &[1i64, -1] {
            for &sz in &[1i64, -1] {
                let p = |i: i64, j: i64| [sx * i, sy * j, sz * (s - i - j)];
                for i in 0..s {
                    for j in 0..(s - i) {
                        coords.push([p(i, j), p(i + 1, j), p(i, j + 1)]);
                        if i + j <= s - 2 {
                            coords.push([p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)]);
                        }
                    }
                }
            }
        }
    }
    for mut tri in coords {
        // Outward orientation: normal · centroid > 0, all in exact integers.
        let d1 = sub(tri[1], tri[0]);
        let d2 = sub(tri[2], tri[0]);
        let normal = cross(d1, d2);
        let centroid = [
            tri[0][0] + tri[1][0] + tri[2][0],
            tri[0][1] + tri[1][1] + tri[2][1],
            tri[0][2] + tri[1][2] + tri[2][2],
        ];
        if dot(normal, centroid) < 0 {
            tri.swap(1, 2);
        }
        triangles.push([vertex(tri[0]), vertex(tri[1]), vertex(tri[2])]);
    }
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let mut faces = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let mut cycle = Vec::with_capacity(3);
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push([key.0, key.1]);
                edges.len() - 1
            });
            cycle.push(Step::new(e, if a < b { 1 } else { -1 }));
        }
        faces.push(cycle);
    }
    let f = faces.len();
    SurfaceMesh::assemble(0, points.len(), edges, faces, vec![1.0 / f as f64; f], 0)
}

impl SurfaceMesh {
    fn assemble(
        genus: usize,
        num_vertices: usize,
        edges: Vec<[usize; 2]>,
        faces: Vec<Vec<Step>>,
        face_areas: Vec<f64>,
        basepoint: usize,
    ) -> Result<Self> {
        let mut mesh = SurfaceMesh {
            genus,
            num_vertices,
            edges,
            faces: Vec::new(),
            face_areas,
            basepoint,
            torus_n: None,
            edge_faces: Vec::new(),
        };
        let mut rotated = Vec::with_capacity(faces.len());
        for (f, cycle) in faces.into_iter().enumerate() {
            rotated.push(mesh.normalize_cycle(f, cycle)?);
        }
        mesh.faces = rotated;
        mesh.edge_faces = mesh.incidence()?;
        mesh.check_areas(&NumericPolicy::DEFAULT)?;
        Ok(mesh)
    }
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Parses `torus:N` or `sphere:S`.
pub fn mesh_from_spec(spec: &str) -> Result<SurfaceMesh> {
    let (kind, size) = spec.split_once(':').ok_or_else(|| {
        Error::Parse(format!(
            "mesh spec `{spec}` is not of the form torus:N or sphere:S"
        ))
    })?;
    let size: usize = size
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad mesh size in `{spec}`")))?;
    match kind.trim() {
        "torus" => build_torus_mesh(size),
        "sphere" => build_sphere_mesh(size),
        other => Err(Error::Parse(format!("unknown mesh kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(mesh: &SurfaceMesh) {
        let total: f64 = mesh.face_areas().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(mesh.euler_characteristic(), 2 - 2 * mesh.genus() as i64);
        let mut count = vec![[0usize; 2]; mesh.num_edges()];
        for f in 0..mesh.num_faces() {
            for s in mesh.face(f) {
                count[s.edge][(s.sign < 0) as usize] += 1;
            }
            let start = mesh.face_start(f);
            assert!(mesh.face(f).iter().all(|s| mesh.tail(*s) >= start));
        }
        assert!(count.iter().all(|c| *c == [1, 1]));
    }

    #[test]
    fn torus_counts() {
        let m = build_torus_mesh(2).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (4, 8, 4));
        assert_eq!(m.euler_characteristic(), 0);
        let m = build_torus_mesh(3).unwrap();
        assert!(m.face_areas().iter().all(|a| (a - 1.0 / 9.0).abs() < 1e-15));
        for n in 2..9 {
            check_invariants(&build_torus_mesh(n).unwrap());
        }
        assert!(build_torus_mesh(1).is_err());
    }

    #[test]
    fn sphere_counts() {
        let m = build_sphere_mesh(1).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (6, 12, 8));
        let m = build_sphere_mesh(2).unwrap();
        assert_eq!(m.num_faces(), 32);
        assert!(m
            .face_areas()
            .iter()
            .all(|a| (a - 1.0 / 32.0).abs() < 1e-15));
        for s in 1..6 {
            let m = build_sphere_mesh(s).unwrap();
            assert_eq!(m.num_faces(), 8 * s * s);
            check_invariants(&m);
        }
    }

    #[test]
    fn period_loops_are_closed() {
        let m = build_torus_mesh(4).unwrap();
        m.alpha_loop().unwrap().validate(&m).unwrap();
        m.beta_loop().unwrap().validate(&m).unwrap();
        assert!(build_sphere_mesh(1).unwrap().alpha_loop().is_none());
    }

    #[test]
    fn json_round_trip_preserves_mesh() {
        for m in [build_torus_mesh(3).unwrap(), build_sphere_mesh(2).unwrap()] {
            let text = serde_json::to_string(&m.to_json()).unwrap();
            let back = SurfaceMesh::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn json_rejects_broken_meshes() {
        let mut j = build_sphere_mesh(1).unwrap().to_json();
        j.face_areas[0] *= 2.0;
        assert!(matches!(
            SurfaceMesh::from_json(&j),
            Err(Error::InvalidMesh(_))
        ));
        let mut j = build_sphere_mesh(1).unwrap().to_json();
        j.faces[0][0] = -j.faces[0][0];
        assert!(SurfaceMesh::from_json(&j).is_err());
        let mut j = build_sphere_mesh(1).unwrap().to_json();
        j.genus = 1;
        assert!(SurfaceMesh::from_json(&j).is_err());
    }

    #[test]
    fn nonuniform_areas() {
        let m = build_torus_mesh(2).unwrap();
        let m = m.with_face_areas(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(m.face_area(3), 0.4);
        assert!(m
            .clone()
            .with_face_areas(vec![0.5, 0.5, 0.5, -0.5])
            .is_err());
    }

    #[test]
    fn mesh_specs() {
        assert_eq!(mesh_from_spec("torus:4").unwrap().num_faces(), 16);
        assert_eq!(mesh_from_spec("sphere:1").unwrap().num_faces(), 8);
        assert!(mesh_from_spec("klein:3").is_err());
        assert!(mesh_from_spec("torus").is_err());
    }
}
