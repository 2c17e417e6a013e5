use std::collections::VecDeque;
use std::sync::Arc;

use super::GaugeField;
use crate::error::{Error, Result};
use crate::lie::{expm, Unitary};
use crate::mesh::SurfaceMesh;
use crate::rep::{validate_rep, YangMillsRep};

/// A field whose plaquettes all equal `exp(a_f Λ)`, so every face curvature
/// is `Λ`, and whose period holonomies are `A_1, B_1` on the torus.
///
/// Torus, with `E = exp(Λ/N²)` and `H(x,y)`, `V(x,y)` the edges leaving
/// `(x,y)` to the right and upwards:
/// `H(x,y) = I` except `H(N-1,y) = A·E^{yN}`, and `V(x,y) = E^{-x}` except
/// `V(x,N-1) = B·E^{-x}`. The corner face closes because
/// `A⁻¹B⁻¹AB = exp(Λ) = E^{N²}`.
///
/// Sphere: edges carry `exp(θ_e Λ)` with `dθ = a` solved on a spanning tree of
/// the dual graph; the root face absorbs `-1`, harmless since `exp(Λ) = I`.
pub fn build_ym_field_from_rep(mesh: Arc<SurfaceMesh>, rep: &YangMillsRep) -> Result<GaugeField> {
    let diag = validate_rep(rep)?;
    if !diag.ok {
        return Err(Error::InvalidRep(format!(
            "relator residual {:e}, centrality residual {:e}",
            diag.relator_residual, diag.centrality_residual
        )));
    }
    if mesh.genus() != rep.genus() {
        return Err(Error::GenusMismatch {
            left: mesh.genus(),
            right: rep.genus(),
        });
    }
    let links = match (mesh.genus(), mesh.torus_n()) {
        (1, Some(n)) => torus_links(n, rep),
        (0, _) => sphere_links(&mesh, rep),
        (g, _) => {
            return Err(Error::UnsupportedMesh(format!(
                "no lattice construction for genus {g}"
            )))
        }
    };
    GaugeField::new(mesh, links)
}

fn torus_links(n: usize, rep: &YangMillsRep) -> Vec<Unitary> {
    let e_pow = |k: i64| expm(&rep.lambda().scale(k as f64 / (n * n) as f64));
    let (a, b) = (&rep.a()[0], &rep.b()[0]);
    let mut links = vec![Unitary::identity(rep.n()); 2 * n * n];
    for y in 0..n {
        for x in 0..n {
            let v = x + n * y;
            if x == n - 1 {
                links[2 * v] = a * &e_pow((y * n) as i64);
            }
            let vertical = e_pow(-(x as i64));
            links[2 * v + 1] = if y == n - 1 { b * &vertical } else { vertical };
        }
    }
    links
}

fn sphere_links(mesh: &SurfaceMesh, rep: &YangMillsRep) -> Vec<Unitary> {
    let theta = solve_coboundary(mesh);
    theta
        .iter()
        .map(|t| expm(&rep.lambda().scale(*t)))
        .collect()
}

/// Edge values `θ` with `Σ_{steps of f} sign·θ_e = a_f` on every face but the
/// root (face 0), where the sum is `a_0 - 1`.
///
/// Edges off a breadth-first spanning tree of the dual graph get 0; tree edges
/// are then fixed from the leaves inwards, each face determining the edge that
/// joins it to its parent.
fn solve_coboundary(mesh: &SurfaceMesh) -> Vec<f64> {
    let nf = mesh.num_faces();
    let other_face = |f: usize, e: usize| {
        let [(fp, _), (fm, _)] = mesh.edge_faces(e);
        if fp == f {
            fm
        } else {
            fp
        }
    };
    let mut parent_edge: Vec<Option<usize>> = vec![None; nf];
    let mut seen = vec![false; nf];
    let mut order = Vec::with_capacity(nf);
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for s in mesh.face(f) {
            let g = other_face(f, s.edge);
            if !seen[g] {
                seen[g] = true;
                parent_edge[g] = Some(s.edge);
                queue.push_back(g);
            }
        }
    }
    let mut theta = vec![0.0; mesh.num_edges()];
    for &f in order.iter().rev().filter(|&&f| f != 0) {
        let e = parent_edge[f].expect("non-root faces have a parent");
        let mut rhs = mesh.face_area(f);
        let mut coeff = 0.0;
        for s in mesh.face(f) {
            if s.edge == e {
                coeff += s.sign as f64;
            } else {
                rhs -= s.sign as f64 * theta[s.edge];
            }
        }
        theta[e] = rhs / coeff;
    }
    theta
}
