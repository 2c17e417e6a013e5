//! Oriented area enclosed by a loop.
//!
//! Winding numbers solve `∂(Σ w_f f) = c` where `c` is the loop's edge chain,
//! integrated across a spanning tree of the dual graph. On the sphere the
//! solution is unique up to a constant, so areas are taken modulo 1. On the
//! torus the loop is lifted to the universal cover (the integer grid), where
//! the winding numbers of a closed lift vanish far away and are unique.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{MeshLoop, SurfaceMesh};
use crate::error::{Error, Result};
use crate::gamma::reduce_mod_one;

/// Which dual spanning tree integrates the winding numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualTree {
    /// Breadth-first tree over the faces, rooted at the given face (sphere).
    Bfs { root_face: usize },
    /// Columns of the covering grid, swept upward from below the loop (torus).
    Columns,
    /// Rows of the covering grid, swept rightward from the left of the loop (torus).
    Rows,
}

impl DualTree {
    pub fn default_for(mesh: &SurfaceMesh) -> Self {
        if mesh.torus_n().is_some() {
            DualTree::Columns
        } else {
            DualTree::Bfs { root_face: 0 }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnclosedArea {
    /// Genus 0: reduced into `(-1/2, 1/2]`.
    pub value: f64,
    /// Set on the sphere, where the area is only defined modulo 1.
    pub modulo_one: bool,
}

pub fn enclosed_area(mesh: &SurfaceMesh, lp: &MeshLoop) -> Result<EnclosedArea> {
    enclosed_area_with(mesh, lp, DualTree::default_for(mesh))
}

pub fn enclosed_area_with(
    mesh: &SurfaceMesh,
    lp: &MeshLoop,
    tree: DualTree,
) -> Result<EnclosedArea> {
    lp.validate(mesh)?;
    match (mesh.torus_n(), tree) {
        (None, DualTree::Bfs { root_face }) => {
            let w = sphere_windings(mesh, lp, root_face)?;
            let raw: f64 = w
                .iter()
                .zip(mesh.face_areas())
                .map(|(w, a)| *w as f64 * a)
                .sum();
            Ok(EnclosedArea {
                value: reduce_mod_one(raw),
                modulo_one: true,
            })
        }
        (Some(n), DualTree::Columns | DualTree::Rows) => {
            let cells = cover_windings(mesh, lp, tree == DualTree::Rows)?;
            let n = n as i64;
            let value = cells
                .iter()
                .map(|(&(i, j), &w)| {
                    let f = (i.rem_euclid(n) + n * j.rem_euclid(n)) as usize;
                    w as f64 * mesh.face_area(f)
                })
                .sum();
            Ok(EnclosedArea {
                value,
                modulo_one: false,
            })
        }
        _ => Err(Error::UnsupportedMesh(format!(
            "dual tree {tree:?} does not fit this mesh"
        ))),
    }
}

/// Per-face winding numbers of a loop, summed over all lifts on the torus.
/// On the sphere they are normalized to vanish on face 0.
pub fn winding_numbers(mesh: &SurfaceMesh, lp: &MeshLoop) -> Result<Vec<i64>> {
    lp.validate(mesh)?;
    match mesh.torus_n() {
        None => sphere_windings(mesh, lp, 0),
        Some(n) => {
            let n = n as i64;
            let mut w = vec![0i64; mesh.num_faces()];
            for ((i, j), k) in cover_windings(mesh, lp, false)? {
                w[(i.rem_euclid(n) + n * j.rem_euclid(n)) as usize] += k;
            }
            Ok(w)
        }
    }
}

/// Homotopy class `(p, q)` of a torus loop: its lifted displacement in units
/// of the period cycles.
pub(crate) fn period_winding(mesh: &SurfaceMesh, lp: &MeshLoop) -> (i64, i64) {
    let n = mesh.torus_n().expect("torus grid") as i64;
    let (dx, dy) = lp.steps().iter().fold((0i64, 0i64), |(x, y), s| {
        let (ex, ey) = mesh.grid_displacement(s.edge);
        (x + s.sign as i64 * ex, y + s.sign as i64 * ey)
    });
    (dx / n, dy / n)
}

fn edge_chain(mesh: &SurfaceMesh, lp: &MeshLoop) -> Vec<i64> {
    let mut c = vec![0i64; mesh.num_edges()];
    for s in lp.steps() {
        c[s.edge] += s.sign as i64;
    }
    c
}

fn sphere_windings(mesh: &SurfaceMesh, lp: &MeshLoop, root: usize) -> Result<Vec<i64>> {
    if root >= mesh.num_faces() {
        return Err(Error::InvalidMesh(format!("root face {root} out of range")));
    }
    let c = edge_chain(mesh, lp);
    let mut w: Vec<Option<i64>> = vec![None; mesh.num_faces()];
    w[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let wf = w[f].expect("visited");
        for s in mesh.face(f) {
            // Crossing edge e from f (sign s_f) into g (sign -s_f):
            // s_f·w_f - s_f·w_g = c_e.
            let [plus, minus] = mesh.edge_faces(s.edge);
            let g = if s.sign > 0 { minus.0 } else { plus.0 };
            if w[g].is_none() {
                w[g] = Some(wf - s.sign as i64 * c[s.edge]);
                queue.push_back(g);
            }
        }
    }
    Ok(w.into_iter()
        .map(|x| x.expect("dual graph is connected"))
        .collect())
}

/// Winding numbers of the lifted loop around the unit cells `(i, j)` of the
/// covering grid; cell `(i, j)` projects to face `(i mod N, j mod N)`.
fn cover_windings(
    mesh: &SurfaceMesh,
    lp: &MeshLoop,
    by_rows: bool,
) -> Result<BTreeMap<(i64, i64), i64>> {
    let n = mesh.torus_n().expect("torus grid") as i64;
    let (bx, by) = mesh.grid_coords(lp.base()).expect("torus grid");
    let (mut x, mut y) = (bx, by);
    let mut horiz: HashMap<(i64, i64), i64> = HashMap::new();
    let mut vert: HashMap<(i64, i64), i64> = HashMap::new();
    let (mut lo, mut hi) = ((x, y), (x, y));
    for s in lp.steps() {
        let (dx, dy) = mesh.grid_displacement(s.edge);
        let sign = s.sign as i64;
        let (tx, ty) = if sign > 0 { (x, y) } else { (x - dx, y - dy) };
        let table = if dx == 1 { &mut horiz } else { &mut vert };
        *table.entry((tx, ty)).or_insert(0) += sign;
        x += sign * dx;
        y += sign * dy;
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let (p, q) = ((x - bx) / n, (y - by) / n);
    if (p, q) != (0, 0) {
        return Err(Error::NotNullHomotopic { p, q });
    }
    let mut cells = BTreeMap::new();
    if by_rows {
        // Vertical edge (i,j)->(i,j+1) bounds cell (i,j) with +1 and cell (i-1,j) with -1.
        for j in lo.1..hi.1 {
            let mut w = 0i64;
            for i in lo.0..hi.0 {
                w += vert.get(&(i, j)).copied().unwrap_or(0);
                if w != 0 {
                    cells.insert((i, j), w);
                }
            }
        }
    } else {
        // Horizontal edge (i,j)->(i+1,j) bounds cell (i,j-1) with +1 and cell (i,j) with -1.
        for i in lo.0..hi.0 {
            let mut w = 0i64;
            for j in lo.1..hi.1 {
                w -= horiz.get(&(i, j)).copied().unwrap_or(0);
                if w != 0 {
                    cells.insert((i, j), w);
                }
            }
        }
    }
    Ok(cells)
}
