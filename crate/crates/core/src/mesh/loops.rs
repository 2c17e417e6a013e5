use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Step, SurfaceMesh};
use crate::error::{Error, Result};
use crate::gamma::clip;

/// A closed edge path based at a vertex. Steps are stored in traversal order.
///
/// Products follow the path-group convention: `l1 · l2` traverses `l2`
/// first and then `l1`, so holonomy is a homomorphism for this product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshLoop {
    base: usize,
    steps: Vec<Step>,
}

impl MeshLoop {
    pub fn new(base: usize, steps: Vec<Step>) -> Self {
        MeshLoop { base, steps }
    }

    pub fn constant(base: usize) -> Self {
        MeshLoop {
            base,
            steps: Vec::new(),
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks edge indices, head-to-tail composability, and closure at `base`.
    pub fn validate(&self, mesh: &SurfaceMesh) -> Result<()> {
        if self.base >= mesh.num_vertices() {
            return Err(Error::MalformedLoop(format!(
                "base vertex {} out of range",
                self.base
            )));
        }
        let mut at = self.base;
        for (k, s) in self.steps.iter().enumerate() {
            if s.edge >= mesh.num_edges() || s.sign.abs() != 1 {
                return Err(Error::MalformedLoop(format!(
                    "step {k} is not a valid edge traversal"
                )));
            }
            if mesh.tail(*s) != at {
                return Err(Error::MalformedLoop(format!(
                    "step {k} does not start where step {} ended",
                    k.max(1) - 1
                )));
            }
            at = mesh.head(*s);
        }
        if at != self.base {
            return Err(Error::MalformedLoop(format!(
                "loop ends at {at}, not at its base {}",
                self.base
            )));
        }
        Ok(())
    }

    pub fn reverse(&self) -> Self {
        MeshLoop {
            base: self.base,
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// `self · rhs`: traverse `rhs`, then `self`.
    pub fn mul(&self, rhs: &MeshLoop) -> Result<Self> {
        if self.base != rhs.base {
            return Err(Error::BasepointMismatch {
                expected: self.base,
                found: rhs.base,
            });
        }
        let mut steps = rhs.steps.clone();
        steps.extend_from_slice(&self.steps);
        Ok(MeshLoop {
            base: self.base,
            steps,
        })
    }

    pub fn pow(&self, k: i64) -> Self {
        let unit = if k < 0 { self.reverse() } else { self.clone() };
        let steps = (0..k.unsigned_abs())
            .flat_map(|_| unit.steps.iter().copied())
            .collect();
        MeshLoop {
            base: self.base,
            steps,
        }
    }

    /// Removes retraced pieces (an edge immediately followed by its reversal).
    pub fn clip(&self) -> Self {
        let steps = clip(self.steps.iter().copied(), |a, b| {
            a.edge == b.edge && a.sign == -b.sign
        });
        MeshLoop {
            base: self.base,
            steps,
        }
    }

    /// The boundary of face `f`, reached from the basepoint along a shortest
    /// path `p` and returned along `p⁻¹`.
    pub fn face_boundary(mesh: &SurfaceMesh, f: usize) -> MeshLoop {
        let base = mesh.basepoint();
        let path = vertex_path(mesh, base, mesh.face_start(f));
        let mut steps = path.clone();
        steps.extend_from_slice(mesh.face(f));
        steps.extend(path.iter().rev().map(|s| s.reversed()));
        MeshLoop { base, steps }
    }

    /// Boundary of the k×k block of faces whose lower-left corner is the
    /// basepoint of a torus grid, oriented like the faces.
    pub fn corner_block(mesh: &SurfaceMesh, k: usize) -> Result<MeshLoop> {
        let n = mesh
            .torus_n()
            .ok_or_else(|| Error::UnsupportedMesh("corner blocks need a torus grid".into()))?;
        if k == 0 || k >= n {
            return Err(Error::MeshTooCoarse(format!(
                "block size {k} needs 0 < k < N = {n}"
            )));
        }
        let v = |x: usize, y: usize| (x % n) + n * (y % n);
        let mut steps = Vec::with_capacity(4 * k);
        steps.extend((0..k).map(|y| Step::new(2 * v(0, y) + 1, 1)));
        steps.extend((0..k).map(|x| Step::new(2 * v(x, k), 1)));
        steps.extend((0..k).rev().map(|y| Step::new(2 * v(k, y) + 1, -1)));
        steps.extend((0..k).rev().map(|x| Step::new(2 * v(x, 0), -1)));
        Ok(MeshLoop {
            base: mesh.basepoint(),
            steps,
        })
    }

    pub fn to_json(&self) -> MeshLoopJson {
        MeshLoopJson {
            base: self.base,
            steps: self.steps.iter().map(|s| (s.edge, s.sign as i64)).collect(),
        }
    }

    pub fn from_json(json: &MeshLoopJson) -> Result<Self> {
        let steps = json
            .steps
            .iter()
            .map(|&(edge, sign)| match sign {
                1 | -1 => Ok(Step::new(edge, sign as i8)),
                _ => Err(Error::MalformedLoop(format!(
                    "sign {sign} must be +1 or -1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeshLoop {
            base: json.base,
            steps,
        })
    }
}

/// Wire form: `{"base": v, "steps": [[edge, sign], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshLoopJson {
    pub base: usize,
    pub steps: Vec<(usize, i64)>,
}

fn outgoing(mesh: &SurfaceMesh) -> Vec<Vec<Step>> {
    let mut out = vec![Vec::new(); mesh.num_vertices()];
    for (e, &[t, h]) in mesh.edges().iter().enumerate() {
        out[t].push(Step::new(e, 1));
        out[h].push(Step::new(e, -1));
    }
    out
}

/// A shortest edge path from `from` to `to` (breadth-first, deterministic).
pub(crate) fn vertex_path(mesh: &SurfaceMesh, from: usize, to: usize) -> Vec<Step> {
    let adj = outgoing(mesh);
    let mut came_by: Vec<Option<Step>> = vec![None; mesh.num_vertices()];
    let mut seen = vec![false; mesh.num_vertices()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &s in &adj[v] {
            let w = mesh.head(s);
            if !seen[w] {
                seen[w] = true;
                came_by[w] = Some(s);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let s = came_by[at].expect("mesh is connected");
        path.push(s);
        at = mesh.tail(s);
    }
    path.reverse();
    path
}

fn random_walk<R: Rng + ?Sized>(
    mesh: &SurfaceMesh,
    adj: &[Vec<Step>],
    rng: &mut R,
    len: usize,
) -> Vec<Step> {
    let mut at = mesh.basepoint();
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let s = adj[at][rng.random_range(0..adj[at].len())];
        steps.push(s);
        at = mesh.head(s);
    }
    steps
}

/// A random walk of `len` steps from the basepoint, closed by a shortest
/// path back. On the torus its homotopy class is arbitrary.
pub fn random_closed_walk<R: Rng + ?Sized>(
    mesh: &SurfaceMesh,
    rng: &mut R,
    len: usize,
) -> MeshLoop {
    let adj = outgoing(mesh);
    let mut steps = random_walk(mesh, &adj, rng, len);
    let end = steps.last().map_or(mesh.basepoint(), |s| mesh.head(*s));
    steps.extend(vertex_path(mesh, end, mesh.basepoint()));
    MeshLoop::new(mesh.basepoint(), steps)
}

/// A random contractible loop: on the torus the walk is closed in the
/// universal cover, straight back along x and then y.
pub fn random_null_homotopic_loop<R: Rng + ?Sized>(
    mesh: &SurfaceMesh,
    rng: &mut R,
    len: usize,
) -> MeshLoop {
    let Some(n) = mesh.torus_n() else {
        return random_closed_walk(mesh, rng, len);
    };
    let adj = outgoing(mesh);
    let mut steps = random_walk(mesh, &adj, rng, len);
    let (mut dx, mut dy) = (0i64, 0i64);
    for s in &steps {
        let (ex, ey) = mesh.grid_displacement(s.edge);
        dx += s.sign as i64 * ex;
        dy += s.sign as i64 * ey;
    }
    let (bx, by) = mesh.grid_coords(mesh.basepoint()).expect("torus grid");
    let n = n as i64;
    let v = |x: i64, y: i64| (x.rem_euclid(n) + n * y.rem_euclid(n)) as usize;
    let (mut x, mut y) = (bx + dx, by + dy);
    while x != bx {
        if x > bx {
            steps.push(Step::new(2 * v(x - 1, y), -1));
            x -= 1;
        } else {
            steps.push(Step::new(2 * v(x, y), 1));
            x += 1;
        }
    }
    while y != by {
        if y > by {
            steps.push(Step::new(2 * v(x, y - 1) + 1, -1));
            y -= 1;
        } else {
            steps.push(Step::new(2 * v(x, y) + 1, 1));
            y += 1;
        }
    }
    MeshLoop::new(mesh.basepoint(), steps)
}

/// Two loops in the same homotopy class: `γ·c₁` and `γ·c₂` with `γ` an
/// arbitrary closed walk and `c₁, c₂` contractible.
pub fn random_homotopic_pair<R: Rng + ?Sized>(
    mesh: &SurfaceMesh,
    rng: &mut R,
    len: usize,
) -> (MeshLoop, MeshLoop) {
    let gamma = random_closed_walk(mesh, rng, len);
    let c1 = random_null_homotopic_loop(mesh, rng, len);
    let c2 = random_null_homotopic_loop(mesh, rng, len);
    (
        gamma.mul(&c1).expect("same base"),
        gamma.mul(&c2).expect("same base"),
    )
}
