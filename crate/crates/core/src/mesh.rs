//! Triangle meshes of the surfaces, for export as Wavefront OBJ.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::catenoid::Catenoid;
use crate::curvature::ImmersionPatch;
use crate::error::{Error, Result};
use crate::parabolic::{fhat_in_disk, q_gradient, q_residual};
use crate::hyperbolic::Point3;
use crate::tall::{TallRectSpec, TallRectangle};

/// Vertices and triangular faces (zero-based indices).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Free-text lines written as OBJ comments.
    pub notes: Vec<String>,
}

impl Mesh {
    /// Appends another mesh, shifting its indices.
    pub fn append(&mut self, other: Mesh) {
        let off = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.faces.extend(other.faces.into_iter().map(|f| f.map(|i| i + off)));
        self.notes.extend(other.notes);
    }

    pub fn map_vertices<F: Fn([f64; 3]) -> [f64; 3]>(mut self, f: F) -> Self {
        for v in &mut self.vertices {
            *v = f(*v);
        }
        self
    }

    /// Keeps faces whose three vertices satisfy `keep`, then drops vertices
    /// no longer referenced.
    pub fn retain_faces<F: Fn(&[f64; 3]) -> bool>(self, keep: F) -> Self {
        let faces: Vec<[usize; 3]> = self
            .faces
            .into_iter()
            .filter(|f| f.iter().all(|&i| keep(&self.vertices[i])))
            .collect();
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for f in &faces {
            for &i in f {
                if remap[i] == usize::MAX {
                    remap[i] = vertices.len();
                    vertices.push(self.vertices[i]);
                }
            }
        }
        Self {
            faces: faces.into_iter().map(|f| f.map(|i| remap[i])).collect(),
            vertices,
            notes: self.notes,
        }
    }

    /// Discards every face with a vertex outside the open unit cylinder.
    pub fn clip_to_cylinder(self) -> Self {
        self.retain_faces(|v| v[0] * v[0] + v[1] * v[1] < 1.0)
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for n in &self.notes {
            writeln!(w, "# {n}")?;
        }
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// Samples `f` on a `nu × nv` grid over `[u0, u1] × [v0, v1]` and
/// triangulates every cell whose four corners are defined.
pub fn parametric_grid<F>(nu: usize, nv: usize, (u0, u1): (f64, f64), (v0, v1): (f64, f64), f: F) -> Mesh
where
    F: Fn(f64, f64) -> Option<[f64; 3]> + Sync,
{
    let pts: Vec<Option<[f64; 3]>> = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nv, k % nv);
            let u = u0 + (u1 - u0) * i as f64 / (nu - 1) as f64;
            let v = v0 + (v1 - v0) * j as f64 / (nv - 1) as f64;
            f(u, v)
        })
        .collect();
    let mut index = vec![usize::MAX; pts.len()];
    let mut mesh = Mesh::default();
    for (k, p) in pts.iter().enumerate() {
        if let Some(p) = p {
            index[k] = mesh.vertices.len();
            mesh.vertices.push(*p);
        }
    }
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let c = [i * nv + j, (i + 1) * nv + j, (i + 1) * nv + j + 1, i * nv + j + 1].map(|k| index[k]);
            if c.iter().all(|&k| k != usize::MAX) {
                mesh.faces.push([c[0], c[1], c[2]]);
                mesh.faces.push([c[0], c[2], c[3]]);
            }
        }
    }
    mesh
}

fn check_grid(nu: usize, nv: usize) -> Result<()> {
    if nu < 2 || nv < 2 {
        return Err(Error::Input(format!("mesh grid {nu}x{nv} needs at least 2 samples per side")));
    }
    Ok(())
}

/// Catenoid inside the cylinder, `|t| < h/2`.
pub fn catenoid_mesh(cat: &Catenoid<f64>, nu: usize, nv: usize) -> Result<Mesh> {
    check_grid(nu, nv)?;
    let period = 2.0 * std::f64::consts::PI / cat.k().sqrt();
    let half = 0.5 * cat.height() * (1.0 - 1e-9);
    let mut m = parametric_grid(nu, nv, (0.0, period), (-half, half), |th, t| cat.immerse(th, t).ok().map(Point3::to_array));
    m.notes.push(format!("catenoid k={} height={}", cat.k(), cat.height()));
    Ok(m)
}

/// The ambient surface of revolution over `periods` full periods of the profile.
pub fn unduloid_mesh(cat: &Catenoid<f64>, nu: usize, nv: usize, periods: f64) -> Result<Mesh> {
    check_grid(nu, nv)?;
    let period = 2.0 * std::f64::consts::PI / cat.k().sqrt();
    let span = 0.5 * periods * cat.period;
    let mut m = parametric_grid(nu, nv, (0.0, period), (-span, span), |th, t| {
        cat.ambient_unduloid(th, t).ok().map(Point3::to_array)
    });
    m.notes.push(format!("unduloid k={} profile period={}", cat.k(), cat.period));
    Ok(m)
}

/// The parabolic catenoid `F̂` in disk coordinates over `|x| ≤ b`.
pub fn parabolic_mesh(b: f64, nu: usize, nv: usize) -> Result<Mesh> {
    check_grid(nu, nv)?;
    let lim = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-6);
    let mut m = parametric_grid(nu, nv, (-b, b), (-lim, lim), |x, t| fhat_in_disk(x, t).ok().map(Point3::to_array));
    m.notes.push("parabolic catenoid; asymptotic boundary: circles t = +-pi/2 of the unit cylinder and the vertical segment over z = -1".into());
    Ok(m)
}

/// Both halves of the tall rectangle over `x` in `(d₁, x_max)`; `x_max = 1`
/// gives the surface in the cylinder, `x_max = 1/d₁` the annular extension.
pub fn tall_mesh(spec: &TallRectSpec<f64>, nu: usize, nv: usize, x_max: f64) -> Result<Mesh> {
    check_grid(nu, nv)?;
    let mut out = Mesh::default();
    let lo = spec.d1 + 1e-12;
    let hi = x_max.min(1.0 / spec.d1) - 1e-12;
    for upper in [true, false] {
        let patch = TallRectangle::new(spec.d, upper)?;
        // Cluster samples at the turning point where λ has a square-root profile.
        let m = parametric_grid(nu, nv, (0.0, 1.0), (-1.0 + 1e-9, 1.0 - 1e-9), |s, y| {
            patch.eval(lo + (hi - lo) * s * s, y).ok().map(Point3::to_array)
        });
        out.append(m);
    }
    out.notes.push(format!("tall rectangle d={} d1={} height={}", spec.d, spec.d1, spec.height));
    Ok(out)
}

/// The periodic ambient surface generated by the annular extension, the
/// half-turn `(x, y, t) ↦ (-x, y, h - t)` and vertical translation by `2h`,
/// clipped to the cylinder.
pub fn tall_periodic_mesh(spec: &TallRectSpec<f64>, nu: usize, nv: usize, copies: i32) -> Result<Mesh> {
    let base = tall_mesh(spec, nu, nv, 1.0 / spec.d1)?;
    let h = spec.height;
    let turned = base.clone().map_vertices(|v| [-v[0], v[1], h - v[2]]);
    let mut cell = base;
    cell.append(turned);
    let mut out = Mesh::default();
    for c in -copies..=copies {
        let shift = 2.0 * h * c as f64;
        out.append(cell.clone().map_vertices(|v| [v[0], v[1], v[2] + shift]));
    }
    out.notes.truncate(1);
    out.notes.push(format!("periodic extension, period {}", 2.0 * h));
    Ok(out.clip_to_cylinder())
}

/// Zero set of [`q_residual`] in the box `[-b, b]² × [t0, t1]` by marching
/// tetrahedra, with vertices projected onto the surface by Newton's method.
pub fn q_mesh(b: f64, n: usize, (t0, t1): (f64, f64)) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::Input("marching grid needs at least 2 cells per side".into()));
    }
    let f = |p: [f64; 3]| q_residual(Point3::from_array(p));
    let h = [2.0 * b / n as f64, 2.0 * b / n as f64, (t1 - t0) / n as f64];
    let node = |i: usize, j: usize, k: usize| [-b + h[0] * i as f64, -b + h[1] * j as f64, t0 + h[2] * k as f64];
    let m = n + 1;
    let values: Vec<f64> = (0..m * m * m)
        .into_par_iter()
        .map(|q| f(node(q / (m * m), (q / m) % m, q % m)))
        .collect();
    let id = |i: usize, j: usize, k: usize| (i * m + j) * m + k;
    const CUBE: [[usize; 3]; 8] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
    const TETS: [[usize; 4]; 6] = [[0, 5, 1, 6], [0, 1, 2, 6], [0, 2, 3, 6], [0, 3, 7, 6], [0, 7, 4, 6], [0, 4, 5, 6]];
    let mut mesh = Mesh::default();
    let mut edge_vertex: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertex_on = |a: (usize, [f64; 3]), bb: (usize, [f64; 3]), mesh: &mut Mesh| -> usize {
        let key = if a.0 < bb.0 { (a.0, bb.0) } else { (bb.0, a.0) };
        *edge_vertex.entry(key).or_insert_with(|| {
            let (fa, fb) = (values[a.0], values[bb.0]);
            let s = fa / (fa - fb);
            let p = [0, 1, 2].map(|c| a.1[c] + s * (bb.1[c] - a.1[c]));
            mesh.vertices.push(p);
            mesh.vertices.len() - 1
        })
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let corners: Vec<(usize, [f64; 3])> = CUBE
                    .iter()
                    .map(|c| (id(i + c[0], j + c[1], k + c[2]), node(i + c[0], j + c[1], k + c[2])))
                    .collect();
                for tet in TETS {
                    let v: Vec<(usize, [f64; 3])> = tet.iter().map(|&c| corners[c]).collect();
                    let inside: Vec<usize> = (0..4).filter(|&q| values[v[q].0] < 0.0).collect();
                    let outside: Vec<usize> = (0..4).filter(|&q| values[v[q].0] >= 0.0).collect();
                    match inside.len() {
                        1 | 3 => {
                            let (lone, rest) = if inside.len() == 1 { (inside[0], &outside) } else { (outside[0], &inside) };
                            let tri = [0, 1, 2].map(|q| vertex_on(v[lone], v[rest[q]], &mut mesh));
                            mesh.faces.push(tri);
                        }
                        2 => {
                            let (a, bq) = (inside[0], inside[1]);
                            let (c, d) = (outside[0], outside[1]);
                            let p = [
                                vertex_on(v[a], v[c], &mut mesh),
                                vertex_on(v[a], v[d], &mut mesh),
                                vertex_on(v[bq], v[d], &mut mesh),
                                vertex_on(v[bq], v[c], &mut mesh),
                            ];
                            mesh.faces.push([p[0], p[1], p[2]]);
                            mesh.faces.push([p[0], p[2], p[3]]);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    mesh.vertices.par_iter_mut().for_each(|p| {
        for _ in 0..50 {
            let r = f(*p);
            if r.abs() < 1e-14 {
                break;
            }
            let g = q_gradient(Point3::from_array(*p));
            let n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if n2 == 0.0 {
                break;
            }
            for c in 0..3 {
                p[c] -= r * g[c] / n2;
            }
        }
    });
    // Drop faces that collapsed onto a single point.
    mesh.faces.retain(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
    mesh.notes.push(format!("ambient surface Q: 1 - x^2 - y^2 = cos(t)((1 + x)^2 + y^2), box {b}"));
    Ok(mesh)
}
