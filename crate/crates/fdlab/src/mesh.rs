//! Triangulated square tori `T_c` and their images under `h`.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::io::{self, Write};

use fdlab_core::bingmap::eval;
use fdlab_core::coords::{cyl_to_cart, slice_arc, slice_param};
use fdlab_core::{CartPoint, CylPoint, Error, Result};

pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Domain,
    Image,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<CartPoint>,
    pub faces: Vec<[usize; 3]>,
    /// Domain point behind each vertex.
    pub params: Vec<CylPoint>,
}

impl Mesh {
    fn edges(&self) -> HashMap<(usize, usize), usize> {
        let mut e = HashMap::new();
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                *e.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        e
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.faces.len() as i64
    }

    /// Every edge shared by exactly two faces, traversed once in each direction.
    pub fn is_closed_oriented(&self) -> bool {
        if self.edges().values().any(|&n| n != 2) {
            return false;
        }
        let mut directed = BTreeSet::new();
        self.faces.iter().all(|f| (0..3).all(|i| directed.insert((f[i], f[(i + 1) % 3]))))
    }

    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                (a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)) / 6.0
            })
            .sum()
    }

    /// Same connectivity, vertices moved to `h(params)`.
    pub fn image(&self) -> Mesh {
        Mesh { vertices: self.params.iter().map(|&p| eval(p)).collect(), faces: self.faces.clone(), params: self.params.clone() }
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// Number of `θ` columns and cross-section rows for a resolution.
pub fn grid_size(resolution: usize) -> (usize, usize) {
    let n = 4 * resolution.div_ceil(4);
    (n, n)
}

/// `T_c` as a closed triangle mesh with outward-facing (counterclockwise) faces.
///
/// Columns sit at `θ = -π + 2πj/nθ`, so `θ = 0` is a column. Coincident
/// vertices (the axis poles for `c > 1`, the pinch point for `c = 1`) are
/// merged and the triangles they collapse are dropped.
pub fn torus_mesh(c: f64, resolution: usize) -> Result<Mesh> {
    if c == 0.0 {
        return Err(Error::DegenerateLevel);
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::OutOfRange("level must be positive"));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::OutOfRange("resolution must be at least 16"));
    }
    let (nt, ns) = grid_size(resolution);
    let closed = c <= 1.0;
    let rows = if closed { ns } else { ns + 1 };
    let point = |i: usize, j: usize| {
        let theta = -PI + 2.0 * PI * j as f64 / nt as f64;
        let theta = if j == 0 { PI } else { theta };
        if closed {
            slice_param(c, theta, i as f64 / ns as f64)
        } else {
            slice_arc(c, theta, i as f64 / ns as f64)
        }
    };

    let mut vertices = Vec::new();
    let mut params = Vec::new();
    let mut lookup: HashMap<[i64; 3], usize> = HashMap::new();
    let mut index = vec![0usize; rows * nt];
    let quantum = 1e-9;
    for i in 0..rows {
        for j in 0..nt {
            let p = point(i, j);
            let x = cyl_to_cart(p);
            let key = [x.x, x.y, x.z].map(|v| (v / quantum).round() as i64);
            index[i * nt + j] = *lookup.entry(key).or_insert_with(|| {
                vertices.push(x);
                params.push(p);
                vertices.len() - 1
            });
        }
    }

    let mut faces = Vec::new();
    for i in 0..ns {
        let i1 = if closed { (i + 1) % ns } else { i + 1 };
        for j in 0..nt {
            let j1 = (j + 1) % nt;
            let (a, b, cc, d) = (index[i * nt + j], index[i * nt + j1], index[i1 * nt + j1], index[i1 * nt + j]);
            for f in [[a, b, cc], [a, cc, d]] {
                if f[0] != f[1] && f[1] != f[2] && f[0] != f[2] {
                    faces.push(f);
                }
            }
        }
    }
    let mut mesh = Mesh { vertices, faces, params };
    if mesh.signed_volume() < 0.0 {
        for f in &mut mesh.faces {
            f.swap(1, 2);
        }
    }
    Ok(mesh)
}

/// The degenerate level `T_0`: the unit circle as a closed polyline.
pub fn circle_polyline<W: Write>(resolution: usize, mut w: W) -> io::Result<()> {
    let n = resolution.max(3);
    for j in 0..n {
        let t = 2.0 * PI * j as f64 / n as f64;
        writeln!(w, "v {} {} 0", t.cos(), t.sin())?;
    }
    let idx: Vec<String> = (1..=n).chain(std::iter::once(1)).map(|i| i.to_string()).collect();
    writeln!(w, "l {}", idx.join(" "))
}

pub fn export_mesh(c: f64, resolution: usize, which: Which) -> Result<Mesh> {
    let m = torus_mesh(c, resolution)?;
    Ok(match which {
        Which::Domain => m,
        Which::Image => m.image(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_levels_have_euler_characteristic_zero() {
        for c in [0.25, 0.5, 0.75] {
            let m = torus_mesh(c, 32).unwrap();
            assert_eq!(m.euler_characteristic(), 0);
            assert!(m.is_closed_oriented());
            assert!(m.signed_volume() > 0.0);
            assert_eq!(m.vertices.len(), 32 * 32);
            assert_eq!(m.faces.len(), 2 * 32 * 32);
        }
    }

    #[test]
    fn outer_levels_are_spheres() {
        for c in [1.5, 2.0, 3.0] {
            let m = torus_mesh(c, 16).unwrap();
            assert_eq!(m.euler_characteristic(), 2);
            assert!(m.is_closed_oriented());
            assert_eq!(m.vertices.len(), 15 * 16 + 2);
        }
    }

    #[test]
    fn level_one_is_pinched() {
        assert_eq!(torus_mesh(1.0, 16).unwrap().euler_characteristic(), 1);
    }

    #[test]
    fn theta_zero_ring_collapses() {
        let m = export_mesh(0.5, 16, Which::Image).unwrap();
        let target = CartPoint::new(-0.5, 0.0, 0.0);
        let ring: Vec<_> = m.params.iter().zip(&m.vertices).filter(|(p, _)| p.theta == 0.0).collect();
        assert_eq!(ring.len(), 16);
        assert!(ring.iter().all(|(_, v)| v.dist(target) < 1e-12));
    }

    #[test]
    fn rejects_bad_levels() {
        assert_eq!(torus_mesh(0.0, 32), Err(Error::DegenerateLevel));
        assert!(matches!(torus_mesh(-1.0, 32), Err(Error::OutOfRange(_))));
        assert!(matches!(torus_mesh(0.5, 8), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn obj_is_one_based() {
        let m = torus_mesh(0.5, 16).unwrap();
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), m.vertices.len());
        let min = s
            .lines()
            .filter(|l| l.starts_with("f "))
            .flat_map(|l| l[2..].split(' ').map(|t| t.parse::<usize>().unwrap()).collect::<Vec<_>>())
            .min();
        assert_eq!(min, Some(1));
    }
}
