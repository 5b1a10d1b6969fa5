//! Conforming triangulations with side topology and newest-vertex bisection.
//!
//! Every triangle is stored counter-clockwise with its newest vertex first,
//! so the refinement edge of a triangle is always its local side 0 (the side
//! opposite local vertex 0). Local side `i` is opposite local vertex `i`.

pub mod domains;
pub mod io;
pub mod refine;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::femspaces::geometry::{dist, TriangleGeometry};

pub use refine::{refine_nvb, uniform_refine, RefinedMesh, SideOrigin};

/// An edge of the triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Side {
    /// Global vertex indices with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// Adjacent triangle with the smaller index and its local side number.
    pub plus: (usize, usize),
    /// The other adjacent triangle, absent on the boundary.
    pub minus: Option<(usize, usize)>,
    /// Unit normal pointing out of the `plus` triangle.
    pub normal: [f64; 2],
    pub length: f64,
}

impl Side {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    generation: Vec<u32>,
    sides: Vec<Side>,
    triangle_sides: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
}

/// Builds a mesh from vertex coordinates and triangles.
///
/// Triangles must be counter-clockwise. The local vertex order is rotated so
/// that the refinement edge is the longest edge, ties broken by the smallest
/// index of the opposite vertex. When `boundary` is given, it must list
/// exactly the boundary sides of the triangulation.
pub fn build_mesh(
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Option<&[[usize; 2]]>,
) -> Result<Mesh> {
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= vertices.len()) {
            return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
        }
        let g = TriangleGeometry::new(tri.map(|v| vertices[v]));
        let scale = g.diameter * g.diameter;
        if g.det <= 1e-14 * scale || !g.det.is_finite() {
            return Err(Error::InvalidMesh(format!(
                "triangle {t} has zero or negative signed area {:e}",
                0.5 * g.det
            )));
        }
    }
    let triangles: Vec<[usize; 3]> = triangles
        .into_iter()
        .map(|t| rotate_to_longest_edge(&vertices, t))
        .collect();
    let generation = vec![0; triangles.len()];
    let mesh = Mesh::from_parts(vertices, triangles, generation)?;
    mesh.check_hanging_vertices()?;
    if let Some(b) = boundary {
        let mut expected: Vec<[usize; 2]> = mesh
            .sides
            .iter()
            .filter(|s| s.is_boundary())
            .map(|s| s.vertices)
            .collect();
        let mut given: Vec<[usize; 2]> = b.iter().map(|&[a, c]| [a.min(c), a.max(c)]).collect();
        expected.sort_unstable();
        given.sort_unstable();
        given.dedup();
        if expected != given {
            return Err(Error::InvalidMesh(
                "boundary sides do not match the triangulation boundary".into(),
            ));
        }
    }
    Ok(mesh)
}

fn rotate_to_longest_edge(vertices: &[[f64; 2]], t: [usize; 3]) -> [usize; 3] {
    let len = |i: usize| dist(vertices[t[(i + 1) % 3]], vertices[t[(i + 2) % 3]]);
    let mut best = 0;
    for i in 1..3 {
        let (li, lb) = (len(i), len(best));
        let tol = 1e-12 * lb.max(li);
        if li > lb + tol || ((li - lb).abs() <= tol && t[i] < t[best]) {
            best = i;
        }
    }
    [t[best], t[(best + 1) % 3], t[(best + 2) % 3]]
}

impl Mesh {
    /// Assembles side topology without rotating triangles.
    pub(crate) fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        generation: Vec<u32>,
    ) -> Result<Self> {
        let mut sides: Vec<Side> = Vec::with_capacity(triangles.len() * 3 / 2 + 2);
        let mut triangle_sides = vec![[0usize; 3]; triangles.len()];
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::with_capacity(sides.capacity());
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = [a.min(b), a.max(b)];
                match lookup.get(&key) {
                    None => {
                        let g = TriangleGeometry::new(tri.map(|v| vertices[v]));
                        lookup.insert(key, sides.len());
                        triangle_sides[t][i] = sides.len();
                        sides.push(Side {
                            vertices: key,
                            plus: (t, i),
                            minus: None,
                            normal: g.outward_normal(i),
                            length: dist(vertices[a], vertices[b]),
                        });
                    }
                    Some(&s) => {
                        let side = &mut sides[s];
                        if side.minus.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge {:?} is shared by more than two triangles",
                                key
                            )));
                        }
                        let (tp, ip) = side.plus;
                        let ptri = triangles[tp];
                        if ptri[(ip + 1) % 3] == a {
                            return Err(Error::InvalidMesh(format!(
                                "triangles {tp} and {t} have inconsistent orientation"
                            )));
                        }
                        side.minus = Some((t, i));
                        triangle_sides[t][i] = s;
                    }
                }
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for s in sides.iter().filter(|s| s.is_boundary()) {
            boundary_vertex[s.vertices[0]] = true;
            boundary_vertex[s.vertices[1]] = true;
        }
        Ok(Self { vertices, triangles, generation, sides, triangle_sides, boundary_vertex })
    }

    fn check_hanging_vertices(&self) -> Result<()> {
        for s in self.sides.iter().filter(|s| s.is_boundary()) {
            let a = self.vertices[s.vertices[0]];
            let b = self.vertices[s.vertices[1]];
            let t = [b[0] - a[0], b[1] - a[1]];
            let l2 = t[0] * t[0] + t[1] * t[1];
            for (v, x) in self.vertices.iter().enumerate() {
                if v == s.vertices[0] || v == s.vertices[1] {
                    continue;
                }
                let d = [x[0] - a[0], x[1] - a[1]];
                let along = (d[0] * t[0] + d[1] * t[1]) / l2;
                let cross = (d[0] * t[1] - d[1] * t[0]).abs() / l2.sqrt();
                if along > 1e-12 && along < 1.0 - 1e-12 && cross < 1e-12 * l2.sqrt() {
                    return Err(Error::InvalidMesh(format!(
                        "hanging vertex {v} on side {:?}",
                        s.vertices
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_sides(&self) -> usize {
        self.sides.len()
    }

    pub fn n_interior_sides(&self) -> usize {
        self.sides.iter().filter(|s| !s.is_boundary()).count()
    }

    /// Global side indices of the local sides of triangle `t`.
    pub fn triangle_sides(&self, t: usize) -> [usize; 3] {
        self.triangle_sides[t]
    }

    /// Local index of the refinement edge, always the side opposite the
    /// newest vertex.
    pub fn refinement_edge(&self, _t: usize) -> usize {
        0
    }

    pub fn generation(&self, t: usize) -> u32 {
        self.generation[t]
    }

    pub fn generations(&self) -> &[u32] {
        &self.generation
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        TriangleGeometry::new(self.triangles[t].map(|v| self.vertices[v]))
    }

    pub fn area(&self, t: usize) -> f64 {
        self.geometry(t).area
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    /// Whether local side `i` of triangle `t` is traversed from the smaller
    /// to the larger global vertex index in the counter-clockwise order.
    pub fn side_is_aligned(&self, t: usize, i: usize) -> bool {
        let tri = self.triangles[t];
        tri[(i + 1) % 3] < tri[(i + 2) % 3]
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for tri in &self.triangles {
            for i in 0..3 {
                let p = self.vertices[tri[i]];
                let a = self.vertices[tri[(i + 1) % 3]];
                let b = self.vertices[tri[(i + 2) % 3]];
                let u = [a[0] - p[0], a[1] - p[1]];
                let v = [b[0] - p[0], b[1] - p[1]];
                let c = (u[0] * v[0] + u[1] * v[1]) / (dist(a, p) * dist(b, p));
                best = best.min(c.clamp(-1.0, 1.0).acos());
            }
        }
        best
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| self.geometry(t).diameter)
            .fold(0.0, f64::max)
    }

    /// Bounding box `[xmin, ymin, xmax, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for v in &self.vertices {
            bb[0] = bb[0].min(v[0]);
            bb[1] = bb[1].min(v[1]);
            bb[2] = bb[2].max(v[0]);
            bb[3] = bb[3].max(v[1]);
        }
        bb
    }

    /// Index of the triangle containing `x` (first match), if any.
    pub fn locate(&self, x: [f64; 2]) -> Option<usize> {
        (0..self.n_triangles()).find(|&t| {
            let r = self.geometry(t).to_reference(x);
            let tol = 1e-12;
            r[0] >= -tol && r[1] >= -tol && r[0] + r[1] <= 1.0 + tol
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangle_square() {
        let m = domains::unit_square_two_triangles();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.n_sides(), 5);
        assert_eq!(m.n_interior_sides(), 1);
    }

    #[test]
    fn criss_cross_square() {
        let m = domains::unit_square();
        assert_eq!(m.n_vertices(), 5);
        assert_eq!(m.n_triangles(), 4);
        assert_eq!(m.n_sides(), 8);
        assert_eq!(m.n_interior_sides(), 4);
    }

    #[test]
    fn lshape_euler_characteristic() {
        let m = domains::lshape();
        let chi = m.n_vertices() as i64 - m.n_sides() as i64 + m.n_triangles() as i64;
        assert_eq!(chi, 1);
        assert!((m.total_area() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_edge_is_longest() {
        for m in [domains::unit_square(), domains::lshape(), domains::twowell_rectangle()] {
            for t in 0..m.n_triangles() {
                let g = m.geometry(t);
                let (a, b) = g.edge(0);
                assert!((dist(a, b) - g.diameter).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interior_normals_are_opposite() {
        let m = domains::lshape();
        for s in m.sides().iter().filter(|s| !s.is_boundary()) {
            let (tp, ip) = s.plus;
            let (tm, im) = s.minus.unwrap();
            let np = m.geometry(tp).outward_normal(ip);
            let nm = m.geometry(tm).outward_normal(im);
            assert!((np[0] + nm[0]).abs() < 1e-15 && (np[1] + nm[1]).abs() < 1e-15);
            assert_eq!(np, s.normal);
        }
    }

    #[test]
    fn rejects_invalid_input() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]];
        // clockwise
        assert!(build_mesh(v.clone(), vec![[0, 2, 1]], None).is_err());
        // degenerate
        assert!(build_mesh(v.clone(), vec![[0, 1, 3]], None).is_err());
        // hanging vertex: (1,0) lies on the edge (0,0)-(2,0) of the big triangle
        let v = vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, 0.0], [1.0, -1.0]];
        assert!(build_mesh(v, vec![[0, 1, 2], [0, 4, 3]], None).is_err());
    }

    #[test]
    fn boundary_markers_are_checked() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3]];
        let b = [[0, 1], [1, 2], [2, 3], [3, 0]];
        assert!(build_mesh(v.clone(), t.clone(), Some(&b)).is_ok());
        assert!(build_mesh(v, t, Some(&b[..3])).is_err());
    }
}
