//! Initial triangulations of the benchmark domains.

use super::{build_mesh, Mesh};

/// Unit square split along the diagonal from `(0,0)` to `(1,1)`.
pub fn unit_square_two_triangles() -> Mesh {
    let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    build_mesh(v, vec![[0, 1, 2], [0, 2, 3]], None).expect("valid mesh")
}

/// Criss-cross triangulation of `(0,1)^2`: four triangles meeting at the centre.
pub fn unit_square() -> Mesh {
    let mut b = CrissCross::default();
    b.add_square(0.0, 0.0);
    b.finish()
}

/// The L-shaped domain `(-1,1)^2 \ [0,1) x (-1,0]` as three criss-cross
/// unit squares (12 triangles).
pub fn lshape() -> Mesh {
    let mut b = CrissCross::default();
    b.add_square(-1.0, -1.0);
    b.add_square(-1.0, 0.0);
    b.add_square(0.0, 0.0);
    b.finish()
}

/// `(0,1) x (0,3/2)` split into two triangles along the segment from
/// `(1,0)` to `(0,3/2)`.
pub fn twowell_rectangle() -> Mesh {
    let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.5], [0.0, 1.5]];
    build_mesh(v, vec![[0, 1, 3], [1, 2, 3]], None).expect("valid mesh")
}

#[derive(Default)]
struct CrissCross {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl CrissCross {
    fn vertex(&mut self, x: [f64; 2]) -> usize {
        if let Some(i) = self.vertices.iter().position(|&v| v == x) {
            return i;
        }
        self.vertices.push(x);
        self.vertices.len() - 1
    }

    fn add_square(&mut self, x0: f64, y0: f64) {
        let corners = [[x0, y0], [x0 + 1.0, y0], [x0 + 1.0, y0 + 1.0], [x0, y0 + 1.0]];
        let ids: Vec<usize> = corners.iter().map(|&c| self.vertex(c)).collect();
        let c = self.vertex([x0 + 0.5, y0 + 0.5]);
        for i in 0..4 {
            self.triangles.push([c, ids[i], ids[(i + 1) % 4]]);
        }
    }

    fn finish(self) -> Mesh {
        build_mesh(self.vertices, self.triangles, None).expect("valid mesh")
    }
}
