/// Affine map `x = v0 + J x_hat` from the reference triangle
/// `conv{(0,0), (1,0), (0,1)}` onto a physical triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub vertices: [[f64; 2]; 3],
    /// Columns `v1 - v0` and `v2 - v0`, stored row-major.
    pub jac: [[f64; 2]; 2],
    pub inv_jac: [[f64; 2]; 2],
    pub det: f64,
    pub area: f64,
    pub diameter: f64,
}

impl TriangleGeometry {
    pub fn new(vertices: [[f64; 2]; 3]) -> Self {
        let [v0, v1, v2] = vertices;
        let jac = [[v1[0] - v0[0], v2[0] - v0[0]], [v1[1] - v0[1], v2[1] - v0[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        let diameter = [dist(v0, v1), dist(v1, v2), dist(v2, v0)]
            .into_iter()
            .fold(0.0, f64::max);
        Self { vertices, jac, inv_jac, det, area: 0.5 * det.abs(), diameter }
    }

    pub fn to_physical(&self, r: [f64; 2]) -> [f64; 2] {
        let v0 = self.vertices[0];
        [
            v0[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            v0[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn from_barycentric(&self, b: [f64; 3]) -> [f64; 2] {
        let [v0, v1, v2] = self.vertices;
        [
            b[0] * v0[0] + b[1] * v1[0] + b[2] * v2[0],
            b[0] * v0[1] + b[1] * v1[1] + b[2] * v2[1],
        ]
    }

    pub fn to_reference(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.vertices[0][0], x[1] - self.vertices[0][1]];
        [
            self.inv_jac[0][0] * d[0] + self.inv_jac[0][1] * d[1],
            self.inv_jac[1][0] * d[0] + self.inv_jac[1][1] * d[1],
        ]
    }

    /// Maps a reference gradient to the physical one, `J^{-T} g`.
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac[0][0] * g[0] + self.inv_jac[1][0] * g[1],
            self.inv_jac[0][1] * g[0] + self.inv_jac[1][1] * g[1],
        ]
    }

    /// Contravariant Piola transform `J v / det J`.
    pub fn piola(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.jac[0][0] * v[0] + self.jac[0][1] * v[1]) / self.det,
            (self.jac[1][0] * v[0] + self.jac[1][1] * v[1]) / self.det,
        ]
    }

    pub fn centroid(&self) -> [f64; 2] {
        self.from_barycentric([1.0 / 3.0; 3])
    }

    /// Endpoints of local edge `e`, the edge opposite vertex `e`,
    /// traversed counter-clockwise.
    pub fn edge(&self, e: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertices[(e + 1) % 3], self.vertices[(e + 2) % 3])
    }

    /// Outward unit normal on local edge `e` (counter-clockwise orientation).
    pub fn outward_normal(&self, e: usize) -> [f64; 2] {
        let (a, b) = self.edge(e);
        let t = [b[0] - a[0], b[1] - a[1]];
        let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
        [t[1] / len, -t[0] / len]
    }
}

pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn lerp(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}
