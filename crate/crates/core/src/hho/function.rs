use crate::femspaces::basis::RtBasis;
use crate::femspaces::geometry::TriangleGeometry;

/// Cell and side polynomial coefficients of a member of the HHO space.
///
/// Side blocks exist for every side of the mesh; on boundary sides they hold
/// the prescribed data.
#[derive(Debug, Clone, PartialEq)]
pub struct HhoFunction {
    cells: Vec<f64>,
    sides: Vec<f64>,
    nc: usize,
    ne: usize,
}

impl HhoFunction {
    pub fn zeros(n_triangles: usize, n_sides: usize, nc: usize, ne: usize) -> Self {
        Self { cells: vec![0.0; n_triangles * nc], sides: vec![0.0; n_sides * ne], nc, ne }
    }

    pub fn cell(&self, t: usize) -> &[f64] {
        &self.cells[t * self.nc..(t + 1) * self.nc]
    }

    pub fn cell_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.cells[t * self.nc..(t + 1) * self.nc]
    }

    pub fn side(&self, s: usize) -> &[f64] {
        &self.sides[s * self.ne..(s + 1) * self.ne]
    }

    pub fn side_mut(&mut self, s: usize) -> &mut [f64] {
        &mut self.sides[s * self.ne..(s + 1) * self.ne]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [f64] {
        &mut self.cells
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn n_triangles(&self) -> usize {
        self.cells.len() / self.nc
    }

    pub fn n_sides(&self) -> usize {
        self.sides.len() / self.ne
    }
}

/// A piecewise Raviart-Thomas field, one coefficient block per triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct RtField {
    pub degree: usize,
    coeffs: Vec<f64>,
}

/// `R v_h`.
pub type GradientField = RtField;
/// `sigma_h`.
pub type StressField = RtField;

impl RtField {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Self {
        Self { degree, coeffs }
    }

    pub fn block_len(&self) -> usize {
        (self.degree + 1) * (self.degree + 3)
    }

    pub fn block(&self, t: usize) -> &[f64] {
        let n = self.block_len();
        &self.coeffs[t * n..(t + 1) * n]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_triangles(&self) -> usize {
        self.coeffs.len() / self.block_len()
    }

    /// Value on triangle `t` from precomputed reference shape values.
    pub fn eval_with(&self, t: usize, geom: &TriangleGeometry, ref_values: &[[f64; 2]]) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (c, phi) in self.block(t).iter().zip(ref_values) {
            v[0] += c * phi[0];
            v[1] += c * phi[1];
        }
        geom.piola(v)
    }

    /// Divergence on triangle `t` from precomputed reference divergences.
    pub fn div_with(&self, t: usize, geom: &TriangleGeometry, ref_div: &[f64]) -> f64 {
        self.block(t).iter().zip(ref_div).map(|(c, d)| c * d).sum::<f64>() / geom.det
    }

    pub fn eval(&self, t: usize, geom: &TriangleGeometry, rt: &RtBasis, r: [f64; 2]) -> [f64; 2] {
        self.eval_with(t, geom, &rt.values(r))
    }
}
