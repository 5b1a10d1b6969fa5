use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::function::{HhoFunction, RtField};
use crate::error::{Error, Result};
use crate::femspaces::basis::{CellBasis, EdgeBasis, RtBasis};
use crate::femspaces::geometry::lerp;
use crate::femspaces::poly::dim_p;
use crate::femspaces::projection::{l2_project_cell, l2_project_edge, rt_mass_matrix};
use crate::femspaces::quadrature::{EdgeRule, TriangleRule, MAX_DEGREE};
use crate::mesh::Mesh;

const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Reference point on local edge `e` at parameter `s`.
pub(crate) fn reference_edge_point(e: usize, s: f64) -> [f64; 2] {
    lerp(REF_VERTICES[(e + 1) % 3], REF_VERTICES[(e + 2) % 3], s)
}

/// The HHO space `P_k(T) x P_k(F(Omega))` with the gradient reconstruction
/// into piecewise `RT_k`.
///
/// Degrees of freedom: one block of `dim P_k` coefficients per triangle,
/// followed by one block of `k + 1` coefficients per interior side. Side
/// polynomials are parametrised from the smaller to the larger global
/// vertex index. Boundary sides carry prescribed data instead of unknowns.
#[derive(Debug, Clone)]
pub struct HhoSpace {
    mesh: Arc<Mesh>,
    k: usize,
    pub cell_basis: CellBasis,
    pub edge_basis: EdgeBasis,
    pub rt: RtBasis,
    side_offset: Vec<Option<usize>>,
    ndof: usize,
    recon: Vec<DMatrix<f64>>,
    mass_inv: Vec<DMatrix<f64>>,
}

/// Basis values on a reference quadrature rule, shared by all triangles.
#[derive(Debug, Clone)]
pub struct RefTables {
    pub rule: TriangleRule,
    pub cell: Vec<Vec<f64>>,
    pub rt: Vec<Vec<[f64; 2]>>,
    pub rt_div: Vec<Vec<f64>>,
}

impl HhoSpace {
    pub fn new(mesh: Arc<Mesh>, k: usize) -> Result<Self> {
        let cell_basis = CellBasis::new(k);
        let edge_basis = EdgeBasis::new(k);
        let rt = RtBasis::new(k);
        let mut side_offset = vec![None; mesh.n_sides()];
        let mut next = mesh.n_triangles() * dim_p(k);
        for (s, side) in mesh.sides().iter().enumerate() {
            if !side.is_boundary() {
                side_offset[s] = Some(next);
                next += k + 1;
            }
        }
        let mut space = Self {
            mesh,
            k,
            cell_basis,
            edge_basis,
            rt,
            side_offset,
            ndof: next,
            recon: Vec::new(),
            mass_inv: Vec::new(),
        };
        let rule = TriangleRule::new(2 * k + 2)?;
        let erule = EdgeRule::new(2 * k + 2)?;
        let locals: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..space.mesh.n_triangles())
            .into_par_iter()
            .map(|t| space.local_operators(t, &rule, &erule))
            .collect::<Result<_>>()?;
        (space.recon, space.mass_inv) = locals.into_iter().unzip();
        Ok(space)
    }

    fn local_operators(
        &self,
        t: usize,
        rule: &TriangleRule,
        erule: &EdgeRule,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let geom = self.mesh.geometry(t);
        let (nc, ne, nrt) = (self.n_cell(), self.n_edge(), self.n_rt());
        let mass = rt_mass_matrix(&geom, &self.rt, rule);
        let mut b = DMatrix::<f64>::zeros(nrt, self.n_local());
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            let phi = self.cell_basis.values(r);
            let div = self.rt.divergences(r);
            for j in 0..nrt {
                // physical divergence under Piola is div_ref / det
                let dj = div[j] / geom.det;
                for i in 0..nc {
                    b[(j, i)] -= w * geom.area * phi[i] * dj;
                }
            }
        }
        for e in 0..3 {
            let aligned = self.mesh.side_is_aligned(t, e);
            let nu = geom.outward_normal(e);
            let (pa, pb) = geom.edge(e);
            let h = crate::femspaces::geometry::dist(pa, pb);
            for (&s, &w) in erule.points.iter().zip(&erule.weights) {
                let r = reference_edge_point(e, s);
                let psi = self.edge_basis.values(if aligned { s } else { 1.0 - s });
                for (j, v) in self.rt.values(r).into_iter().enumerate() {
                    let tau = geom.piola(v);
                    let tn = tau[0] * nu[0] + tau[1] * nu[1];
                    for i in 0..ne {
                        b[(j, nc + e * ne + i)] += w * h * tn * psi[i];
                    }
                }
            }
        }
        let chol = mass.cholesky().ok_or(Error::SingularLocalMatrix(t))?;
        let r = chol.solve(&b);
        let inv = chol.inverse();
        Ok((r, inv))
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn n_cell(&self) -> usize {
        dim_p(self.k)
    }

    pub fn n_edge(&self) -> usize {
        self.k + 1
    }

    pub fn n_rt(&self) -> usize {
        (self.k + 1) * (self.k + 3)
    }

    /// Number of local unknowns of one triangle: the cell block and the
    /// blocks of its three sides.
    pub fn n_local(&self) -> usize {
        self.n_cell() + 3 * self.n_edge()
    }

    pub fn ndof(&self) -> usize {
        self.ndof
    }

    pub fn cell_offset(&self, t: usize) -> usize {
        t * self.n_cell()
    }

    pub fn side_offset(&self, s: usize) -> Option<usize> {
        self.side_offset[s]
    }

    /// Global unknown for each local unknown of `t`; `None` on boundary sides.
    pub fn local_dofs(&self, t: usize) -> Vec<Option<usize>> {
        let mut d = Vec::with_capacity(self.n_local());
        let c0 = self.cell_offset(t);
        d.extend((0..self.n_cell()).map(|i| Some(c0 + i)));
        for s in self.mesh.triangle_sides(t) {
            match self.side_offset[s] {
                Some(o) => d.extend((0..self.n_edge()).map(|i| Some(o + i))),
                None => d.extend(std::iter::repeat_n(None, self.n_edge())),
            }
        }
        d
    }

    /// Local coefficient vector of `t`: cell block then the three side blocks.
    pub fn gather(&self, t: usize, v: &HhoFunction) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_local());
        let nc = self.n_cell();
        let ne = self.n_edge();
        out.rows_mut(0, nc).copy_from_slice(v.cell(t));
        for (e, s) in self.mesh.triangle_sides(t).into_iter().enumerate() {
            out.rows_mut(nc + e * ne, ne).copy_from_slice(v.side(s));
        }
        out
    }

    /// Local reconstruction matrix mapping local unknowns to RT coefficients.
    pub fn reconstruction(&self, t: usize) -> &DMatrix<f64> {
        &self.recon[t]
    }

    /// Inverse of the physical RT mass matrix of `t`.
    pub fn rt_mass_inverse(&self, t: usize) -> &DMatrix<f64> {
        &self.mass_inv[t]
    }

    pub fn zero_function(&self) -> HhoFunction {
        HhoFunction::zeros(self.mesh.n_triangles(), self.mesh.n_sides(), self.n_cell(), self.n_edge())
    }

    /// `R v` as a piecewise RT field.
    pub fn reconstruct_gradient(&self, v: &HhoFunction) -> RtField {
        let blocks: Vec<DVector<f64>> = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| &self.recon[t] * self.gather(t, v))
            .collect();
        let mut coeffs = Vec::with_capacity(blocks.len() * self.n_rt());
        for b in blocks {
            coeffs.extend(b.iter());
        }
        RtField::new(self.k, coeffs)
    }

    /// `I v = (Pi_T v, Pi_F v)` on every triangle and every side, including
    /// the boundary sides.
    pub fn interpolate(&self, v: impl Fn([f64; 2]) -> f64 + Sync) -> HhoFunction {
        let deg = (self.k + 12).min(MAX_DEGREE);
        let rule = TriangleRule::new(deg).expect("supported degree");
        let erule = EdgeRule::new(deg).expect("supported degree");
        let mut out = self.zero_function();
        let cells: Vec<Vec<f64>> = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| l2_project_cell(&v, &self.mesh.geometry(t), &self.cell_basis, &rule))
            .collect();
        for (t, c) in cells.into_iter().enumerate() {
            out.cell_mut(t).copy_from_slice(&c);
        }
        for s in 0..self.mesh.n_sides() {
            let c = self.project_on_side(s, &v, &erule);
            out.side_mut(s).copy_from_slice(&c);
        }
        out
    }

    /// `Pi_F v` on side `s` in the side's global parametrisation.
    pub fn project_on_side(&self, s: usize, v: impl Fn([f64; 2]) -> f64, rule: &EdgeRule) -> Vec<f64> {
        let side = &self.mesh.sides()[s];
        let a = self.mesh.vertices()[side.vertices[0]];
        let b = self.mesh.vertices()[side.vertices[1]];
        l2_project_edge(v, a, b, &self.edge_basis, rule)
    }

    /// Replaces all boundary side blocks of `v` by `Pi_F u_D` (zero if no
    /// data is given).
    pub fn apply_boundary_data(&self, v: &mut HhoFunction, data: Option<&(dyn Fn([f64; 2]) -> f64 + Sync)>) {
        let erule = EdgeRule::new((self.k + 12).min(MAX_DEGREE)).expect("supported degree");
        for (s, side) in self.mesh.sides().iter().enumerate() {
            if side.is_boundary() {
                let c = match data {
                    Some(g) => self.project_on_side(s, g, &erule),
                    None => vec![0.0; self.n_edge()],
                };
                v.side_mut(s).copy_from_slice(&c);
            }
        }
    }

    /// Unknowns of `v` in global dof order.
    pub fn to_dofs(&self, v: &HhoFunction) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.ndof);
        x.extend_from_slice(v.cells());
        for (s, o) in self.side_offset.iter().enumerate() {
            if o.is_some() {
                x.extend_from_slice(v.side(s));
            }
        }
        x
    }

    /// Writes the unknowns `x` into `v`, keeping its boundary data.
    pub fn set_dofs(&self, v: &mut HhoFunction, x: &[f64]) {
        let nct = self.mesh.n_triangles() * self.n_cell();
        v.cells_mut().copy_from_slice(&x[..nct]);
        for (s, o) in self.side_offset.iter().enumerate() {
            if let Some(o) = *o {
                v.side_mut(s).copy_from_slice(&x[o..o + self.n_edge()]);
            }
        }
    }

    /// Basis values of all three bases on a triangle rule of `degree`.
    pub fn tables(&self, degree: usize) -> Result<RefTables> {
        let rule = TriangleRule::new(degree)?;
        let mut cell = Vec::with_capacity(rule.len());
        let mut rt = Vec::with_capacity(rule.len());
        let mut rt_div = Vec::with_capacity(rule.len());
        for r in rule.reference_points() {
            cell.push(self.cell_basis.values(r));
            rt.push(self.rt.values(r));
            rt_div.push(self.rt.divergences(r));
        }
        Ok(RefTables { rule, cell, rt, rt_div })
    }

    /// The discrete norm
    /// `(sum_T ||grad v_T||^p_{L^p(T)} + sum_{F in T} h_F^{1-p} ||v_F - v_T||^p_{L^p(F)})^{1/p}`.
    pub fn discrete_norm(&self, v: &HhoFunction, p: f64) -> f64 {
        let deg = (p.ceil() as usize * self.k + 2).min(MAX_DEGREE);
        let rule = TriangleRule::new(deg).expect("supported degree");
        let erule = EdgeRule::new(deg).expect("supported degree");
        let total: f64 = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| {
                let geom = self.mesh.geometry(t);
                let vt = v.cell(t);
                let mut sum = 0.0;
                for (r, &w) in rule.reference_points().zip(&rule.weights) {
                    let (_, g) = self.cell_basis.values_and_gradients(r);
                    let mut gr = [0.0; 2];
                    for (c, gi) in vt.iter().zip(&g) {
                        gr[0] += c * gi[0];
                        gr[1] += c * gi[1];
                    }
                    let gp = geom.push_gradient(gr);
                    sum += w * geom.area * gp[0].hypot(gp[1]).powf(p);
                }
                for (e, s) in self.mesh.triangle_sides(t).into_iter().enumerate() {
                    let aligned = self.mesh.side_is_aligned(t, e);
                    let (pa, pb) = geom.edge(e);
                    let h = crate::femspaces::geometry::dist(pa, pb);
                    let vf = v.side(s);
                    let mut es = 0.0;
                    for (&sp, &w) in erule.points.iter().zip(&erule.weights) {
                        let r = reference_edge_point(e, sp);
                        let cell: f64 = self.cell_basis.values(r).iter().zip(vt).map(|(a, b)| a * b).sum();
                        let side: f64 = self
                            .edge_basis
                            .values(if aligned { sp } else { 1.0 - sp })
                            .iter()
                            .zip(vf)
                            .map(|(a, b)| a * b)
                            .sum();
                        es += w * h * (side - cell).abs().powf(p);
                    }
                    sum += h.powf(1.0 - p) * es;
                }
                sum
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        total.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::femspaces::projection::l2_project_rt;
    use crate::mesh::{domains, refine::uniform_refine};

    fn space(k: usize) -> HhoSpace {
        let m = uniform_refine(&domains::lshape()).mesh;
        HhoSpace::new(Arc::new(m), k).unwrap()
    }

    #[test]
    fn dof_counts() {
        let s = space(2);
        let m = s.mesh();
        assert_eq!(s.ndof(), 6 * m.n_triangles() + 3 * m.n_interior_sides());
        let v = s.interpolate(|x| x[0] * x[1]);
        let mut w = s.zero_function();
        s.set_dofs(&mut w, &s.to_dofs(&v));
        for t in 0..m.n_triangles() {
            assert_eq!(w.cell(t), v.cell(t));
        }
    }

    #[test]
    fn reconstructs_linear_gradient() {
        for k in 0..=3 {
            let s = space(k);
            let rg = s.reconstruct_gradient(&s.interpolate(|x| x[0] + 2.0 * x[1] - 0.5));
            for t in 0..s.mesh().n_triangles() {
                let geom = s.mesh().geometry(t);
                for r in [[0.2, 0.3], [0.0, 0.0], [0.5, 0.5]] {
                    let g = rg.eval(t, &geom, &s.rt, r);
                    assert!((g[0] - 1.0).abs() < 1e-11 && (g[1] - 2.0).abs() < 1e-11, "k={k} {g:?}");
                }
            }
        }
    }

    #[test]
    fn reconstruction_commutes_with_projection() {
        // R I v is the L2 projection of grad v onto RT_k
        let v = |x: [f64; 2]| (x[0] * 1.3).sin() * (x[1] + 2.0).exp();
        let dv = |x: [f64; 2]| {
            [1.3 * (x[0] * 1.3).cos() * (x[1] + 2.0).exp(), (x[0] * 1.3).sin() * (x[1] + 2.0).exp()]
        };
        let rule = TriangleRule::new(18).unwrap();
        for k in 0..=3 {
            let s = space(k);
            let rg = s.reconstruct_gradient(&s.interpolate(v));
            for t in 0..s.mesh().n_triangles() {
                let geom = s.mesh().geometry(t);
                let proj = l2_project_rt(&dv, &geom, &s.rt, &rule).unwrap();
                for (a, b) in proj.iter().zip(rg.block(t)) {
                    assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "k={k} t={t}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn discrete_norm_vanishes_only_on_constants() {
        let s = space(1);
        assert!(s.discrete_norm(&s.interpolate(|_| 3.0), 2.0) < 1e-12);
        let n = s.discrete_norm(&s.interpolate(|x| x[0]), 2.0);
        // a linear function is continuous, so only the gradient part remains
        assert!((n * n - 3.0).abs() < 1e-10, "{n}");
    }
}
