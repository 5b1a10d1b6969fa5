use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{HhoFunction, HhoSpace, Problem, RefTables};
use crate::error::Result;
use crate::femspaces::projection::l2_project_cell;
use crate::femspaces::quadrature::{TriangleRule, MAX_DEGREE};

/// `E_h(v) = int W(R v) - int f v_T (+ alpha ||g - v_T||^2)` on a fixed
/// space, with the load projections cached.
///
/// `W(Rv)` is integrated with the rule of degree `p (k + 1)` (capped at the
/// largest tabulated degree).
#[derive(Debug)]
pub struct DiscreteEnergy<'a> {
    pub space: &'a HhoSpace,
    pub problem: &'a Problem,
    tables: RefTables,
    load: Vec<f64>,
    g_proj: Vec<f64>,
    g_norm2: Vec<f64>,
}

/// Local gradient and Hessian of one triangle in local unknowns.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Degree of the energy quadrature for growth exponent `p` and degree `k`.
pub fn energy_quadrature_degree(p: f64, k: usize) -> usize {
    ((p * (k as f64 + 1.0)).ceil() as usize).clamp(2 * k + 2, MAX_DEGREE)
}

/// Degree used for projections of smooth data.
pub(crate) fn data_quadrature_degree(k: usize) -> usize {
    (k + 10).min(MAX_DEGREE)
}

impl<'a> DiscreteEnergy<'a> {
    pub fn new(space: &'a HhoSpace, problem: &'a Problem) -> Result<Self> {
        let p = problem.density.params().p;
        let tables = space.tables(energy_quadrature_degree(p, space.degree()))?;
        let rule = TriangleRule::new(data_quadrature_degree(space.degree()))?;
        let mesh = space.mesh();
        let project = |f: &(dyn Fn([f64; 2]) -> f64 + Sync)| -> Vec<f64> {
            let blocks: Vec<Vec<f64>> = (0..mesh.n_triangles())
                .into_par_iter()
                .map(|t| l2_project_cell(f, &mesh.geometry(t), &space.cell_basis, &rule))
                .collect();
            blocks.concat()
        };
        let load = project(&*problem.f);
        let (g_proj, g_norm2) = match &problem.lower_order {
            None => (Vec::new(), Vec::new()),
            Some(lo) => {
                let g = &*lo.g;
                let norms: Vec<f64> = (0..mesh.n_triangles())
                    .into_par_iter()
                    .map(|t| {
                        let geom = mesh.geometry(t);
                        rule.reference_points()
                            .zip(&rule.weights)
                            .map(|(r, w)| w * geom.area * g(geom.to_physical(r)).powi(2))
                            .sum()
                    })
                    .collect();
                (project(g), norms)
            }
        };
        Ok(Self { space, problem, tables, load, g_proj, g_norm2 })
    }

    pub fn tables(&self) -> &RefTables {
        &self.tables
    }

    /// Coefficients of `Pi^k f` on triangle `t`.
    pub fn load(&self, t: usize) -> &[f64] {
        let nc = self.space.n_cell();
        &self.load[t * nc..(t + 1) * nc]
    }

    /// Coefficients of `Pi^k g` on triangle `t` (lower-order term only).
    pub fn g_projection(&self, t: usize) -> Option<&[f64]> {
        let nc = self.space.n_cell();
        (!self.g_proj.is_empty()).then(|| &self.g_proj[t * nc..(t + 1) * nc])
    }

    fn lower_order_value(&self, t: usize, vt: &[f64], area: f64) -> f64 {
        let Some(lo) = &self.problem.lower_order else { return 0.0 };
        let gp = self.g_projection(t).expect("cached");
        let cross: f64 = gp.iter().zip(vt).map(|(a, b)| a * b).sum();
        let vv: f64 = vt.iter().map(|a| a * a).sum();
        lo.alpha * (self.g_norm2[t] - 2.0 * area * cross + area * vv)
    }

    /// Energy contribution of triangle `t` for local unknowns `local`.
    pub fn local_value(&self, t: usize, local: &DVector<f64>) -> f64 {
        let geom = self.space.mesh().geometry(t);
        let c = self.space.reconstruction(t) * local;
        let w = &*self.problem.density;
        let mut e = 0.0;
        for (q, &wq) in self.tables.rule.weights.iter().enumerate() {
            let mut v = [0.0; 2];
            for (cj, phi) in c.iter().zip(&self.tables.rt[q]) {
                v[0] += cj * phi[0];
                v[1] += cj * phi[1];
            }
            e += wq * w.value(geom.piola(v));
        }
        let nc = self.space.n_cell();
        let vt = &local.as_slice()[..nc];
        let lin: f64 = self.load(t).iter().zip(vt).map(|(a, b)| a * b).sum();
        geom.area * (e - lin) + self.lower_order_value(t, vt, geom.area)
    }

    pub fn value(&self, v: &HhoFunction) -> f64 {
        let parts: Vec<f64> = (0..self.space.mesh().n_triangles())
            .into_par_iter()
            .map(|t| self.local_value(t, &self.space.gather(t, v)))
            .collect();
        parts.iter().sum()
    }

    /// Value, gradient and (if requested) Hessian of triangle `t`.
    pub fn local_model(&self, t: usize, local: &DVector<f64>, with_hessian: bool) -> LocalModel {
        let geom = self.space.mesh().geometry(t);
        let recon = self.space.reconstruction(t);
        let c = recon * local;
        let nrt = self.space.n_rt();
        let w = &*self.problem.density;
        let mut e = 0.0;
        let mut b = DVector::<f64>::zeros(nrt);
        let mut k = DMatrix::<f64>::zeros(if with_hessian { nrt } else { 0 }, if with_hessian { nrt } else { 0 });
        let mut phi = vec![[0.0; 2]; nrt];
        for (q, &wq) in self.tables.rule.weights.iter().enumerate() {
            for (p, r) in phi.iter_mut().zip(&self.tables.rt[q]) {
                *p = geom.piola(*r);
            }
            let mut v = [0.0; 2];
            for (cj, p) in c.iter().zip(&phi) {
                v[0] += cj * p[0];
                v[1] += cj * p[1];
            }
            let wa = wq * geom.area;
            e += wa * w.value(v);
            let dw = w.gradient(v);
            for (bj, p) in b.iter_mut().zip(&phi) {
                *bj += wa * (dw[0] * p[0] + dw[1] * p[1]);
            }
            if with_hessian {
                let h = w.hessian(v);
                for j in 0..nrt {
                    let hp = [
                        h[0][0] * phi[j][0] + h[0][1] * phi[j][1],
                        h[1][0] * phi[j][0] + h[1][1] * phi[j][1],
                    ];
                    for i in j..nrt {
                        k[(i, j)] += wa * (phi[i][0] * hp[0] + phi[i][1] * hp[1]);
                    }
                }
            }
        }
        let nc = self.space.n_cell();
        let vt = &local.as_slice()[..nc];
        let mut gradient = recon.transpose() * b;
        let lin: f64 = self.load(t).iter().zip(vt).map(|(a, b)| a * b).sum();
        for (gi, fi) in gradient.iter_mut().zip(self.load(t)) {
            *gi -= geom.area * fi;
        }
        let mut value = e - geom.area * lin + self.lower_order_value(t, vt, geom.area);
        let mut hessian = DMatrix::zeros(0, 0);
        if with_hessian {
            k.fill_upper_triangle_with_lower_triangle();
            hessian = recon.transpose() * k * recon;
        }
        if let Some(lo) = &self.problem.lower_order {
            let gp = self.g_projection(t).expect("cached");
            for i in 0..nc {
                gradient[i] -= 2.0 * lo.alpha * geom.area * (gp[i] - vt[i]);
                if with_hessian {
                    hessian[(i, i)] += 2.0 * lo.alpha * geom.area;
                }
            }
        }
        if !value.is_finite() {
            value = f64::INFINITY;
        }
        LocalModel { value, gradient, hessian }
    }

    /// Local models of all triangles, computed in parallel.
    pub fn local_models(&self, v: &HhoFunction, with_hessian: bool) -> Vec<LocalModel> {
        (0..self.space.mesh().n_triangles())
            .into_par_iter()
            .map(|t| self.local_model(t, &self.space.gather(t, v), with_hessian))
            .collect()
    }

    /// Gradient with respect to the global unknowns.
    pub fn gradient(&self, v: &HhoFunction) -> Vec<f64> {
        let models = self.local_models(v, false);
        self.scatter_gradient(&models)
    }

    pub fn scatter_gradient(&self, models: &[LocalModel]) -> Vec<f64> {
        let mut g = vec![0.0; self.space.ndof()];
        for (t, m) in models.iter().enumerate() {
            for (gl, d) in m.gradient.iter().zip(self.space.local_dofs(t)) {
                if let Some(d) = d {
                    g[d] += gl;
                }
            }
        }
        g
    }
}

/// `E_h(v)`.
pub fn discrete_energy(space: &HhoSpace, problem: &Problem, v: &HhoFunction) -> Result<f64> {
    Ok(DiscreteEnergy::new(space, problem)?.value(v))
}

/// Gradient of `E_h` at `v` with respect to the unknowns.
pub fn energy_gradient(space: &HhoSpace, problem: &Problem, v: &HhoFunction) -> Result<Vec<f64>> {
    Ok(DiscreteEnergy::new(space, problem)?.gradient(v))
}
