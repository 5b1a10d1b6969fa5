//! Discrete stress, dual energies, the guaranteed lower energy bound and
//! the a posteriori quantities driving adaptivity.

mod bounds;
mod conforming;
mod dual;
mod stress;

use rayon::prelude::*;

use crate::error::Result;
use crate::femspaces::quadrature::TriangleRule;
use crate::hho::{DiscreteEnergy, GradientField, HhoFunction, HhoSpace, Problem, StressField};

pub use bounds::{lebesgue_norm, leb_constant, lower_energy_bound, oscillation, oscillation_parts};
pub use conforming::{conforming_misfit, postprocess_conforming, ConformingField};
pub use dual::{dual_energy, fenchel_defect};
pub use stress::{discrete_stress, effective_load, equilibrium_residual, max_normal_jump};

/// Constants entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateSettings {
    /// Poincare constant of a triangle relative to its diameter.
    pub poincare: f64,
    /// Friedrichs constant of the domain in `L^p`.
    pub friedrichs: f64,
    /// Power of `h_T` in the oscillation term of RHS.
    pub rhs_osc_power: f64,
}

impl EstimateSettings {
    /// `C_P = 1/pi` for `p = 2` (convex cells), `1` otherwise; `C_F` from
    /// the narrower side `w` of the bounding box as `w p^{-1/p}`, valid for
    /// functions vanishing on two opposite sides of a strip containing the
    /// domain.
    pub fn defaults(space: &HhoSpace, problem: &Problem) -> Self {
        let p = problem.density.params().p;
        let [x0, y0, x1, y1] = space.mesh().bounding_box();
        let width = (x1 - x0).min(y1 - y0);
        Self {
            poincare: if p == 2.0 { std::f64::consts::FRAC_1_PI } else { 1.0 },
            friedrichs: width * p.powf(-1.0 / p),
            rhs_osc_power: 1.0,
        }
    }
}

/// Everything the estimator computes on one mesh.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub energy: f64,
    pub dual: f64,
    pub gap: f64,
    pub osc: f64,
    pub osc_rhs: f64,
    pub c12: f64,
    pub leb: f64,
    /// `||R u_h - grad v_C||^2_{L^p}`.
    pub misfit: f64,
    pub rhs: f64,
    pub eta: Vec<f64>,
    pub equilibrium: f64,
    pub max_jump: f64,
}

impl BoundReport {
    pub fn eta_sum(&self) -> f64 {
        self.eta.iter().sum()
    }
}

/// The load whose oscillation enters the bounds: `f`, or `f + 2 alpha g`
/// with a lower-order term (the part `-2 alpha u_T` lies in `P_k`).
pub fn oscillation_source(problem: &Problem) -> Box<dyn Fn([f64; 2]) -> f64 + Send + Sync + '_> {
    match &problem.lower_order {
        None => Box::new(|x| (problem.f)(x)),
        Some(lo) => Box::new(move |x| (problem.f)(x) + 2.0 * lo.alpha * (lo.g)(x)),
    }
}

/// Stress, bounds and refinement indicators at the discrete minimiser `u`.
///
/// The oscillation constant is only meaningful for homogeneous boundary
/// data without a lower-order term; otherwise `c12 = 0` and the bound is the
/// dual energy itself.
pub fn estimate(
    energy: &DiscreteEnergy,
    u: &HhoFunction,
    settings: &EstimateSettings,
) -> Result<(StressField, GradientField, BoundReport)> {
    let space = energy.space;
    let problem = energy.problem;
    let params = problem.density.params();
    let (p, q) = (params.p, params.p_dual);
    let sigma = discrete_stress(energy, u);
    let grad = space.reconstruct_gradient(u);
    let e = energy.value(u);
    let dual = dual_energy(energy, &sigma)?;
    let source = oscillation_source(problem);
    let osc_parts = oscillation_parts(space, &*source, q);
    let mesh = space.mesh();
    let weighted = |m: f64| -> f64 {
        osc_parts
            .iter()
            .enumerate()
            .map(|(t, v)| mesh.geometry(t).diameter.powf(m * q) * v)
            .sum::<f64>()
            .powf(1.0 / q)
    };
    let osc = weighted(1.0);
    let osc_rhs = weighted(settings.rhs_osc_power);
    let c12 = if problem.dirichlet.is_none() && problem.lower_order.is_none() {
        let f_norm = lebesgue_norm(space, &*problem.f, q);
        let area = mesh.total_area();
        let e0 = area * problem.density.value([0.0, 0.0]);
        leb_constant(&params, f_norm, area, e0, settings.friedrichs, settings.poincare)?
    } else {
        0.0
    };
    let vc = postprocess_conforming(
        space,
        &grad,
        p,
        problem.dirichlet.as_deref().map(|f| f as &(dyn Fn([f64; 2]) -> f64 + Sync)),
    )?;
    let mis = conforming_misfit(space, &grad, &vc, energy.tables(), p);
    let misfit = mis.iter().map(|m| m.0).sum::<f64>().powf(2.0 / p);
    let stress_misfit = stress_defect(energy, &sigma, &grad);
    let eta: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| {
            let area = mesh.area(t);
            stress_misfit[t] + area.powf(q / 2.0) * osc_parts[t] + area.powf((2.0 - p) / p) * mis[t].1
        })
        .collect();
    let gap = e - dual;
    let report = BoundReport {
        energy: e,
        dual,
        gap,
        osc,
        osc_rhs,
        c12,
        leb: lower_energy_bound(dual, c12, osc),
        misfit,
        rhs: gap + osc_rhs + misfit,
        eta,
        equilibrium: equilibrium_residual(energy, &sigma, u),
        max_jump: max_normal_jump(energy, &sigma),
    };
    Ok((sigma, grad, report))
}

/// `||sigma_h - DW(R u_h)||^{p'}_{L^{p'}(T)}` per triangle.
pub fn stress_defect(energy: &DiscreteEnergy, sigma: &StressField, grad: &GradientField) -> Vec<f64> {
    let space = energy.space;
    let tables = energy.tables();
    let w = &*energy.problem.density;
    let q = w.params().p_dual;
    (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let mut sum = 0.0;
            for (i, &wq) in tables.rule.weights.iter().enumerate() {
                let s = sigma.eval_with(t, &geom, &tables.rt[i]);
                let d = w.gradient(grad.eval_with(t, &geom, &tables.rt[i]));
                sum += wq * geom.area * (s[0] - d[0]).hypot(s[1] - d[1]).powf(q);
            }
            sum
        })
        .collect()
}

fn field_error(
    space: &HhoSpace,
    field: &GradientField,
    exact: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    q: f64,
) -> f64 {
    let rule = TriangleRule::new((space.degree() + 10).min(20)).expect("supported degree");
    let rt: Vec<Vec<[f64; 2]>> = rule.reference_points().map(|r| space.rt.values(r)).collect();
    let parts: Vec<f64> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let mut sum = 0.0;
            for (i, (r, &w)) in rule.reference_points().zip(&rule.weights).enumerate() {
                let a = field.eval_with(t, &geom, &rt[i]);
                let b = exact(geom.to_physical(r));
                sum += w * geom.area * (a[0] - b[0]).hypot(a[1] - b[1]).powf(q);
            }
            sum
        })
        .collect();
    parts.iter().sum::<f64>().powf(1.0 / q)
}

/// `||sigma - sigma_h||_{L^{p'}}`.
pub fn stress_error(
    space: &HhoSpace,
    sigma: &StressField,
    exact: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    p_dual: f64,
) -> f64 {
    field_error(space, sigma, exact, p_dual)
}

/// `||grad u - R u_h||_{L^p}`.
pub fn grad_error(
    space: &HhoSpace,
    grad: &GradientField,
    exact: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    p: f64,
) -> f64 {
    field_error(space, grad, exact, p)
}

/// `||u - u_T||_{L^2}`.
pub fn l2_error(space: &HhoSpace, u: &HhoFunction, exact: &(dyn Fn([f64; 2]) -> f64 + Sync)) -> f64 {
    let rule = TriangleRule::new((space.degree() + 10).min(20)).expect("supported degree");
    let cell: Vec<Vec<f64>> = rule.reference_points().map(|r| space.cell_basis.values(r)).collect();
    let parts: Vec<f64> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let mut sum = 0.0;
            for (i, (r, &w)) in rule.reference_points().zip(&rule.weights).enumerate() {
                let a: f64 = u.cell(t).iter().zip(&cell[i]).map(|(c, v)| c * v).sum();
                sum += w * geom.area * (a - exact(geom.to_physical(r))).powi(2);
            }
            sum
        })
        .collect();
    parts.iter().sum::<f64>().sqrt()
}
