use nalgebra::DVector;
use rayon::prelude::*;

use crate::femspaces::quadrature::EdgeRule;
use crate::hho::{reference_edge_point, DiscreteEnergy, HhoFunction, StressField};

/// `sigma_h = Pi_Sigma DW(R u_h)`, computed with the energy quadrature.
pub fn discrete_stress(energy: &DiscreteEnergy, u: &HhoFunction) -> StressField {
    let space = energy.space;
    let tables = energy.tables();
    let w = &*energy.problem.density;
    let blocks: Vec<DVector<f64>> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let c = space.reconstruction(t) * space.gather(t, u);
            let mut b = DVector::<f64>::zeros(space.n_rt());
            for (q, &wq) in tables.rule.weights.iter().enumerate() {
                let phi: Vec<[f64; 2]> = tables.rt[q].iter().map(|r| geom.piola(*r)).collect();
                let mut v = [0.0; 2];
                for (cj, p) in c.iter().zip(&phi) {
                    v[0] += cj * p[0];
                    v[1] += cj * p[1];
                }
                let dw = w.gradient(v);
                for (bj, p) in b.iter_mut().zip(&phi) {
                    *bj += wq * geom.area * (dw[0] * p[0] + dw[1] * p[1]);
                }
            }
            space.rt_mass_inverse(t) * b
        })
        .collect();
    let mut coeffs = Vec::with_capacity(blocks.len() * space.n_rt());
    for b in blocks {
        coeffs.extend(b.iter());
    }
    StressField::new(space.degree(), coeffs)
}

/// Coefficients of the projected load balanced by `div sigma_h` on `t`:
/// `Pi f`, plus `2 alpha (Pi g - u_T)` with a lower-order term.
pub fn effective_load(energy: &DiscreteEnergy, u: &HhoFunction, t: usize) -> Vec<f64> {
    let mut load = energy.load(t).to_vec();
    if let (Some(lo), Some(gp)) = (&energy.problem.lower_order, energy.g_projection(t)) {
        for ((l, g), ut) in load.iter_mut().zip(gp).zip(u.cell(t)) {
            *l += 2.0 * lo.alpha * (g - ut);
        }
    }
    load
}

/// `||div sigma_h + Pi f_eff||_{L^{p'}}` with the effective load of
/// [`effective_load`].
pub fn equilibrium_residual(energy: &DiscreteEnergy, sigma: &StressField, u: &HhoFunction) -> f64 {
    let space = energy.space;
    let tables = energy.tables();
    let q = energy.problem.density.params().p_dual;
    let parts: Vec<f64> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let load = effective_load(energy, u, t);
            let mut sum = 0.0;
            for (i, &wq) in tables.rule.weights.iter().enumerate() {
                let div = sigma.div_with(t, &geom, &tables.rt_div[i]);
                let f: f64 = load.iter().zip(&tables.cell[i]).map(|(a, b)| a * b).sum();
                sum += wq * geom.area * (div + f).abs().powf(q);
            }
            sum
        })
        .collect();
    parts.iter().sum::<f64>().powf(1.0 / q)
}

/// Largest `|F|^{-1/2} ||[sigma_h . nu_F]||_{L^2(F)}` over interior sides.
pub fn max_normal_jump(energy: &DiscreteEnergy, sigma: &StressField) -> f64 {
    let space = energy.space;
    let mesh = space.mesh();
    let rule = EdgeRule::new(2 * space.degree() + 2).expect("supported degree");
    let jumps: Vec<f64> = mesh
        .sides()
        .par_iter()
        .filter_map(|side| {
            let (tm, em) = side.minus?;
            let (tp, ep) = side.plus;
            let (gp, gm) = (mesh.geometry(tp), mesh.geometry(tm));
            let nu = side.normal;
            let mut sum = 0.0;
            for (&s, &w) in rule.points.iter().zip(&rule.weights) {
                let sp = if mesh.side_is_aligned(tp, ep) { s } else { 1.0 - s };
                let sm = if mesh.side_is_aligned(tm, em) { s } else { 1.0 - s };
                let a = sigma.eval(tp, &gp, &space.rt, reference_edge_point(ep, sp));
                let b = sigma.eval(tm, &gm, &space.rt, reference_edge_point(em, sm));
                let j = (a[0] - b[0]) * nu[0] + (a[1] - b[1]) * nu[1];
                sum += w * j * j;
            }
            Some(sum.sqrt())
        })
        .collect();
    jumps.into_iter().fold(0.0, f64::max)
}
