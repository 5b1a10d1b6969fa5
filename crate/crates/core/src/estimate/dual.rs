use rayon::prelude::*;

use crate::error::Result;
use crate::femspaces::quadrature::{EdgeRule, TriangleRule};
use crate::hho::{reference_edge_point, DiscreteEnergy, HhoFunction, StressField};

/// The dual energy of `sigma`.
///
/// Without a lower-order term this is `-int W*(sigma) + int_{dOmega} u_D sigma.nu`
/// (the boundary term vanishes for homogeneous data). With the term
/// `alpha ||g - v||^2` it is the discrete dual
/// `-int (W*(sigma) + g r) + int_{dOmega} u_D sigma.nu - ||r||^2 / (4 alpha)`
/// with `r = div sigma + Pi f`.
pub fn dual_energy(energy: &DiscreteEnergy, sigma: &StressField) -> Result<f64> {
    let space = energy.space;
    let problem = energy.problem;
    let mesh = space.mesh();
    let tables = energy.tables();
    let w = &*problem.density;
    let data_rule = TriangleRule::new((space.degree() + 10).min(20))?;
    let data_rt_div: Vec<Vec<f64>> = data_rule.reference_points().map(|r| space.rt.divergences(r)).collect();
    let data_cell: Vec<Vec<f64>> = data_rule.reference_points().map(|r| space.cell_basis.values(r)).collect();
    let parts: Vec<Result<f64>> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = mesh.geometry(t);
            let mut sum = 0.0;
            for (i, &wq) in tables.rule.weights.iter().enumerate() {
                let s = sigma.eval_with(t, &geom, &tables.rt[i]);
                sum -= wq * geom.area * w.conjugate(s)?;
            }
            if let Some(lo) = &problem.lower_order {
                let load = energy.load(t);
                for (i, (r, &wq)) in data_rule.reference_points().zip(&data_rule.weights).enumerate() {
                    let div = sigma.div_with(t, &geom, &data_rt_div[i]);
                    let f: f64 = load.iter().zip(&data_cell[i]).map(|(a, b)| a * b).sum();
                    let res = div + f;
                    let g = (lo.g)(geom.to_physical(r));
                    sum -= wq * geom.area * (g * res + res * res / (4.0 * lo.alpha));
                }
            }
            Ok(sum)
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    if let Some(ud) = &problem.dirichlet {
        let erule = EdgeRule::new((2 * space.degree() + 10).min(20))?;
        for side in mesh.sides().iter().filter(|s| s.is_boundary()) {
            let (t, e) = side.plus;
            let geom = mesh.geometry(t);
            let (a, b) = geom.edge(e);
            for (&s, &wq) in erule.points.iter().zip(&erule.weights) {
                let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let v = sigma.eval(t, &geom, &space.rt, reference_edge_point(e, s));
                total += wq * side.length * ud(x) * (v[0] * side.normal[0] + v[1] * side.normal[1]);
            }
        }
    }
    Ok(total)
}

/// The Fenchel-Young defect `int W(R u_h) + W*(sigma_h) - sigma_h . R u_h`.
///
/// Nonnegative pointwise; at a discrete minimiser with homogeneous data and
/// no lower-order term it equals the duality gap `E_h(u_h) - E*(sigma_h)`.
pub fn fenchel_defect(energy: &DiscreteEnergy, sigma: &StressField, u: &HhoFunction) -> Result<f64> {
    let space = energy.space;
    let tables = energy.tables();
    let w = &*energy.problem.density;
    let parts: Vec<Result<f64>> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let c = space.reconstruction(t) * space.gather(t, u);
            let mut sum = 0.0;
            for (i, &wq) in tables.rule.weights.iter().enumerate() {
                let s = sigma.eval_with(t, &geom, &tables.rt[i]);
                let mut a = [0.0; 2];
                for (cj, p) in c.iter().zip(&tables.rt[i]) {
                    a[0] += cj * p[0];
                    a[1] += cj * p[1];
                }
                let a = geom.piola(a);
                sum += wq * geom.area * (w.value(a) + w.conjugate(s)? - s[0] * a[0] - s[1] * a[1]);
            }
            Ok(sum)
        })
        .collect();
    parts.into_iter().sum()
}
