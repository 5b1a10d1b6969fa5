use rayon::prelude::*;

use crate::density::DensityParams;
use crate::error::{Error, Result};
use crate::femspaces::projection::l2_project_cell;
use crate::femspaces::quadrature::TriangleRule;
use crate::hho::HhoSpace;

/// `||(1 - Pi^l) f||^q_{L^q(T)}` for every triangle.
pub fn oscillation_parts(space: &HhoSpace, f: &(dyn Fn([f64; 2]) -> f64 + Sync), q: f64) -> Vec<f64> {
    let rule = TriangleRule::new((space.degree() + 10).min(20)).expect("supported degree");
    let cell: Vec<Vec<f64>> = rule.reference_points().map(|r| space.cell_basis.values(r)).collect();
    (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            let c = l2_project_cell(f, &geom, &space.cell_basis, &rule);
            let mut sum = 0.0;
            for (i, (r, &w)) in rule.reference_points().zip(&rule.weights).enumerate() {
                let pf: f64 = c.iter().zip(&cell[i]).map(|(a, b)| a * b).sum();
                sum += w * geom.area * (f(geom.to_physical(r)) - pf).abs().powf(q);
            }
            sum
        })
        .collect()
}

/// `||h_T^m (1 - Pi^l) f||_{L^q}`; `m = 1` is the data oscillation entering
/// the lower energy bound.
pub fn oscillation(space: &HhoSpace, f: &(dyn Fn([f64; 2]) -> f64 + Sync), q: f64, m: f64) -> f64 {
    let parts = oscillation_parts(space, f, q);
    let mesh = space.mesh();
    parts
        .iter()
        .enumerate()
        .map(|(t, v)| mesh.geometry(t).diameter.powf(m * q) * v)
        .sum::<f64>()
        .powf(1.0 / q)
}

/// The constant `C_P c10` in front of the oscillation.
///
/// `c10` bounds `||grad u||_{L^p}` for every minimiser: it is the positive
/// root of `c1 x^p - C_F ||f||_{L^{p'}} x - c4 |Omega| - E(0)`, where `C_F`
/// is the Friedrichs constant of the domain and `C_P` the Poincare constant
/// of the triangles (relative to their diameter).
pub fn leb_constant(
    params: &DensityParams<f64>,
    f_norm: f64,
    area: f64,
    energy_at_zero: f64,
    friedrichs: f64,
    poincare: f64,
) -> Result<f64> {
    let a = friedrichs * f_norm;
    let b = params.c4 * area + energy_at_zero;
    let g = |x: f64| params.c1 * x.powf(params.p) - a * x - b;
    if a <= 0.0 && b <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut n = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        n += 1;
        if n > 200 {
            return Err(Error::RootNotFound);
        }
    }
    let mut lo = 0.0;
    // g is negative on (0, root) and increasing beyond it
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    // the upper end keeps the bound on the safe side
    Ok(poincare * hi)
}

/// `E*(sigma_h) - c12 osc`.
pub fn lower_energy_bound(dual: f64, c12: f64, osc: f64) -> f64 {
    dual - c12 * osc
}

/// `||f||_{L^q(Omega)}` by quadrature.
pub fn lebesgue_norm(space: &HhoSpace, f: &(dyn Fn([f64; 2]) -> f64 + Sync), q: f64) -> f64 {
    let rule = TriangleRule::new((space.degree() + 10).min(20)).expect("supported degree");
    let parts: Vec<f64> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = space.mesh().geometry(t);
            rule.reference_points()
                .zip(&rule.weights)
                .map(|(r, w)| w * geom.area * f(geom.to_physical(r)).abs().powf(q))
                .sum()
        })
        .collect();
    parts.iter().sum::<f64>().powf(1.0 / q)
}
