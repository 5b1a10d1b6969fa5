use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::femspaces::basis::LagrangeBasis;
use crate::femspaces::quadrature::TriangleRule;
use crate::hho::{GradientField, HhoSpace, RefTables};
use crate::sparse::SymmetricPattern;

/// A continuous piecewise polynomial of degree `m` given by its values at
/// the global Lagrange nodes.
#[derive(Debug, Clone)]
pub struct ConformingField {
    pub basis: LagrangeBasis,
    /// Global node of every local node, per triangle.
    pub nodes: Vec<Vec<usize>>,
    pub values: Vec<f64>,
}

impl ConformingField {
    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn local_values(&self, t: usize) -> Vec<f64> {
        self.nodes[t].iter().map(|&n| self.values[n]).collect()
    }
}

/// Global numbering of the Lagrange nodes of degree `m`: vertices, then
/// `m - 1` nodes per side from its smaller to its larger vertex, then the
/// interior nodes triangle by triangle. Returns the local-to-global maps,
/// the node count and the boundary flags.
fn number_nodes(space: &HhoSpace, m: usize) -> (Vec<Vec<usize>>, usize, Vec<bool>) {
    let mesh = space.mesh();
    let nv = mesh.n_vertices();
    let ns = mesh.n_sides();
    let per_edge = m - 1;
    let n_int = (m.saturating_sub(1)) * (m.saturating_sub(2)) / 2;
    let total = nv + ns * per_edge + mesh.n_triangles() * n_int;
    let mut boundary = vec![false; total];
    for v in 0..nv {
        boundary[v] = mesh.is_boundary_vertex(v);
    }
    for (s, side) in mesh.sides().iter().enumerate() {
        if side.is_boundary() {
            for i in 0..per_edge {
                boundary[nv + s * per_edge + i] = true;
            }
        }
    }
    let maps = (0..mesh.n_triangles())
        .map(|t| {
            let mut map: Vec<usize> = mesh.triangles()[t].to_vec();
            for (e, s) in mesh.triangle_sides(t).into_iter().enumerate() {
                let aligned = mesh.side_is_aligned(t, e);
                for i in 0..per_edge {
                    let j = if aligned { i } else { per_edge - 1 - i };
                    map.push(nv + s * per_edge + j);
                }
            }
            let base = nv + ns * per_edge + t * n_int;
            map.extend(base..base + n_int);
            map
        })
        .collect();
    (maps, total, boundary)
}

/// The continuous `P_{k+1}` function `v_C` minimising
/// `sum_T |T|^{(2-p)/p} ||R u_h - grad v_C||^2_{L^2(T)}` subject to
/// `v_C = u_D` (nodal interpolation, zero without data) at boundary nodes.
pub fn postprocess_conforming(
    space: &HhoSpace,
    grad: &GradientField,
    p: f64,
    dirichlet: Option<&(dyn Fn([f64; 2]) -> f64 + Sync)>,
) -> Result<ConformingField> {
    let mesh = space.mesh();
    let m = space.degree() + 1;
    let basis = LagrangeBasis::new(m);
    let (maps, total, boundary) = number_nodes(space, m);
    let mut values = vec![0.0; total];
    if let Some(ud) = dirichlet {
        for t in 0..mesh.n_triangles() {
            let geom = mesh.geometry(t);
            for (local, &g) in maps[t].iter().enumerate() {
                if boundary[g] {
                    values[g] = ud(geom.to_physical(basis.nodes[local]));
                }
            }
        }
    }
    let mut unknown = vec![None; total];
    let mut n = 0;
    for (g, b) in boundary.iter().enumerate() {
        if !b {
            unknown[g] = Some(n);
            n += 1;
        }
    }
    if n == 0 {
        return Ok(ConformingField { basis, nodes: maps, values });
    }
    let rule = TriangleRule::new(2 * m)?;
    let grads: Vec<Vec<[f64; 2]>> = rule.reference_points().map(|r| basis.values_and_gradients(r).1).collect();
    let rt: Vec<Vec<[f64; 2]>> = rule.reference_points().map(|r| space.rt.values(r)).collect();
    let nl = basis.dim();
    let locals: Vec<(Vec<f64>, Vec<f64>)> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = mesh.geometry(t);
            let weight = geom.area.powf((2.0 - p) / p);
            let mut a = DMatrix::<f64>::zeros(nl, nl);
            let mut b = vec![0.0; nl];
            for (q, &w) in rule.weights.iter().enumerate() {
                let g: Vec<[f64; 2]> = grads[q].iter().map(|d| geom.push_gradient(*d)).collect();
                let r = grad.eval_with(t, &geom, &rt[q]);
                let wa = weight * w * geom.area;
                for i in 0..nl {
                    b[i] += wa * (r[0] * g[i][0] + r[1] * g[i][1]);
                    for j in 0..=i {
                        a[(i, j)] += wa * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    }
                }
            }
            a.fill_upper_triangle_with_lower_triangle();
            (a.transpose().as_slice().to_vec(), b)
        })
        .collect();
    let blocks: Vec<Vec<Option<usize>>> =
        maps.iter().map(|map| map.iter().map(|&g| unknown[g]).collect()).collect();
    let pattern = SymmetricPattern::new(n, blocks)?;
    let mut rhs = vec![0.0; n];
    for (t, (a, b)) in locals.iter().enumerate() {
        for (i, &gi) in maps[t].iter().enumerate() {
            let Some(ui) = unknown[gi] else { continue };
            rhs[ui] += b[i];
            for (j, &gj) in maps[t].iter().enumerate() {
                if unknown[gj].is_none() {
                    rhs[ui] -= a[i * nl + j] * values[gj];
                }
            }
        }
    }
    let mats: Vec<Vec<f64>> = locals.into_iter().map(|(a, _)| a).collect();
    let mat = pattern.assemble(&mats, &vec![0.0; n])?;
    let x = pattern.solve(&mat, &rhs)?;
    for (g, u) in unknown.iter().enumerate() {
        if let Some(u) = *u {
            values[g] = x[u];
        }
    }
    Ok(ConformingField { basis, nodes: maps, values })
}

/// Per triangle `(||R u_h - grad v_C||^p_{L^p(T)}, ||R u_h - grad v_C||^2_{L^2(T)})`.
pub fn conforming_misfit(
    space: &HhoSpace,
    grad: &GradientField,
    vc: &ConformingField,
    tables: &RefTables,
    p: f64,
) -> Vec<(f64, f64)> {
    let mesh = space.mesh();
    let grads: Vec<Vec<[f64; 2]>> =
        tables.rule.reference_points().map(|r| vc.basis.values_and_gradients(r).1).collect();
    (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = mesh.geometry(t);
            let vals = vc.local_values(t);
            let (mut lp, mut l2) = (0.0, 0.0);
            for (q, &w) in tables.rule.weights.iter().enumerate() {
                let mut d = [0.0; 2];
                for (c, g) in vals.iter().zip(&grads[q]) {
                    d[0] += c * g[0];
                    d[1] += c * g[1];
                }
                let d = geom.push_gradient(d);
                let r = grad.eval_with(t, &geom, &tables.rt[q]);
                let e = (r[0] - d[0]).hypot(r[1] - d[1]);
                lp += w * geom.area * e.powf(p);
                l2 += w * geom.area * e * e;
            }
            (lp, l2)
        })
        .collect()
}
