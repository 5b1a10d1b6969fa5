//! L2 projections onto cell polynomials, edge polynomials and `RT_k(T)`.

use nalgebra::{DMatrix, DVector};

use super::basis::{CellBasis, EdgeBasis, RtBasis};
use super::geometry::{lerp, TriangleGeometry};
use super::quadrature::{EdgeRule, TriangleRule};
use crate::error::{Error, Result};

/// Coefficients of `Pi^l f` on `geom` in the orthonormal cell basis.
pub fn l2_project_cell(
    f: impl Fn([f64; 2]) -> f64,
    geom: &TriangleGeometry,
    basis: &CellBasis,
    rule: &TriangleRule,
) -> Vec<f64> {
    let mut c = vec![0.0; basis.dim()];
    for (r, &w) in rule.reference_points().zip(&rule.weights) {
        let fx = f(geom.to_physical(r));
        for (ci, phi) in c.iter_mut().zip(basis.values(r)) {
            *ci += w * fx * phi;
        }
    }
    c
}

/// Coefficients of `Pi^k f` on the segment from `a` to `b` in the scaled
/// Legendre basis parametrised from `a` to `b`.
pub fn l2_project_edge(
    f: impl Fn([f64; 2]) -> f64,
    a: [f64; 2],
    b: [f64; 2],
    basis: &EdgeBasis,
    rule: &EdgeRule,
) -> Vec<f64> {
    let mut c = vec![0.0; basis.dim()];
    for (&s, &w) in rule.points.iter().zip(&rule.weights) {
        let fx = f(lerp(a, b, s));
        for (ci, psi) in c.iter_mut().zip(basis.values(s)) {
            *ci += w * fx * psi;
        }
    }
    c
}

/// Physical RT mass matrix on `geom`.
pub fn rt_mass_matrix(geom: &TriangleGeometry, rt: &RtBasis, rule: &TriangleRule) -> DMatrix<f64> {
    let n = rt.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (r, &w) in rule.reference_points().zip(&rule.weights) {
        let phi: Vec<[f64; 2]> = rt.values(r).into_iter().map(|v| geom.piola(v)).collect();
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] += w * geom.area * (phi[i][0] * phi[j][0] + phi[i][1] * phi[j][1]);
            }
        }
    }
    m.fill_upper_triangle_with_lower_triangle();
    m
}

/// Coefficients of the L2 projection of `g` onto `RT_k(T)`.
pub fn l2_project_rt(
    g: impl Fn([f64; 2]) -> [f64; 2],
    geom: &TriangleGeometry,
    rt: &RtBasis,
    rule: &TriangleRule,
) -> Result<Vec<f64>> {
    let n = rt.dim();
    let mass = rt_mass_matrix(geom, rt, rule);
    let mut rhs = DVector::<f64>::zeros(n);
    for (r, &w) in rule.reference_points().zip(&rule.weights) {
        let gx = g(geom.to_physical(r));
        for (i, v) in rt.values(r).into_iter().enumerate() {
            let phi = geom.piola(v);
            rhs[i] += w * geom.area * (gx[0] * phi[0] + gx[1] * phi[1]);
        }
    }
    let chol = mass.cholesky().ok_or(Error::SingularLocalMatrix(0))?;
    Ok(chol.solve(&rhs).data.into())
}

/// Evaluates an RT coefficient block at reference point `r`.
pub fn rt_eval(geom: &TriangleGeometry, rt: &RtBasis, coeffs: &[f64], r: [f64; 2]) -> [f64; 2] {
    let mut v = [0.0; 2];
    for (c, phi) in coeffs.iter().zip(rt.values(r)) {
        v[0] += c * phi[0];
        v[1] += c * phi[1];
    }
    geom.piola(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::femspaces::geometry::dot;

    fn tri() -> TriangleGeometry {
        TriangleGeometry::new([[0.1, -0.2], [1.3, 0.2], [0.4, 0.9]])
    }

    fn cell_eval(b: &CellBasis, c: &[f64], r: [f64; 2]) -> f64 {
        b.values(r).iter().zip(c).map(|(p, c)| p * c).sum()
    }

    #[test]
    fn mean_of_x_squared_on_reference() {
        let g = TriangleGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let b = CellBasis::new(0);
        let rule = TriangleRule::new(4).unwrap();
        let c = l2_project_cell(|x| x[0] * x[0], &g, &b, &rule);
        assert!((c[0] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn cell_projection_reproduces_polynomials_and_is_orthogonal() {
        let g = tri();
        let b = CellBasis::new(3);
        let rule = TriangleRule::new(12).unwrap();
        let p = |x: [f64; 2]| 1.0 - x[0] + 2.0 * x[0] * x[1] - x[1].powi(3);
        let c = l2_project_cell(p, &g, &b, &rule);
        let r = [0.2, 0.5];
        assert!((cell_eval(&b, &c, r) - p(g.to_physical(r))).abs() < 1e-13);

        let f = |x: [f64; 2]| (x[0] * 3.0).sin() * x[1].exp();
        let c = l2_project_cell(f, &g, &b, &rule);
        for j in 0..b.dim() {
            let s: f64 = rule
                .reference_points()
                .zip(&rule.weights)
                .map(|(r, w)| w * (f(g.to_physical(r)) - cell_eval(&b, &c, r)) * b.values(r)[j])
                .sum();
            assert!(s.abs() < 1e-13);
        }
    }

    #[test]
    fn edge_projection_reproduces_polynomials() {
        let b = EdgeBasis::new(2);
        let rule = EdgeRule::new(6).unwrap();
        let (a, e) = ([0.0, 1.0], [2.0, 0.5]);
        let p = |x: [f64; 2]| x[0] * x[0] - x[1];
        let c = l2_project_edge(p, a, e, &b, &rule);
        for s in [0.0, 0.3, 1.0] {
            let v: f64 = b.values(s).iter().zip(&c).map(|(p, c)| p * c).sum();
            assert!((v - p(lerp(a, e, s))).abs() < 1e-13);
        }
    }

    #[test]
    fn rt_projection_reproduces_rt_fields() {
        let g = tri();
        let rt = RtBasis::new(1);
        let rule = TriangleRule::new(8).unwrap();
        // (1 + x, y^2 - x) + x * (x + 2y) is in RT_1
        let h = |x: [f64; 2]| {
            let s = x[0] + 2.0 * x[1];
            [1.0 + x[0] + x[0] * s, -x[0] + x[1] * s]
        };
        let c = l2_project_rt(h, &g, &rt, &rule).unwrap();
        for r in [[0.1, 0.1], [0.5, 0.3]] {
            let v = rt_eval(&g, &rt, &c, r);
            let e = h(g.to_physical(r));
            assert!((v[0] - e[0]).abs() < 1e-12 && (v[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn rt_shape_functions_have_polynomial_divergence_and_normal_trace() {
        let g = tri();
        for k in 0..=3 {
            let rt = RtBasis::new(k);
            let cb = CellBasis::new(k);
            let rule = TriangleRule::new(2 * k + 4).unwrap();
            for j in 0..rt.dim() {
                // divergence: residual of its P_k projection
                let div = |r: [f64; 2]| rt.divergences(r)[j] / g.det;
                let c: Vec<f64> = {
                    let mut c = vec![0.0; cb.dim()];
                    for (r, &w) in rule.reference_points().zip(&rule.weights) {
                        for (ci, phi) in c.iter_mut().zip(cb.values(r)) {
                            *ci += w * div(r) * phi;
                        }
                    }
                    c
                };
                for r in [[0.13, 0.71], [0.4, 0.4]] {
                    assert!((cell_eval(&cb, &c, r) - div(r)).abs() < 1e-10);
                }
                // normal trace on each edge: projection onto P_k(F) is exact
                let eb = EdgeBasis::new(k);
                let erule = EdgeRule::new(2 * k + 2).unwrap();
                for e in 0..3 {
                    let (a, b) = g.edge(e);
                    let n = g.outward_normal(e);
                    let vn = |x: [f64; 2]| {
                        let r = g.to_reference(x);
                        dot(g.piola(rt.values(r)[j]), n)
                    };
                    let c = l2_project_edge(vn, a, b, &eb, &erule);
                    for s in [0.17, 0.8] {
                        let p: f64 = eb.values(s).iter().zip(&c).map(|(p, c)| p * c).sum();
                        assert!((p - vn(lerp(a, b, s))).abs() < 1e-10);
                    }
                }
            }
        }
    }
}
