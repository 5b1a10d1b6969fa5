//! Shape functions on the reference triangle and the unit interval.

use nalgebra::{DMatrix, DVector};

use super::poly::{dim_p, exponents, monomial_index, monomials, monomials_with_gradient};
use super::quadrature::{EdgeRule, TriangleRule};

/// Orthonormal basis of `P_l` on the reference triangle.
///
/// Orthonormality is with respect to the area-normalised inner product
/// `(1/|T|) int_T u v`, which is invariant under affine maps, so the same
/// functions are orthonormal on every physical triangle. The functions are
/// the normalised Dubiner polynomials ordered by total degree; the first one
/// is the constant one.
#[derive(Debug, Clone)]
pub struct CellBasis {
    pub degree: usize,
    scale: Vec<f64>,
}

/// Value with its two partial derivatives.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    d: [f64; 2],
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: [0.0; 2] }
    }
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1]] }
    }
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: [self.d[0] * o.v + self.v * o.d[0], self.d[1] * o.v + self.v * o.d[1]],
        }
    }
    fn scale(self, c: f64) -> Self {
        Self { v: c * self.v, d: [c * self.d[0], c * self.d[1]] }
    }
}

/// Unnormalised Dubiner polynomials with gradients, ordered by total degree.
fn dubiner(degree: usize, r: [f64; 2]) -> Vec<Dual> {
    let a = Dual { v: 2.0 * r[0] + r[1] - 1.0, d: [2.0, 1.0] };
    let b = Dual { v: 1.0 - r[1], d: [0.0, -1.0] };
    let z = Dual { v: 2.0 * r[1] - 1.0, d: [0.0, 2.0] };
    let b2 = b.mul(b);
    // q[p] = P_p(a / b) b^p
    let mut q = vec![Dual::constant(1.0)];
    if degree >= 1 {
        q.push(a);
    }
    for n in 1..degree {
        let nf = n as f64;
        let next = a
            .mul(q[n])
            .scale((2.0 * nf + 1.0) / (nf + 1.0))
            .add(b2.mul(q[n - 1]).scale(-nf / (nf + 1.0)));
        q.push(next);
    }
    // jac[p][m] = P_m^{(2p+1, 0)}(z)
    let jacobi = |alpha: f64, nmax: usize| -> Vec<Dual> {
        let mut j = vec![Dual::constant(1.0)];
        if nmax >= 1 {
            j.push(z.scale(0.5 * (alpha + 2.0)).add(Dual::constant(0.5 * alpha)));
        }
        for n in 1..nmax {
            let nf = n as f64;
            let s = 2.0 * nf + alpha;
            let c0 = 2.0 * (nf + 1.0) * (nf + alpha + 1.0) * s;
            let c1 = (s + 1.0) * (s + 2.0) * s;
            let c2 = (s + 1.0) * alpha * alpha;
            let c3 = 2.0 * nf * (nf + alpha) * (s + 2.0);
            let next = z
                .scale(c1)
                .add(Dual::constant(c2))
                .mul(j[n])
                .add(j[n - 1].scale(-c3))
                .scale(1.0 / c0);
            j.push(next);
        }
        j
    };
    let mut out = Vec::with_capacity(dim_p(degree));
    let jac: Vec<Vec<Dual>> = (0..=degree)
        .map(|p| jacobi(2.0 * p as f64 + 1.0, degree - p))
        .collect();
    for d in 0..=degree {
        for m in 0..=d {
            let p = d - m;
            out.push(q[p].mul(jac[p][m]));
        }
    }
    out
}

impl CellBasis {
    pub fn new(degree: usize) -> Self {
        let rule = TriangleRule::new((2 * degree).min(super::quadrature::MAX_DEGREE))
            .expect("cell basis degree up to 10");
        let mut norm2 = vec![0.0; dim_p(degree)];
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            for (n, v) in norm2.iter_mut().zip(dubiner(degree, r)) {
                *n += w * v.v * v.v;
            }
        }
        let scale = norm2.into_iter().map(|n| 1.0 / n.sqrt()).collect();
        Self { degree, scale }
    }

    pub fn dim(&self) -> usize {
        dim_p(self.degree)
    }

    pub fn values(&self, r: [f64; 2]) -> Vec<f64> {
        dubiner(self.degree, r)
            .into_iter()
            .zip(&self.scale)
            .map(|(v, s)| s * v.v)
            .collect()
    }

    /// Values and reference-coordinate gradients.
    pub fn values_and_gradients(&self, r: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        dubiner(self.degree, r)
            .into_iter()
            .zip(&self.scale)
            .map(|(v, s)| (s * v.v, [s * v.d[0], s * v.d[1]]))
            .unzip()
    }
}

/// Scaled Legendre polynomials `sqrt(2i+1) P_i(2s - 1)` on `[0, 1]`,
/// orthonormal for `int_0^1`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeBasis {
    pub degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn values(&self, s: f64) -> Vec<f64> {
        let z = 2.0 * s - 1.0;
        let mut p = Vec::with_capacity(self.degree + 1);
        p.push(1.0);
        if self.degree >= 1 {
            p.push(z);
        }
        for j in 2..=self.degree {
            let jf = j as f64;
            let next = ((2.0 * jf - 1.0) * z * p[j - 1] - (jf - 1.0) * p[j - 2]) / jf;
            p.push(next);
        }
        p.iter()
            .enumerate()
            .map(|(i, v)| v * (2.0 * i as f64 + 1.0).sqrt())
            .collect()
    }
}

/// Raviart-Thomas space `RT_k = P_k^2 + x P_k` on the reference triangle,
/// in the basis dual to the canonical moments:
///
/// * for each local edge `e` (opposite vertex `e`, traversed from vertex
///   `e+1` to `e+2`) the moments `int_e phi . n psi_i` against the scaled
///   Legendre basis of that edge, `i = 0..=k`;
/// * for `k >= 1` the interior moments `int_T phi_c q` against the
///   orthonormal basis of `P_{k-1}` for both components `c`.
///
/// Physical shape functions are obtained with the contravariant Piola map,
/// which preserves the edge moments, so the same duality holds on every
/// positively oriented triangle.
#[derive(Debug, Clone)]
pub struct RtBasis {
    pub degree: usize,
    /// Coefficients of the x and y components in the monomials of degree `k + 1`.
    cx: DMatrix<f64>,
    cy: DMatrix<f64>,
}

const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

impl RtBasis {
    pub fn new(degree: usize) -> Self {
        let k = degree;
        let nm = dim_p(k + 1);
        let n = (k + 1) * (k + 3);
        // spanning set in monomial coefficients
        let mut sx = DMatrix::<f64>::zeros(n, nm);
        let mut sy = DMatrix::<f64>::zeros(n, nm);
        let mut row = 0;
        for (a, b) in exponents(k) {
            sx[(row, monomial_index(a, b))] = 1.0;
            sy[(row + 1, monomial_index(a, b))] = 1.0;
            row += 2;
        }
        for b in 0..=k {
            let a = k - b;
            sx[(row, monomial_index(a + 1, b))] = 1.0;
            sy[(row, monomial_index(a, b + 1))] = 1.0;
            row += 1;
        }
        debug_assert_eq!(row, n);

        let raw = RtBasis { degree, cx: sx, cy: sy };
        // dof matrix D[i][j] = dof_i(spanning_j)
        let mut dofs = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let d = raw.canonical_dofs(j);
            for i in 0..n {
                dofs[(i, j)] = d[i];
            }
        }
        let inv = dofs.try_inverse().expect("RT degrees of freedom are unisolvent");
        // basis_j = sum_l spanning_l inv[l][j]
        let cx = inv.transpose() * &raw.cx;
        let cy = inv.transpose() * &raw.cy;
        Self { degree, cx, cy }
    }

    pub fn dim(&self) -> usize {
        (self.degree + 1) * (self.degree + 3)
    }

    /// Canonical moments of reference function `j` of this representation.
    fn canonical_dofs(&self, j: usize) -> Vec<f64> {
        let k = self.degree;
        let rule = EdgeRule::new(2 * k + 2).expect("low degree edge rule");
        let ebasis = EdgeBasis::new(k);
        let mut out = Vec::with_capacity(self.dim());
        for e in 0..3 {
            let a = REF_VERTICES[(e + 1) % 3];
            let b = REF_VERTICES[(e + 2) % 3];
            let t = [b[0] - a[0], b[1] - a[1]];
            let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
            let nrm = [t[1] / len, -t[0] / len];
            let mut mom = vec![0.0; k + 1];
            for (&s, &w) in rule.points.iter().zip(&rule.weights) {
                let x = [a[0] + s * t[0], a[1] + s * t[1]];
                let v = self.value_of(j, x);
                let vn = v[0] * nrm[0] + v[1] * nrm[1];
                for (m, psi) in mom.iter_mut().zip(ebasis.values(s)) {
                    *m += w * len * vn * psi;
                }
            }
            out.extend(mom);
        }
        if k >= 1 {
            let rule = TriangleRule::new(2 * k + 1).expect("low degree rule");
            let cb = CellBasis::new(k - 1);
            let mut mx = vec![0.0; cb.dim()];
            let mut my = vec![0.0; cb.dim()];
            for (x, &w) in rule.reference_points().zip(&rule.weights) {
                let v = self.value_of(j, x);
                for (i, q) in cb.values(x).into_iter().enumerate() {
                    mx[i] += 0.5 * w * v[0] * q;
                    my[i] += 0.5 * w * v[1] * q;
                }
            }
            for i in 0..cb.dim() {
                out.push(mx[i]);
                out.push(my[i]);
            }
        }
        out
    }

    fn value_of(&self, j: usize, r: [f64; 2]) -> [f64; 2] {
        let m = monomials(self.degree + 1, r);
        let mut v = [0.0; 2];
        for (i, mi) in m.iter().enumerate() {
            v[0] += self.cx[(j, i)] * mi;
            v[1] += self.cy[(j, i)] * mi;
        }
        v
    }

    /// Reference values of all shape functions.
    pub fn values(&self, r: [f64; 2]) -> Vec<[f64; 2]> {
        let m = DVector::from_vec(monomials(self.degree + 1, r));
        let vx = &self.cx * &m;
        let vy = &self.cy * &m;
        vx.iter().zip(vy.iter()).map(|(&a, &b)| [a, b]).collect()
    }

    /// Reference divergences of all shape functions.
    pub fn divergences(&self, r: [f64; 2]) -> Vec<f64> {
        let (_, dm) = monomials_with_gradient(self.degree + 1, r);
        let dx = DVector::from_iterator(dm.len(), dm.iter().map(|g| g[0]));
        let dy = DVector::from_iterator(dm.len(), dm.iter().map(|g| g[1]));
        (&self.cx * dx + &self.cy * dy).data.into()
    }
}

/// Nodal Lagrange basis of `P_m` on the reference triangle.
///
/// Node order: the three vertices, then the `m - 1` interior nodes of each
/// local edge `e` ordered from vertex `e+1` towards vertex `e+2`, then the
/// interior nodes.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub degree: usize,
    pub nodes: Vec<[f64; 2]>,
    coeffs: DMatrix<f64>,
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "Lagrange elements need degree >= 1");
        let m = degree;
        let h = 1.0 / m as f64;
        let mut nodes: Vec<[f64; 2]> = REF_VERTICES.to_vec();
        for e in 0..3 {
            let a = REF_VERTICES[(e + 1) % 3];
            let b = REF_VERTICES[(e + 2) % 3];
            for i in 1..m {
                let s = i as f64 * h;
                nodes.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        for j in 1..m {
            for i in 1..m {
                if i + j < m {
                    nodes.push([i as f64 * h, j as f64 * h]);
                }
            }
        }
        let n = dim_p(m);
        debug_assert_eq!(nodes.len(), n);
        // V[i][j] = monomial j at node i; basis coefficients are the columns of V^{-1}
        let mut vand = DMatrix::<f64>::zeros(n, n);
        for (i, x) in nodes.iter().enumerate() {
            for (j, v) in monomials(m, *x).into_iter().enumerate() {
                vand[(i, j)] = v;
            }
        }
        let inv = vand.try_inverse().expect("equispaced nodes are unisolvent");
        Self { degree, nodes, coeffs: inv.transpose() }
    }

    pub fn dim(&self) -> usize {
        dim_p(self.degree)
    }

    pub fn values_and_gradients(&self, r: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (m, dm) = monomials_with_gradient(self.degree, r);
        let n = self.dim();
        let mut val = vec![0.0; n];
        let mut grad = vec![[0.0; 2]; n];
        for i in 0..n {
            for j in 0..n {
                let c = self.coeffs[(i, j)];
                val[i] += c * m[j];
                grad[i][0] += c * dm[j][0];
                grad[i][1] += c * dm[j][1];
            }
        }
        (val, grad)
    }
}
