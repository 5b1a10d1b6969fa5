//! Quadrature on the reference triangle and on the unit interval.
//!
//! Triangle rules are conical (collapsed) products of a Gauss-Jacobi rule
//! with weight `1 - t` and a Gauss-Legendre rule, which are exact for every
//! polynomial of total degree up to the requested one.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Highest polynomial degree for which a rule can be requested.
pub const MAX_DEGREE: usize = 20;

/// A quadrature rule on the reference triangle.
///
/// Points are barycentric coordinates `(l0, l1, l2)`; the reference
/// coordinates are `(l1, l2)`. Weights are normalised to sum to one, so
/// `sum_q w_q g(x_q) * |T|` approximates the integral over a triangle `T`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// A quadrature rule on `[0, 1]` with weights summing to one.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub degree: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::QuadratureDegree { degree, max: MAX_DEGREE });
        }
        let n = degree / 2 + 1;
        let (tj, wj) = gauss_jacobi_10(n);
        let (sl, wl) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&t, &wt) in tj.iter().zip(&wj) {
            for (&s, &ws) in sl.iter().zip(&wl) {
                let x = t;
                let y = s * (1.0 - t);
                points.push([1.0 - x - y, x, y]);
                // the Jacobi weights integrate (1 - t) g(t) and sum to 1/2
                weights.push(2.0 * wt * ws);
            }
        }
        Ok(Self { degree, points, weights })
    }

    /// Reference coordinates `(x, y)` of the quadrature points.
    pub fn reference_points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.points.iter().map(|b| [b[1], b[2]])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl EdgeRule {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::QuadratureDegree { degree, max: MAX_DEGREE });
        }
        let (points, weights) = gauss_legendre(degree / 2 + 1);
        Ok(Self { degree, points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Convenience constructor matching the triangle-rule contract.
pub fn quad_rule_triangle(degree: usize) -> Result<TriangleRule> {
    TriangleRule::new(degree)
}

/// Convenience constructor for Gauss-Legendre rules on an edge.
pub fn quad_rule_edge(degree: usize) -> Result<EdgeRule> {
    EdgeRule::new(degree)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, weights summing to one.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * weight;
        w[n - 1 - i] = 0.5 * weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Gauss-Jacobi rule for `int_0^1 (1 - t) g(t) dt` via Golub-Welsch.
fn gauss_jacobi_10(n: usize) -> (Vec<f64>, Vec<f64>) {
    // recurrence for weight (1 - x)^a (1 + x)^b on [-1, 1] with a = 1, b = 0
    let (a, b) = (1.0f64, 0.0f64);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let s = 2.0 * k + a + b;
        jac[(i, i)] = (b * b - a * a) / (s * (s + 2.0));
        if i + 1 < n {
            let m = k + 1.0;
            let s = 2.0 * m + a + b;
            let num = 4.0 * m * (m + a) * (m + b) * (m + a + b);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            // total mass of (1 - x) on [-1, 1] is 2; map to [0, 1] divides by 4
            (0.5 * (eig.eigenvalues[i] + 1.0), 2.0 * v0 * v0 / 4.0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}
