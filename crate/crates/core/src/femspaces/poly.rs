//! Monomials `x^a y^b` on the reference triangle, ordered by total degree.

/// Number of bivariate polynomials of total degree at most `degree`.
pub const fn dim_p(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponent pairs `(a, b)` in the canonical order:
/// `1, x, y, x^2, xy, y^2, ...`.
pub fn exponents(degree: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim_p(degree));
    for d in 0..=degree {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// Index of `x^a y^b` in the canonical order.
pub fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    dim_p(d) - (d + 1) + b
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    for _ in 0..=n {
        p.push(v);
        v *= x;
    }
    p
}

/// Values of all monomials up to `degree` at `p`.
pub fn monomials(degree: usize, p: [f64; 2]) -> Vec<f64> {
    let px = powers(p[0], degree);
    let py = powers(p[1], degree);
    exponents(degree)
        .into_iter()
        .map(|(a, b)| px[a] * py[b])
        .collect()
}

/// Values and partial derivatives of all monomials up to `degree` at `p`.
pub fn monomials_with_gradient(degree: usize, p: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let px = powers(p[0], degree);
    let py = powers(p[1], degree);
    let exps = exponents(degree);
    let mut val = Vec::with_capacity(exps.len());
    let mut grad = Vec::with_capacity(exps.len());
    for (a, b) in exps {
        val.push(px[a] * py[b]);
        let dx = if a > 0 { a as f64 * px[a - 1] * py[b] } else { 0.0 };
        let dy = if b > 0 { b as f64 * px[a] * py[b - 1] } else { 0.0 };
        grad.push([dx, dy]);
    }
    (val, grad)
}

/// Exact integral of `x^a y^b` over the reference triangle.
pub fn reference_monomial_integral(a: usize, b: usize) -> f64 {
    let f = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    f(a) * f(b) / f(a + b + 2)
}
