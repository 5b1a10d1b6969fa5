use num_traits::Float;

use super::{cast, conjugate_numeric, dot, ConjugateSettings, Density, DensityParams, Mat2, Vec2};
use crate::error::{Error, Result};

/// Convex envelope of `|F - F1|^2 |F - F2|^2`:
/// `W(F) = max(0, |F - B|^2 - |A|^2)^2 + 4 (|A|^2 |F - B|^2 - (A.(F - B))^2)`
/// with `A = (F2 - F1)/2` and `B = (F1 + F2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWell<S> {
    pub f1: Vec2<S>,
    pub f2: Vec2<S>,
    a: Vec2<S>,
    b: Vec2<S>,
    pub settings: ConjugateSettings<S>,
}

impl<S: Float> TwoWell<S> {
    pub fn new(f1: Vec2<S>, f2: Vec2<S>) -> Result<Self> {
        if f1 == f2 {
            return Err(Error::InvalidDensity("the two wells must be distinct".into()));
        }
        let half = cast::<S>(0.5);
        let a = [half * (f2[0] - f1[0]), half * (f2[1] - f1[1])];
        let b = [half * (f1[0] + f2[0]), half * (f1[1] + f2[1])];
        Ok(Self { f1, f2, a, b, settings: ConjugateSettings::default() })
    }

    pub fn a(&self) -> Vec2<S> {
        self.a
    }

    pub fn b(&self) -> Vec2<S> {
        self.b
    }
}

impl<S: Float + Send + Sync + std::fmt::Debug> Density<S> for TwoWell<S> {
    fn params(&self) -> DensityParams<S> {
        let na2 = dot(self.a, self.a);
        let nb2 = dot(self.b, self.b);
        let half = cast::<S>(0.5);
        let lambda = cast::<S>(32.0) * S::one().max(na2).max(half * na2 + cast::<S>(2.0) * nb2);
        let n1 = dot(self.f1, self.f1);
        let n2 = dot(self.f2, self.f2);
        let kappa = cast::<S>(8.0) * (n1 * n1).max(n2 * n2);
        DensityParams::new(
            cast(4.0),
            cast(2.0),
            cast(2.0),
            [cast(0.125), cast(8.0), lambda, kappa, kappa],
        )
    }

    fn value(&self, f: Vec2<S>) -> S {
        let x = [f[0] - self.b[0], f[1] - self.b[1]];
        let na2 = dot(self.a, self.a);
        let q = dot(x, x) - na2;
        let ax = dot(self.a, x);
        let m = q.max(S::zero());
        m * m + cast::<S>(4.0) * (na2 * dot(x, x) - ax * ax)
    }

    fn gradient(&self, f: Vec2<S>) -> Vec2<S> {
        let x = [f[0] - self.b[0], f[1] - self.b[1]];
        let na2 = dot(self.a, self.a);
        let m = (dot(x, x) - na2).max(S::zero());
        let ax = dot(self.a, x);
        let (four, eight) = (cast::<S>(4.0), cast::<S>(8.0));
        [
            four * m * x[0] + eight * (na2 * x[0] - ax * self.a[0]),
            four * m * x[1] + eight * (na2 * x[1] - ax * self.a[1]),
        ]
    }

    fn hessian(&self, f: Vec2<S>) -> Mat2<S> {
        let x = [f[0] - self.b[0], f[1] - self.b[1]];
        let na2 = dot(self.a, self.a);
        let q = dot(x, x) - na2;
        let (four, eight) = (cast::<S>(4.0), cast::<S>(8.0));
        let mut h = [[S::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { S::one() } else { S::zero() };
                h[i][j] = eight * (na2 * id - self.a[i] * self.a[j]);
                if q > S::zero() {
                    h[i][j] = h[i][j] + four * q * id + eight * x[i] * x[j];
                }
            }
        }
        h
    }

    fn conjugate(&self, g: Vec2<S>) -> Result<S> {
        conjugate_numeric(self, g, &self.settings, &[self.f1, self.f2, self.b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw() -> TwoWell<f64> {
        TwoWell::new([-0.6, 0.2], [1.0, 0.8]).unwrap()
    }

    #[test]
    fn wells_are_minima() {
        let w = tw();
        for f in [w.f1, w.f2] {
            assert!(w.value(f).abs() < 1e-14);
            let g = w.gradient(f);
            assert!(g[0].abs() < 1e-14 && g[1].abs() < 1e-14);
        }
        for i in 0..10 {
            let s = i as f64 / 9.0;
            let f = [w.f1[0] + s * (w.f2[0] - w.f1[0]), w.f1[1] + s * (w.f2[1] - w.f1[1])];
            assert!(w.value(f) <= 1e-12);
        }
        assert!(TwoWell::new([1.0, 2.0], [1.0, 2.0]).is_err());
    }

    #[test]
    fn table_row() {
        let w = tw();
        let p = w.params();
        let kappa = 8.0 * (1.0f64 + 0.64).powi(2).max(0.4f64.powi(2));
        assert_eq!((p.p, p.r, p.s, p.c1, p.c2), (4.0, 2.0, 2.0, 0.125, 8.0));
        assert!((p.c4 - kappa).abs() < 1e-12 && (p.c5 - kappa).abs() < 1e-12);
    }

    #[test]
    fn conjugate_at_zero_vanishes() {
        let w = tw();
        assert!(w.conjugate([0.0, 0.0]).unwrap().abs() < 1e-12);
    }
}
