use num_traits::Float;

use super::{cast, norm, Density, DensityParams, Mat2, Vec2};
use crate::error::{Error, Result};

/// `W(a) = |a|^p / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PLaplace<S> {
    pub p: S,
}

impl<S: Float> PLaplace<S> {
    pub fn new(p: S) -> Result<Self> {
        if !(p > S::one()) || !p.is_finite() {
            return Err(Error::InvalidDensity("p-Laplace needs 1 < p < infinity".into()));
        }
        Ok(Self { p })
    }
}

impl<S: Float + Send + Sync + std::fmt::Debug> Density<S> for PLaplace<S> {
    fn params(&self) -> DensityParams<S> {
        let p = self.p;
        let two = cast::<S>(2.0);
        let zero = S::zero();
        if p >= two {
            DensityParams::new(p, two, p - two, [p.recip(), p.recip(), p, zero, zero])
        } else {
            let pd = p / (p - S::one());
            DensityParams::new(p, pd, zero, [p.recip(), p.recip(), p, zero, zero])
        }
    }

    fn value(&self, a: Vec2<S>) -> S {
        norm(a).powf(self.p) / self.p
    }

    fn gradient(&self, a: Vec2<S>) -> Vec2<S> {
        let n = norm(a);
        if n == S::zero() {
            return [S::zero(); 2];
        }
        let w = n.powf(self.p - cast(2.0));
        [w * a[0], w * a[1]]
    }

    fn hessian(&self, a: Vec2<S>) -> Mat2<S> {
        let two = cast::<S>(2.0);
        let n = norm(a);
        if n == S::zero() {
            let d = if self.p == two { S::one() } else { S::zero() };
            return [[d, S::zero()], [S::zero(), d]];
        }
        let w = n.powf(self.p - two);
        let c = (self.p - two) * n.powf(self.p - cast(4.0));
        [
            [w + c * a[0] * a[0], c * a[0] * a[1]],
            [c * a[1] * a[0], w + c * a[1] * a[1]],
        ]
    }

    fn conjugate(&self, g: Vec2<S>) -> Result<S> {
        let pd = self.p / (self.p - S::one());
        Ok(norm(g).powf(pd) / pd)
    }
}
