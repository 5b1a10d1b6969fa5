//! Convex energy densities `W: R^2 -> R` with growth and convexity-control
//! parameters, their derivatives and convex conjugates.
//!
//! The densities are generic over the scalar type; the finite element code
//! uses them with `f64`.

mod conjugate;
mod optimal_design;
mod plaplace;
mod two_well;

use num_traits::Float;

use crate::error::Result;

pub use conjugate::{conjugate_numeric, ConjugateSettings};
pub use optimal_design::OptimalDesign;
pub use plaplace::PLaplace;
pub use two_well::TwoWell;

pub type Vec2<S> = [S; 2];
pub type Mat2<S> = [[S; 2]; 2];

/// Parameters of the two-sided growth
/// `c1 |A|^p - c4 <= W(A) <= c2 |A|^p + c5`
/// and the convexity control
/// `|DW(A) - DW(B)|^r <= c3 (1 + |A|^s + |B|^s) (W(B) - W(A) - DW(A).(B - A))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams<S> {
    pub p: S,
    pub p_dual: S,
    pub r: S,
    pub s: S,
    pub t: S,
    pub c1: S,
    pub c2: S,
    pub c3: S,
    pub c4: S,
    pub c5: S,
}

impl<S: Float> DensityParams<S> {
    pub fn new(p: S, r: S, s: S, [c1, c2, c3, c4, c5]: [S; 5]) -> Self {
        Self {
            p,
            p_dual: p / (p - S::one()),
            r,
            s,
            t: S::one() + s / p,
            c1,
            c2,
            c3,
            c4,
            c5,
        }
    }

    /// Dual exponent `r' = r / (r - 1)`.
    pub fn r_dual(&self) -> S {
        self.r / (self.r - S::one())
    }
}

pub trait Density<S: Float>: Send + Sync + std::fmt::Debug {
    fn params(&self) -> DensityParams<S>;

    fn value(&self, a: Vec2<S>) -> S;

    fn gradient(&self, a: Vec2<S>) -> Vec2<S>;

    /// Second derivative where it exists; at kinks of the second derivative
    /// one of the one-sided limits.
    fn hessian(&self, a: Vec2<S>) -> Mat2<S>;

    /// The convex conjugate `W*(g) = sup_A (g.A - W(A))`.
    fn conjugate(&self, g: Vec2<S>) -> Result<S>;
}

pub(crate) fn cast<S: Float>(x: f64) -> S {
    S::from(x).expect("representable constant")
}

pub(crate) fn norm<S: Float>(a: Vec2<S>) -> S {
    a[0].hypot(a[1])
}

pub(crate) fn dot<S: Float>(a: Vec2<S>, b: Vec2<S>) -> S {
    a[0] * b[0] + a[1] * b[1]
}
