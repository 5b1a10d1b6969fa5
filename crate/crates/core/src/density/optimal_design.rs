use num_traits::Float;

use super::{cast, norm, Density, DensityParams, Mat2, Vec2};
use crate::error::{Error, Result};

/// Convexified two-material density `W(a) = psi(|a|)` of the optimal design
/// problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalDesign<S> {
    pub mu1: S,
    pub mu2: S,
    pub xi1: S,
    pub xi2: S,
}

impl<S: Float> OptimalDesign<S> {
    pub fn new(mu1: S, mu2: S, xi1: S, xi2: S) -> Result<Self> {
        let zero = S::zero();
        if !(zero < xi1 && xi1 < xi2 && zero < mu1 && mu1 < mu2) {
            return Err(Error::InvalidDensity(
                "optimal design needs 0 < xi1 < xi2 and 0 < mu1 < mu2".into(),
            ));
        }
        if (xi1 * mu2 - xi2 * mu1).abs() > cast(1e-12) {
            return Err(Error::InvalidDensity("optimal design needs xi1 mu2 = xi2 mu1".into()));
        }
        Ok(Self { mu1, mu2, xi1, xi2 })
    }

    /// Parameters from the Lagrange multiplier `lambda` of the volume
    /// constraint: `xi1 = sqrt(2 lambda mu1 / mu2)`, `xi2 = mu2 xi1 / mu1`.
    pub fn from_lambda(mu1: S, mu2: S, lambda: S) -> Result<Self> {
        let xi1 = (cast::<S>(2.0) * lambda * mu1 / mu2).sqrt();
        Self::new(mu1, mu2, xi1, mu2 * xi1 / mu1)
    }

    pub fn psi(&self, xi: S) -> S {
        let half = cast::<S>(0.5);
        if xi <= self.xi1 {
            half * self.mu2 * xi * xi
        } else if xi <= self.xi2 {
            self.xi1 * self.mu2 * (xi - half * self.xi1)
        } else {
            half * self.mu1 * xi * xi - self.xi1 * self.mu2 * half * (self.xi1 - self.xi2)
        }
    }

    pub fn psi_prime(&self, xi: S) -> S {
        if xi <= self.xi1 {
            self.mu2 * xi
        } else if xi <= self.xi2 {
            self.xi1 * self.mu2
        } else {
            self.mu1 * xi
        }
    }

    fn psi_second(&self, xi: S) -> S {
        if xi <= self.xi1 {
            self.mu2
        } else if xi <= self.xi2 {
            S::zero()
        } else {
            self.mu1
        }
    }

    /// Volume fraction of the weak material: `0` below `xi1`, a linear ramp
    /// on `[xi1, xi2]` and `1` above `xi2`.
    pub fn volume_fraction(&self, xi: S) -> S {
        if xi <= self.xi1 {
            S::zero()
        } else if xi >= self.xi2 {
            S::one()
        } else {
            (xi - self.xi1) / (self.xi2 - self.xi1)
        }
    }
}

impl<S: Float + Send + Sync + std::fmt::Debug> Density<S> for OptimalDesign<S> {
    fn params(&self) -> DensityParams<S> {
        let two = cast::<S>(2.0);
        let zero = S::zero();
        DensityParams::new(
            two,
            two,
            zero,
            [self.mu1 / two, self.mu2 / two, two * self.mu2, zero, zero],
        )
    }

    fn value(&self, a: Vec2<S>) -> S {
        self.psi(norm(a))
    }

    fn gradient(&self, a: Vec2<S>) -> Vec2<S> {
        let xi = norm(a);
        if xi <= self.xi1 {
            return [self.mu2 * a[0], self.mu2 * a[1]];
        }
        let w = self.psi_prime(xi) / xi;
        [w * a[0], w * a[1]]
    }

    fn hessian(&self, a: Vec2<S>) -> Mat2<S> {
        let xi = norm(a);
        if xi == S::zero() {
            return [[self.mu2, S::zero()], [S::zero(), self.mu2]];
        }
        let n = [a[0] / xi, a[1] / xi];
        let d2 = self.psi_second(xi);
        let d1 = self.psi_prime(xi) / xi;
        let mut h = [[S::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { S::one() } else { S::zero() };
                h[i][j] = d2 * n[i] * n[j] + d1 * (id - n[i] * n[j]);
            }
        }
        h
    }

    fn conjugate(&self, g: Vec2<S>) -> Result<S> {
        let tau = norm(g);
        let two = cast::<S>(2.0);
        if tau <= self.mu2 * self.xi1 {
            Ok(tau * tau / (two * self.mu2))
        } else {
            Ok(tau * tau / (two * self.mu1) + self.xi1 * self.mu2 * (self.xi1 - self.xi2) / two)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odp() -> OptimalDesign<f64> {
        OptimalDesign::from_lambda(1.0, 2.0, 0.0084).unwrap()
    }

    #[test]
    fn zero_and_table_row() {
        let w = odp();
        assert_eq!(w.value([0.0, 0.0]), 0.0);
        assert_eq!(w.gradient([0.0, 0.0]), [0.0, 0.0]);
        let p = w.params();
        assert_eq!((p.p, p.r, p.s, p.c1, p.c2, p.c3), (2.0, 2.0, 0.0, 0.5, 1.0, 4.0));
    }

    #[test]
    fn conjugate_is_continuous() {
        let w = odp();
        let tau = w.mu2 * w.xi1;
        let lo = tau * tau / (2.0 * w.mu2);
        let hi = tau * tau / (2.0 * w.mu1) + w.xi1 * w.mu2 * (w.xi1 - w.xi2) / 2.0;
        assert!((lo - hi).abs() < 1e-12);
        assert!((lo - w.mu2 * w.xi1 * w.xi1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn psi_is_continuous() {
        let w = odp();
        for x in [w.xi1, w.xi2] {
            let e = 1e-12;
            assert!((w.psi(x - e) - w.psi(x + e)).abs() < 1e-11);
            assert!((w.psi_prime(x - e) - w.psi_prime(x + e)).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(OptimalDesign::new(1.0, 2.0, 0.1, 0.3).is_err());
        assert!(OptimalDesign::new(2.0, 1.0, 0.1, 0.05).is_err());
        assert!(OptimalDesign::new(1.0, 2.0, 0.1, 0.2).is_ok());
    }

    #[test]
    fn volume_fraction_ramp() {
        let w = odp();
        assert_eq!(w.volume_fraction(0.0), 0.0);
        assert_eq!(w.volume_fraction(w.xi2), 1.0);
        assert!((w.volume_fraction(0.5 * (w.xi1 + w.xi2)) - 0.5).abs() < 1e-15);
    }
}
