use num_traits::Float;

use super::{cast, dot, norm, Density, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateSettings<S> {
    /// Stop when `|DW(A) - g| <= tol * max(1, |g|)`.
    pub tol: S,
    pub max_iter: usize,
}

impl<S: Float> Default for ConjugateSettings<S> {
    fn default() -> Self {
        Self { tol: cast(1e-12), max_iter: 200 }
    }
}

/// Evaluates `W*(g) = sup_A (g.A - W(A))` by damped Newton iterations on
/// `A -> W(A) - g.A` from each start; the best value over all converged
/// starts is returned.
pub fn conjugate_numeric<S, D>(
    density: &D,
    g: Vec2<S>,
    settings: &ConjugateSettings<S>,
    starts: &[Vec2<S>],
) -> Result<S>
where
    S: Float,
    D: Density<S> + ?Sized,
{
    let tol = settings.tol * S::one().max(norm(g));
    let objective = |a: Vec2<S>| density.value(a) - dot(g, a);
    let mut best: Option<S> = None;
    let mut best_unconverged = (S::neg_infinity(), S::infinity());
    for &start in starts {
        let mut a = start;
        let mut fa = objective(a);
        let mut converged = false;
        let mut res = S::infinity();
        let mut shift = S::zero();
        let mut stall = 0;
        for _ in 0..settings.max_iter {
            let dw = density.gradient(a);
            let r = [dw[0] - g[0], dw[1] - g[1]];
            let prev = res;
            res = norm(r);
            if res <= tol {
                converged = true;
                break;
            }
            let near = res <= tol * cast(1e4);
            stall = if near && res >= cast::<S>(0.5) * prev { stall + 1 } else { 0 };
            if stall >= 5 {
                // residual stuck at the rounding level
                converged = true;
                break;
            }
            let h = density.hessian(a);
            let scale = S::one().max(h[0][0].abs() + h[1][1].abs());
            let mut accepted = false;
            for _ in 0..60 {
                let m00 = h[0][0] + shift * scale;
                let m11 = h[1][1] + shift * scale;
                let det = m00 * m11 - h[0][1] * h[1][0];
                let mut d = if det > S::epsilon() * scale * scale {
                    [
                        -(m11 * r[0] - h[0][1] * r[1]) / det,
                        -(-h[1][0] * r[0] + m00 * r[1]) / det,
                    ]
                } else {
                    [-r[0] / scale, -r[1] / scale]
                };
                if dot(d, r) >= S::zero() {
                    d = [-r[0] / scale, -r[1] / scale];
                }
                let slope = dot(d, r);
                if -slope <= cast::<S>(1e-14) * (S::one() + fa.abs()) {
                    // the objective cannot resolve the decrease: take the full step
                    a = [a[0] + d[0], a[1] + d[1]];
                    fa = objective(a);
                    accepted = true;
                    break;
                }
                // Armijo backtracking
                let mut t = S::one();
                while t > cast(1e-12) {
                    let trial = [a[0] + t * d[0], a[1] + t * d[1]];
                    let ft = objective(trial);
                    if ft <= fa + cast::<S>(1e-4) * t * slope {
                        a = trial;
                        fa = ft;
                        accepted = true;
                        break;
                    }
                    t = t * cast(0.5);
                }
                if accepted {
                    shift = shift * cast(0.1);
                    if shift < cast(1e-14) {
                        shift = S::zero();
                    }
                    break;
                }
                shift = if shift == S::zero() { cast(1e-8) } else { shift * cast(10.0) };
            }
            if !accepted {
                // no representable decrease left; accept if the residual is tiny
                converged = res <= tol * cast(1e4);
                break;
            }
        }
        let value = -fa;
        if converged {
            best = Some(best.map_or(value, |b| b.max(value)));
        } else if value > best_unconverged.0 {
            best_unconverged = (value, res);
        }
    }
    best.ok_or_else(|| Error::ConjugateNotConverged {
        best: best_unconverged.0.to_f64().unwrap_or(f64::NAN),
        residual: best_unconverged.1.to_f64().unwrap_or(f64::NAN),
    })
}
