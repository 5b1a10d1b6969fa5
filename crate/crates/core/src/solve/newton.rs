use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::hho::{DiscreteEnergy, HhoFunction, HhoSpace, Problem};
use crate::sparse::SymmetricPattern;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when the largest gradient entry is below this.
    pub gradient_tol: f64,
    pub max_iter: usize,
    /// Give up after this many iterations without a new smallest gradient.
    pub max_stalls: usize,
    /// Slope evaluations per line search.
    pub line_search_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gradient_tol: 1e-12, max_iter: 500, max_stalls: 40, line_search_steps: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Starting point: boundary data on the boundary sides and the constant one
/// everywhere else.
pub fn initial_guess(space: &HhoSpace, problem: &Problem) -> HhoFunction {
    let mut v = space.interpolate(|_| 1.0);
    space.apply_boundary_data(&mut v, problem.dirichlet.as_deref().map(|f| f as _));
    v
}

/// Minimises `E_h` over the unknowns of `v` (boundary blocks stay fixed) by
/// Newton steps regularised in the Levenberg-Marquardt manner with the
/// reconstructed-gradient Gram matrix `sum_T R_T^t N_T R_T`.
///
/// Each step solves `(H + lambda K) d = -g`; `lambda` is lowered after good
/// steps, raised after poor ones and whenever the factorisation fails, so
/// degenerate densities with singular Hessians are handled.
pub fn minimize(
    space: &HhoSpace,
    problem: &Problem,
    mut v: HhoFunction,
    config: &SolverConfig,
) -> Result<(HhoFunction, SolveReport)> {
    let energy = DiscreteEnergy::new(space, problem)?;
    let nt = space.mesh().n_triangles();
    let pattern = SymmetricPattern::new(space.ndof(), (0..nt).map(|t| space.local_dofs(t)).collect())?;
    let gram: Vec<DMatrix<f64>> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let r = space.reconstruction(t);
            let mass = space
                .rt_mass_inverse(t)
                .clone()
                .try_inverse()
                .expect("inverse of an SPD matrix");
            r.transpose() * mass * r
        })
        .collect();
    let zero_diag = vec![0.0; space.ndof()];

    let mut x = space.to_dofs(&v);
    let mut models = energy.local_models(&v, true);
    let mut g = energy.scatter_gradient(&models);
    let mut lambda = 0.0;
    let mut report = SolveReport { iterations: 0, energy: 0.0, gradient_norm: inf_norm(&g), converged: false };
    let mut trial = v.clone();
    let mut best = f64::INFINITY;
    let mut stalls = 0;
    let slope_at = |t: f64, x: &[f64], d: &[f64], trial: &mut HhoFunction| {
        let xt: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
        space.set_dofs(trial, &xt);
        let gt = energy.gradient(trial);
        (dot(&gt, d), xt)
    };
    for it in 0..config.max_iter {
        report.iterations = it;
        report.gradient_norm = inf_norm(&g);
        if report.gradient_norm <= config.gradient_tol {
            report.converged = true;
            break;
        }
        if report.gradient_norm < best {
            best = report.gradient_norm;
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= config.max_stalls {
                break;
            }
        }
        let blocks: Vec<Vec<f64>> = models
            .iter()
            .zip(&gram)
            .map(|(m, k)| (&m.hessian + k * lambda).transpose().as_slice().to_vec())
            .collect();
        let a = pattern.assemble(&blocks, &zero_diag)?;
        let rhs: Vec<f64> = g.iter().map(|gi| -gi).collect();
        let d = match pattern.solve(&a, &rhs) {
            Ok(d) => d,
            Err(_) => {
                lambda = raise(lambda);
                continue;
            }
        };
        let s0 = dot(&g, &d);
        if !(s0 < 0.0) {
            lambda = raise(lambda);
            continue;
        }
        // The energy is convex, so its slope along d is nondecreasing in t;
        // the step is located from slopes alone, which stay accurate where
        // energy differences drown in rounding.
        let (s1, x1) = slope_at(1.0, &x, &d, &mut trial);
        let (t, xt) = if s1 <= 0.25 * s0.abs() {
            (1.0, x1)
        } else {
            // regula falsi (Illinois) for the zero of the slope in (0, 1)
            let (mut lo, mut slo) = (0.0, s0);
            let (mut hi, mut shi) = (1.0, s1);
            let mut best_pt = (0.0, x.clone());
            let mut side = 0;
            for _ in 0..config.line_search_steps {
                let t = (lo * shi - hi * slo) / (shi - slo);
                let (st, xt) = slope_at(t, &x, &d, &mut trial);
                if st <= 0.0 {
                    best_pt = (t, xt);
                    if st >= -0.1 * s0.abs() {
                        break;
                    }
                    lo = t;
                    slo = st;
                    if side == -1 {
                        shi *= 0.5;
                    }
                    side = -1;
                } else {
                    hi = t;
                    shi = st;
                    if side == 1 {
                        slo *= 0.5;
                    }
                    side = 1;
                }
            }
            best_pt
        };
        if t == 0.0 {
            lambda = raise(lambda);
            continue;
        }
        x = xt;
        space.set_dofs(&mut v, &x);
        models = energy.local_models(&v, true);
        g = energy.scatter_gradient(&models);
        if t == 1.0 {
            lambda /= 4.0;
            if lambda < 1e-10 {
                lambda = 0.0;
            }
        } else if t < 0.5 {
            lambda = raise(lambda);
        }
        report.iterations = it + 1;
    }
    report.energy = models.iter().map(|m| m.value).sum();
    report.gradient_norm = inf_norm(&g);
    Ok((v, report))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn raise(lambda: f64) -> f64 {
    if lambda == 0.0 {
        1e-6
    } else {
        lambda * 4.0
    }
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
