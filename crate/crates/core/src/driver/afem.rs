use std::sync::Arc;
use std::time::Instant;

use super::benchmarks::Benchmark;
use super::marking::dorfler_mark;
use crate::error::{Error, Result};
use crate::estimate::{self, BoundReport, EstimateSettings};
use crate::femspaces::poly::dim_p;
use crate::hho::{DiscreteEnergy, GradientField, HhoFunction, HhoSpace, StressField};
use crate::mesh::{refine_nvb, uniform_refine, Mesh, RefinedMesh};
use crate::solve::{initial_guess, minimize, prolongate, SolveReport, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfemConfig {
    pub k: usize,
    /// Bulk parameter; `theta >= 1` refines uniformly.
    pub theta: f64,
    /// No level with more unknowns than this is solved.
    pub max_ndof: usize,
    pub max_levels: usize,
    pub solver: SolverConfig,
    pub poincare: Option<f64>,
    pub friedrichs: Option<f64>,
}

impl Default for AfemConfig {
    fn default() -> Self {
        Self {
            k: 0,
            theta: 0.5,
            max_ndof: 10_000,
            max_levels: 60,
            solver: SolverConfig::default(),
            poincare: None,
            friedrichs: None,
        }
    }
}

impl AfemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta = {} is not in (0, 1]", self.theta)));
        }
        if self.k > 4 {
            return Err(Error::Config(format!("k = {} is not in 0..=4", self.k)));
        }
        Ok(())
    }
}

/// One row of the convergence history.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub ndof: usize,
    pub eh: f64,
    pub estar: f64,
    pub leb: f64,
    pub rhs: f64,
    pub gap: f64,
    pub osc: f64,
    pub err_stress: Option<f64>,
    pub err_grad: Option<f64>,
    pub err_l2: Option<f64>,
    pub eta_sum: f64,
    pub iters: usize,
    pub seconds: f64,
}

/// Per-level diagnostics that are not part of the CSV history.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheck {
    pub solve: SolveReport,
    /// `||div sigma_h + Pi f_eff||_{L^{p'}}`.
    pub equilibrium: f64,
    pub max_jump: f64,
    pub load_norm: f64,
    pub n_triangles: usize,
}

/// Result of an adaptive run with the state on the last level.
#[derive(Debug, Clone)]
pub struct AfemRun {
    pub records: Vec<ConvergenceRecord>,
    pub checks: Vec<LevelCheck>,
    pub reports: Vec<BoundReport>,
    pub space: HhoSpace,
    pub u: HhoFunction,
    pub grad: GradientField,
    pub sigma: StressField,
}

fn predicted_ndof(mesh: &Mesh, k: usize) -> usize {
    mesh.n_triangles() * dim_p(k) + mesh.n_interior_sides() * (k + 1)
}

/// SOLVE, ESTIMATE, MARK and REFINE until the next mesh would exceed
/// `max_ndof` unknowns (the initial level is always solved).
pub fn run_afem(bench: &Benchmark, config: &AfemConfig) -> Result<AfemRun> {
    config.validate()?;
    let k = config.k;
    let problem = &bench.problem;
    let params = problem.density.params();
    let mut mesh = Arc::new(bench.mesh.clone());
    let mut previous: Option<(HhoSpace, HhoFunction, RefinedMesh)> = None;
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for level in 0..config.max_levels {
        let start = Instant::now();
        let space = HhoSpace::new(mesh.clone(), k)?;
        let init = match &previous {
            None => initial_guess(&space, problem),
            Some((coarse, u, refined)) => prolongate(coarse, &space, refined, u, problem),
        };
        let (u, solve) = minimize(&space, problem, init, &config.solver)?;
        let energy = DiscreteEnergy::new(&space, problem)?;
        let mut settings = EstimateSettings::defaults(&space, problem);
        settings.rhs_osc_power = (bench.rhs_osc_power)(k);
        if let Some(c) = config.poincare {
            settings.poincare = c;
        }
        if let Some(c) = config.friedrichs {
            settings.friedrichs = c;
        }
        let (sigma, grad, report) = estimate::estimate(&energy, &u, &settings)?;
        let (mut err_stress, mut err_grad, mut err_l2) = (None, None, None);
        if let Some(ex) = &bench.exact {
            err_stress = Some(estimate::stress_error(&space, &sigma, &*ex.stress, params.p_dual));
            err_grad = Some(estimate::grad_error(&space, &grad, &*ex.grad, params.p));
            err_l2 = Some(estimate::l2_error(&space, &u, &*ex.u));
        }
        let source = estimate::oscillation_source(problem);
        let load_norm = estimate::lebesgue_norm(&space, &*source, params.p_dual);
        records.push(ConvergenceRecord {
            level,
            ndof: space.ndof(),
            eh: report.energy,
            estar: report.dual,
            leb: report.leb,
            rhs: report.rhs,
            gap: report.gap,
            osc: report.osc,
            err_stress,
            err_grad,
            err_l2,
            eta_sum: report.eta_sum(),
            iters: solve.iterations,
            seconds: start.elapsed().as_secs_f64(),
        });
        checks.push(LevelCheck {
            solve,
            equilibrium: report.equilibrium,
            max_jump: report.max_jump,
            load_norm,
            n_triangles: space.mesh().n_triangles(),
        });
        let eta = report.eta.clone();
        reports.push(report);

        let refined = if config.theta >= 1.0 {
            uniform_refine(space.mesh())
        } else {
            let marked = dorfler_mark(&eta, config.theta);
            if marked.is_empty() {
                uniform_refine(space.mesh())
            } else {
                refine_nvb(space.mesh(), &marked)
            }
        };
        let done = !solve.converged
            || predicted_ndof(&refined.mesh, k) > config.max_ndof
            || level + 1 == config.max_levels;
        if done {
            return Ok(AfemRun { records, checks, reports, space, u, grad, sigma });
        }
        mesh = Arc::new(refined.mesh.clone());
        previous = Some((space, u, refined));
    }
    unreachable!("the loop returns on its last level")
}
