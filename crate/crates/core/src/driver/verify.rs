//! Self checks run by `hho verify`: cheap versions of the property suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::afem::{run_afem, AfemConfig};
use super::benchmarks::{benchmark, BenchmarkId};
use super::marking::dorfler_mark;
use crate::density::{Density, OptimalDesign, PLaplace, TwoWell};
use crate::error::Result;
use crate::femspaces::{l2_project_rt, rt_mass_matrix, TriangleRule};
use crate::hho::HhoSpace;
use crate::mesh::{domains, uniform_refine, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.to_owned(), passed, detail }
}

fn densities() -> Vec<(&'static str, Arc<dyn Density<f64>>, f64)> {
    let s13 = 13f64.sqrt();
    vec![
        ("plaplace p=2", Arc::new(PLaplace::new(2.0).expect("p > 1")), 1e-10),
        ("plaplace p=4", Arc::new(PLaplace::new(4.0).expect("p > 1")), 1e-10),
        ("optimal design", Arc::new(OptimalDesign::from_lambda(1.0, 2.0, 0.0084).expect("valid")), 1e-10),
        ("two-well", Arc::new(TwoWell::new([-3.0 / s13, -2.0 / s13], [3.0 / s13, 2.0 / s13]).expect("valid")), 1e-8),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    [r * phi.cos(), r * phi.sin()]
}

/// Fenchel identity, growth and convexity control at random points.
pub fn check_densities(samples: usize, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (name, w, tol) in densities() {
        let prm = w.params();
        let (mut fenchel, mut violations) = (0.0f64, 0usize);
        for _ in 0..samples {
            let a = random_point(&mut rng, 10.0);
            let b = random_point(&mut rng, 10.0);
            let (wa, wb) = (w.value(a), w.value(b));
            let da = w.gradient(a);
            let db = w.gradient(b);
            let adw = a[0] * da[0] + a[1] * da[1];
            match w.conjugate(da) {
                Ok(c) => fenchel = fenchel.max((wa + c - adw).abs() / (1.0 + adw.abs())),
                Err(_) => fenchel = f64::INFINITY,
            }
            let na = a[0].hypot(a[1]);
            let slack = 1e-9 * (1.0 + wa.abs());
            if prm.c1 * na.powf(prm.p) - prm.c4 > wa + slack || wa > prm.c2 * na.powf(prm.p) + prm.c5 + slack {
                violations += 1;
            }
            let bregman = wb - wa - (da[0] * (b[0] - a[0]) + da[1] * (b[1] - a[1]));
            let nb = b[0].hypot(b[1]);
            let lhs = (db[0] - da[0]).hypot(db[1] - da[1]).powf(prm.r);
            let rhs = prm.c3 * (1.0 + na.powf(prm.s) + nb.powf(prm.s)) * bregman;
            if bregman < -1e-9 * (1.0 + wb.abs()) || lhs > rhs + 1e-9 * (1.0 + lhs) {
                violations += 1;
            }
        }
        out.push(outcome(
            &format!("density {name}"),
            fenchel <= tol && violations == 0,
            format!("Fenchel defect {fenchel:.1e}, {violations} inequality violations in {samples} samples"),
        ));
    }
    out
}

/// Brute force over all subsets: the marked set must be a smallest set
/// satisfying the bulk criterion.
pub fn check_dorfler(cases: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..cases {
        let n = rng.random_range(1..=10);
        let eta: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random::<f64>() }).collect();
        let theta = rng.random_range(0.01..=1.0);
        let marked = dorfler_mark(&eta, theta);
        let total: f64 = eta.iter().sum();
        let goal = theta * total;
        let best = (0u32..1 << n)
            .filter(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| eta[i]).sum::<f64>() >= goal)
            .map(|m| m.count_ones() as usize)
            .min();
        let bulk = marked.iter().map(|&i| eta[i]).sum::<f64>() >= goal;
        let ok = if total == 0.0 { marked.is_empty() } else { bulk && Some(marked.len()) == best };
        failures += usize::from(!ok);
    }
    outcome("dorfler marking", failures == 0, format!("{failures} of {cases} cases differ from brute force"))
}

/// `max ||R I v - Pi grad v||_{L^2} / ||grad v||_{L^2}` for a smooth `v`.
pub fn commutativity_defect(mesh: &Mesh, k: usize, v: impl Fn([f64; 2]) -> f64 + Sync, grad: impl Fn([f64; 2]) -> [f64; 2]) -> Result<f64> {
    let space = HhoSpace::new(Arc::new(mesh.clone()), k)?;
    let rg = space.reconstruct_gradient(&space.interpolate(v));
    let rule = TriangleRule::new(20)?;
    let (mut defect, mut norm) = (0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let proj = l2_project_rt(&grad, &geom, &space.rt, &rule)?;
        let mass = rt_mass_matrix(&geom, &space.rt, &rule);
        let d = nalgebra::DVector::from_iterator(proj.len(), proj.iter().zip(rg.block(t)).map(|(a, b)| a - b));
        defect += (d.transpose() * &mass * &d)[0];
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            let g = grad(geom.to_physical(r));
            norm += w * geom.area * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    Ok(defect.max(0.0).sqrt() / norm.sqrt())
}

pub fn check_commutativity() -> Result<CheckOutcome> {
    let v = |x: [f64; 2]| (1.3 * x[0]).sin() * (0.7 * x[1]).exp();
    let dv = |x: [f64; 2]| [1.3 * (1.3 * x[0]).cos() * (0.7 * x[1]).exp(), 0.7 * (1.3 * x[0]).sin() * (0.7 * x[1]).exp()];
    let mut worst = 0.0f64;
    for mesh in [domains::unit_square(), domains::lshape()] {
        let mesh = uniform_refine(&mesh).mesh;
        for k in 0..=3 {
            worst = worst.max(commutativity_defect(&mesh, k, v, dv)?);
        }
    }
    Ok(outcome("gradient reconstruction commutes", worst <= 1e-11, format!("largest relative defect {worst:.1e}")))
}

/// A short uniform run of the smooth p-Laplace benchmark: stress
/// equilibrium, normal continuity and the lower bound.
pub fn check_small_run() -> Result<CheckOutcome> {
    let bench = benchmark(BenchmarkId::PLaplaceSquare);
    let exact = bench.reference_energy.expect("known energy");
    let config = AfemConfig { k: 1, theta: 1.0, max_ndof: 2000, ..Default::default() };
    let run = run_afem(&bench, &config)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for (r, c) in run.records.iter().zip(&run.checks) {
        let eq = c.equilibrium / (1.0 + c.load_norm);
        worst = worst.max(eq).max(c.max_jump);
        ok &= c.solve.converged && eq <= 1e-9 && c.max_jump <= 1e-9 && r.leb <= exact + 1e-8 && r.leb <= r.eh;
    }
    Ok(outcome(
        "small p-Laplace run",
        ok,
        format!("{} levels, largest equilibrium/jump residual {worst:.1e}", run.records.len()),
    ))
}

/// All checks in a fixed order.
pub fn verify_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = check_densities(2000, 1);
    out.push(check_dorfler(200, 2));
    out.push(check_commutativity()?);
    out.push(check_small_run()?);
    Ok(out)
}
