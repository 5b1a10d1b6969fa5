//! Acceptance suite. Every test prints one PASS/FAIL line to the real
//! stderr (bypassing the test harness capture) and then asserts.
//!
//! Reference quantities are recomputed here from first principles where
//! possible: projections, equilibrium residuals, normal jumps, the exact
//! energy, slopes, finite differences and subset searches do not use the
//! library routines that produce the values under test.

use std::io::Write;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hho::density::{Density, OptimalDesign, PLaplace, TwoWell};
use hho::driver::{
    benchmark, dorfler_mark, exact_energy, run_afem, AfemConfig, AfemRun, Benchmark, BenchmarkId,
};
use hho::femspaces::{CellBasis, EdgeRule, RtBasis, TriangleGeometry, TriangleRule};
use hho::hho::{HhoSpace, Problem};
use hho::mesh::{domains, uniform_refine, Mesh};
use hho::solve::{initial_guess, minimize, SolverConfig};

fn report(id: usize, name: &str, passed: bool, detail: &str) {
    let line = format!("{} {id} {name}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn rt_mass(geom: &TriangleGeometry, rt: &RtBasis, rule: &TriangleRule) -> DMatrix<f64> {
    let n = rt.dim();
    let mut m = DMatrix::zeros(n, n);
    for (r, &w) in rule.reference_points().zip(&rule.weights) {
        let phi: Vec<[f64; 2]> = rt.values(r).into_iter().map(|v| geom.piola(v)).collect();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += w * geom.area * (phi[i][0] * phi[j][0] + phi[i][1] * phi[j][1]);
            }
        }
    }
    m
}

// ---------------------------------------------------------------------------
// 1. R I v is the L2 projection of grad v onto the piecewise RT space

#[test]
fn commutativity_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fields: Vec<[f64; 5]> = (0..5)
        .map(|_| {
            [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.0..3.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();
    let rule = TriangleRule::new(20).unwrap();
    let mut worst = 0.0f64;
    for coarse in [domains::unit_square(), domains::lshape()] {
        let mut mesh = coarse;
        for _level in 1..=3 {
            mesh = uniform_refine(&mesh).mesh;
            let mesh_arc = Arc::new(mesh.clone());
            for k in 0..=3 {
                let space = HhoSpace::new(mesh_arc.clone(), k).unwrap();
                for c in &fields {
                    let c = *c;
                    // v = sin(a.x + b) exp(e.x)
                    let v = move |x: [f64; 2]| (c[0] * x[0] + c[1] * x[1] + c[2]).sin() * (c[3] * x[0] + c[4] * x[1]).exp();
                    let dv = move |x: [f64; 2]| {
                        let arg = c[0] * x[0] + c[1] * x[1] + c[2];
                        let e = (c[3] * x[0] + c[4] * x[1]).exp();
                        let (s, co) = arg.sin_cos();
                        [e * (c[0] * co + c[3] * s), e * (c[1] * co + c[4] * s)]
                    };
                    let rg = space.reconstruct_gradient(&space.interpolate(v));
                    let (mut defect, mut norm) = (0.0, 0.0);
                    for t in 0..mesh.n_triangles() {
                        let geom = mesh.geometry(t);
                        let m = rt_mass(&geom, &space.rt, &rule);
                        let mut b = DVector::zeros(space.rt.dim());
                        for (r, &w) in rule.reference_points().zip(&rule.weights) {
                            let g = dv(geom.to_physical(r));
                            norm += w * geom.area * (g[0] * g[0] + g[1] * g[1]);
                            for (i, phi) in space.rt.values(r).into_iter().enumerate() {
                                let phi = geom.piola(phi);
                                b[i] += w * geom.area * (g[0] * phi[0] + g[1] * phi[1]);
                            }
                        }
                        let proj = m.clone().cholesky().unwrap().solve(&b);
                        let d = proj - DVector::from_column_slice(rg.block(t));
                        defect += (d.transpose() * &m * &d)[0];
                    }
                    worst = worst.max(defect.max(0.0).sqrt() / norm.sqrt());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = worst <= 1e-11 && secs < 30.0;
    report(1, "commutativity", passed, &format!("max relative defect {worst:.2e} (tol 1e-11), {secs:.1}s (limit 30s)"));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// shared benchmark runs: every benchmark, k = 0, 1, 2, uniform and theta = 0.5

struct Sweep {
    bench: Benchmark,
    k: usize,
    theta: f64,
    run: AfemRun,
    seconds: f64,
}

const MAX_NDOF: usize = 30_000;

fn sweeps() -> &'static Vec<Sweep> {
    static RUNS: OnceLock<Vec<Sweep>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut jobs = Vec::new();
        for id in BenchmarkId::ALL {
            for k in 0..=2 {
                for theta in [1.0, 0.5] {
                    jobs.push((id, k, theta));
                }
            }
        }
        jobs.into_par_iter()
            .map(|(id, k, theta)| {
                let bench = benchmark(id);
                let config = AfemConfig { k, theta, max_ndof: MAX_NDOF, ..Default::default() };
                let start = Instant::now();
                let run = run_afem(&bench, &config).unwrap();
                Sweep { bench, k, theta, run, seconds: start.elapsed().as_secs_f64() }
            })
            .collect()
    })
}

fn lp_norm(mesh: &Mesh, f: &dyn Fn([f64; 2]) -> f64, q: f64) -> f64 {
    let rule = TriangleRule::new(20).unwrap();
    let mut sum = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            sum += w * geom.area * f(geom.to_physical(r)).abs().powf(q);
        }
    }
    sum.powf(1.0 / q)
}

/// `||div sigma_h + Pi_k f_eff||_{L^q}` on the final level, from cellwise
/// moments against `P_k`.
fn equilibrium_oracle(problem: &Problem, run: &AfemRun, q: f64) -> f64 {
    let space = &run.space;
    let mesh = space.mesh();
    let k = space.degree();
    let basis = CellBasis::new(k);
    let rule = TriangleRule::new(20).unwrap();
    let mut sum = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        let n = basis.dim();
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        let ut = run.u.cell(t);
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            let x = geom.to_physical(r);
            let phi = basis.values(r);
            let div: f64 = run.sigma.block(t).iter().zip(space.rt.divergences(r)).map(|(c, d)| c * d).sum::<f64>() / geom.det;
            let mut load = (problem.f)(x);
            if let Some(lo) = &problem.lower_order {
                let uh: f64 = ut.iter().zip(&phi).map(|(a, b)| a * b).sum();
                load += 2.0 * lo.alpha * ((lo.g)(x) - uh);
            }
            for i in 0..n {
                b[i] += w * geom.area * (div + load) * phi[i];
                for j in 0..n {
                    m[(i, j)] += w * geom.area * phi[i] * phi[j];
                }
            }
        }
        let coef = m.cholesky().unwrap().solve(&b);
        for (r, &w) in rule.reference_points().zip(&rule.weights) {
            let val: f64 = coef.iter().zip(basis.values(r)).map(|(a, b)| a * b).sum();
            sum += w * geom.area * val.abs().powf(q);
        }
    }
    sum.powf(1.0 / q)
}

/// Largest `|F|^{-1/2} ||[sigma_h . nu]||_{L^2(F)}` over interior sides of the
/// final level, evaluating sigma_h from both sides at physical points.
fn jump_oracle(run: &AfemRun) -> f64 {
    let space = &run.space;
    let mesh = space.mesh();
    let rule = EdgeRule::new(12).unwrap();
    let wsum: f64 = rule.weights.iter().sum();
    let mut worst = 0.0f64;
    for side in mesh.sides() {
        let Some((tm, _)) = side.minus else { continue };
        let (tp, _) = side.plus;
        let a = mesh.vertices()[side.vertices[0]];
        let b = mesh.vertices()[side.vertices[1]];
        let (gp, gm) = (mesh.geometry(tp), mesh.geometry(tm));
        let mut sum = 0.0;
        for (&s, &w) in rule.points.iter().zip(&rule.weights) {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let sp = run.sigma.eval(tp, &gp, &space.rt, gp.to_reference(x));
            let sm = run.sigma.eval(tm, &gm, &space.rt, gm.to_reference(x));
            let j = (sp[0] - sm[0]) * side.normal[0] + (sp[1] - sm[1]) * side.normal[1];
            sum += w / wsum * j * j;
        }
        worst = worst.max(sum.sqrt());
    }
    worst
}

// ---------------------------------------------------------------------------
// 2. the discrete stress is H(div) conforming and in equilibrium

#[test]
fn stress_equilibrium_and_conformity() {
    let runs = sweeps();
    let tol = 1e-9;
    let mut worst_eq = 0.0f64;
    let mut worst_jump = 0.0f64;
    let mut levels = 0;
    let mut failures = Vec::new();
    for s in runs {
        let problem = &s.bench.problem;
        let q = problem.density.params().p_dual;
        let f_norm = lp_norm(&s.bench.mesh, &*problem.f, q);
        for (r, c) in s.run.records.iter().zip(&s.run.checks) {
            levels += 1;
            let eq = c.equilibrium / (1.0 + f_norm);
            worst_eq = worst_eq.max(eq);
            worst_jump = worst_jump.max(c.max_jump);
            if eq > tol || c.max_jump > tol || !c.solve.converged {
                failures.push(format!("{} k={} theta={} level {}", s.bench.id, s.k, s.theta, r.level));
            }
        }
        // independent recomputation on the final level
        let eq = equilibrium_oracle(problem, &s.run, q) / (1.0 + f_norm);
        let jump = jump_oracle(&s.run);
        worst_eq = worst_eq.max(eq);
        worst_jump = worst_jump.max(jump);
        if eq > tol || jump > tol {
            failures.push(format!("{} k={} theta={} final level (oracle)", s.bench.id, s.k, s.theta));
        }
    }
    let passed = failures.is_empty();
    report(
        2,
        "stress equilibrium and normal continuity",
        passed,
        &format!(
            "{} runs, {levels} levels: max equilibrium {worst_eq:.2e}, max jump {worst_jump:.2e} (tol 1e-9){}",
            runs.len(),
            if passed { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    );
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 3. guaranteed lower energy bound

/// `E(u) = -3/4 int |grad u|^4` for `u = xy(x-1)(y-1)`, by tensor Gauss rules.
fn plaplace_square_energy() -> f64 {
    // 8-point Gauss-Legendre on [0,1] from Newton iterations on P_8
    let n = 8;
    let mut nodes = Vec::new();
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push((0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    let mut integral = 0.0;
    for &(x, wx) in &nodes {
        for &(y, wy) in &nodes {
            let gx = y * (y - 1.0) * (2.0 * x - 1.0);
            let gy = x * (x - 1.0) * (2.0 * y - 1.0);
            integral += wx * wy * (gx * gx + gy * gy).powi(2);
        }
    }
    -0.75 * integral
}

#[test]
fn guaranteed_lower_energy_bound() {
    let runs = sweeps();
    let exact = plaplace_square_energy();
    let mut lines = Vec::new();
    let mut passed = (exact + 1.0 / 1960.0).abs() < 1e-15;
    lines.push(format!("E(plaplace-square) = {exact:.12e}"));
    let mut seconds = 0.0;
    for (id, reference, tol) in [
        (BenchmarkId::PLaplaceSquare, exact, 1e-8),
        (BenchmarkId::OdpSquare, -0.011181337, 1e-5),
        (BenchmarkId::OdpLShape, -0.074551285, 1e-5),
        (BenchmarkId::PLaplaceLShape, -0.34333387, 1e-5),
    ] {
        let mut worst = f64::NEG_INFINITY;
        for s in runs.iter().filter(|s| s.bench.id == id) {
            seconds += s.seconds;
            for r in &s.run.records {
                worst = worst.max(r.leb - reference);
            }
        }
        passed &= worst <= tol;
        lines.push(format!("{id}: max(LEB - E) = {worst:.2e} (tol {tol:.0e})"));
    }
    // two-well: only the configured exact solution is available
    let tw = runs.iter().find(|s| s.bench.id == BenchmarkId::TwoWell).unwrap();
    let e_tw = exact_energy(&tw.bench, 4).unwrap();
    let worst_tw = runs
        .iter()
        .filter(|s| s.bench.id == BenchmarkId::TwoWell)
        .flat_map(|s| s.run.records.iter().map(|r| r.leb - e_tw))
        .fold(f64::NEG_INFINITY, f64::max);
    lines.push(format!("twowell (informative): max(LEB - E) = {worst_tw:.2e}"));
    passed &= seconds <= 600.0;
    lines.push(format!("{seconds:.0}s of runs (limit 600s)"));
    report(3, "lower energy bound", passed, &lines.join("; "));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 4. convergence rates on uniform meshes

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn convergence_rates() {
    let runs = sweeps();
    let exact = plaplace_square_energy();
    let mut passed = true;
    let mut lines = Vec::new();
    for k in 0..=2 {
        let s = runs
            .iter()
            .find(|s| s.bench.id == BenchmarkId::PLaplaceSquare && s.k == k && s.theta == 1.0)
            .unwrap();
        let recs = &s.run.records;
        let tail = &recs[recs.len() - 3..];
        let stress: Vec<(f64, f64)> = tail.iter().map(|r| (r.ndof as f64, r.err_stress.unwrap().powi(2))).collect();
        let gap: Vec<(f64, f64)> = tail.iter().map(|r| (r.ndof as f64, r.gap)).collect();
        let leb: Vec<(f64, f64)> = tail.iter().map(|r| (r.ndof as f64, exact - r.leb)).collect();
        let (a, b, c) = (slope(&stress), slope(&gap), slope(&leb));
        let target = -(k as f64 + 1.0);
        let ok = (a - target).abs() <= 0.35 && (b - target).abs() <= 0.35 && c <= -(k as f64 / 2.0 + 1.0) + 0.35;
        passed &= ok;
        lines.push(format!(
            "k={k} ndof {}..{}: stress^2 {a:.2}, gap {b:.2} (target {target}), E-LEB {c:.2} (<= {:.2})",
            tail[0].ndof,
            tail[2].ndof,
            -(k as f64 / 2.0 + 1.0) + 0.35
        ));
    }
    report(4, "convergence rates", passed, &lines.join("; "));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 5. density properties with the tabulated constants

#[test]
fn density_properties() {
    let start = Instant::now();
    let s13: f64 = 13f64.sqrt();
    let two_well = TwoWell::new([-3.0 / s13, -2.0 / s13], [3.0 / s13, 2.0 / s13]).unwrap();
    let (mu1, mu2, lambda): (f64, f64, f64) = (1.0, 2.0, 0.0084);
    let odp = OptimalDesign::from_lambda(mu1, mu2, lambda).unwrap();
    let xi1 = (2.0 * lambda * mu1 / mu2).sqrt();
    let xi2 = mu2 * xi1 / mu1;
    let kappa = 8.0f64;
    // (name, density, p, r, s, c1, c2, c3, c4, c5, Fenchel tolerance, kinks in |A|)
    type Row = (&'static str, Box<dyn Density<f64>>, [f64; 8], f64, Vec<f64>);
    let rows: Vec<Row> = vec![
        ("plaplace p=4", Box::new(PLaplace::new(4.0).unwrap()), [4.0, 2.0, 2.0, 0.25, 0.25, 4.0, 0.0, 0.0], 1e-10, vec![]),
        ("plaplace p=2", Box::new(PLaplace::new(2.0).unwrap()), [2.0, 2.0, 0.0, 0.5, 0.5, 2.0, 0.0, 0.0], 1e-10, vec![]),
        (
            "optimal design",
            Box::new(odp),
            // the lower growth bound holds with c4 = mu2 xi1 (xi2 - xi1) / 2
            [2.0, 2.0, 0.0, mu1 / 2.0, mu2 / 2.0, 2.0 * mu2, mu2 * xi1 * (xi2 - xi1) / 2.0, 0.0],
            1e-10,
            vec![xi1, xi2],
        ),
        (
            "two-well",
            Box::new(two_well),
            // |F1| = |F2| = 1, so kappa = 8
            [4.0, 2.0, 2.0, 0.125, 8.0, two_well.params().c3, kappa, kappa],
            1e-8,
            vec![],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut passed = true;
    let mut lines = Vec::new();
    for (name, w, [p, r, s, c1, c2, c3, c4, c5], fenchel_tol, kinks) in rows {
        let (mut growth, mut control, mut monotone) = (0usize, 0usize, 0usize);
        let mut fenchel = 0.0f64;
        let mut fd = 0.0f64;
        let mut young = 0usize;
        let random_point = |rng: &mut ChaCha8Rng| loop {
            let a: [f64; 2] = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
            if a[0].hypot(a[1]) <= 10.0 {
                return a;
            }
        };
        for i in 0..10_000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let (wa, wb) = (w.value(a), w.value(b));
            let (da, db) = (w.gradient(a), w.gradient(b));
            let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
            let eps = 1e-10 * (1.0 + wa.abs() + wb.abs());
            if c1 * na.powf(p) - c4 > wa + eps || wa > c2 * na.powf(p) + c5 + eps {
                growth += 1;
            }
            let bregman = wb - wa - (da[0] * (b[0] - a[0]) + da[1] * (b[1] - a[1]));
            let lhs = (db[0] - da[0]).hypot(db[1] - da[1]).powf(r);
            if bregman < -eps || lhs > c3 * (1.0 + na.powf(s) + nb.powf(s)) * bregman + eps {
                control += 1;
            }
            if (da[0] - db[0]) * (a[0] - b[0]) + (da[1] - db[1]) * (a[1] - b[1]) < -eps {
                monotone += 1;
            }
            if i < 2000 {
                let adw = a[0] * da[0] + a[1] * da[1];
                let ws = w.conjugate(da).unwrap();
                fenchel = fenchel.max((wa + ws - adw).abs() / (1.0 + adw.abs()));
                // Fenchel-Young at an unrelated pair
                let wsb = w.conjugate(db).unwrap();
                if a[0] * db[0] + a[1] * db[1] > wa + wsb + 1e-8 * (1.0 + wa.abs() + wsb.abs()) {
                    young += 1;
                }
            }
            if i < 1000 && kinks.iter().all(|&kk| (na - kk).abs() > 1e-3) && na > 1e-3 {
                let h = 1e-5;
                let num = [
                    (w.value([a[0] + h, a[1]]) - w.value([a[0] - h, a[1]])) / (2.0 * h),
                    (w.value([a[0], a[1] + h]) - w.value([a[0], a[1] - h])) / (2.0 * h),
                ];
                let err = (num[0] - da[0]).hypot(num[1] - da[1]) / da[0].hypot(da[1]).max(1e-300);
                fd = fd.max(err);
            }
        }
        let ok = growth == 0 && control == 0 && monotone == 0 && young == 0 && fenchel <= fenchel_tol && fd <= 1e-6;
        passed &= ok;
        lines.push(format!(
            "{name}: violations growth {growth}, control {control}, monotone {monotone}, Young {young}; Fenchel {fenchel:.1e}; FD {fd:.1e}"
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs < 60.0;
    lines.push(format!("{secs:.1}s (limit 60s)"));
    report(5, "density properties", passed, &lines.join("; "));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 6. quadratic density: the Newton solver reproduces a dense linear solve

#[test]
fn quadratic_solver_matches_dense_solve() {
    let base = [
        domains::unit_square_two_triangles(),
        domains::unit_square(),
        uniform_refine(&domains::unit_square_two_triangles()).mesh,
    ];
    let f = |x: [f64; 2]| 1.0 + 2.0 * x[0] - x[1] * x[1] + x[0] * x[1] * x[1];
    let ud = |x: [f64; 2]| 0.5 * x[0] - x[1] + x[0] * x[1];
    let rule = TriangleRule::new(20).unwrap();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mesh in base {
        assert!(mesh.n_triangles() <= 8);
        let mesh = Arc::new(mesh);
        for k in 0..=3 {
            for with_data in [false, true] {
                let space = HhoSpace::new(mesh.clone(), k).unwrap();
                let mut problem = Problem::new(Arc::new(PLaplace::new(2.0).unwrap()), Arc::new(f));
                if with_data {
                    problem = problem.with_dirichlet(Arc::new(ud));
                }
                let init = initial_guess(&space, &problem);
                let config = SolverConfig { gradient_tol: 1e-13, ..Default::default() };
                let (u, rep) = minimize(&space, &problem, init.clone(), &config).unwrap();
                assert!(rep.converged, "{rep:?}");

                // dense system sum_T R^t M R x = b with boundary data moved right
                let n = space.ndof();
                let mut a = DMatrix::<f64>::zeros(n, n);
                let mut b = DVector::<f64>::zeros(n);
                let basis = CellBasis::new(k);
                for t in 0..mesh.n_triangles() {
                    let geom = mesh.geometry(t);
                    let rt = space.reconstruction(t);
                    let local = rt.transpose() * rt_mass(&geom, &space.rt, &rule) * rt;
                    let dofs = space.local_dofs(t);
                    let fixed = space.gather(t, &init);
                    for (r, &w) in rule.reference_points().zip(&rule.weights) {
                        let fx = f(geom.to_physical(r));
                        for (i, phi) in basis.values(r).into_iter().enumerate() {
                            b[dofs[i].unwrap()] += w * geom.area * fx * phi;
                        }
                    }
                    for (i, gi) in dofs.iter().enumerate() {
                        let Some(gi) = *gi else { continue };
                        for (j, gj) in dofs.iter().enumerate() {
                            match gj {
                                Some(gj) => a[(gi, *gj)] += local[(i, j)],
                                None => b[gi] -= local[(i, j)] * fixed[j],
                            }
                        }
                    }
                }
                let x = a.lu().solve(&b).unwrap();
                let xs = space.to_dofs(&u);
                let scale = x.amax().max(1.0);
                for (p, q) in xs.iter().zip(x.iter()) {
                    worst = worst.max((p - q).abs() / scale);
                }
                cases += 1;
            }
        }
    }
    let passed = worst <= 1e-10;
    report(6, "quadratic solver oracle", passed, &format!("{cases} cases, max coefficient difference {worst:.2e} (tol 1e-10)"));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 7. Dorfler marking against exhaustive search

#[test]
fn dorfler_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let eta: Vec<f64> = (0..n)
            .map(|_| match rng.random_range(0..10) {
                0 => 0.0,
                1 => 0.5,
                _ => rng.random::<f64>(),
            })
            .collect();
        let theta: f64 = rng.random_range(0.0..1.0f64).max(1e-3);
        let theta = if rng.random_bool(0.1) { 1.0 } else { theta };
        let marked = dorfler_mark(&eta, theta);
        let total: f64 = eta.iter().sum();
        // sums in different orders differ by rounding
        let goal = theta * total - 1e-12 * total;
        let mut best = usize::MAX;
        for mask in 0u32..(1 << n) {
            let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| eta[i]).sum();
            if sum >= goal {
                best = best.min(mask.count_ones() as usize);
            }
        }
        let sum: f64 = marked.iter().map(|&i| eta[i]).sum();
        let mut unique = marked.clone();
        unique.sort_unstable();
        unique.dedup();
        let ok = if total == 0.0 {
            marked.is_empty()
        } else {
            sum >= goal && marked.len() == best && unique.len() == marked.len()
        };
        failures += usize::from(!ok);
    }
    let passed = failures == 0;
    report(7, "dorfler brute force", passed, &format!("{failures} of 200 cases differ"));
    assert!(passed);
}

// ---------------------------------------------------------------------------
// 8. optimal design: a transition layer between the two materials

#[test]
fn optimal_design_microstructure() {
    let bench = benchmark(BenchmarkId::OdpSquare);
    let config = AfemConfig { k: 0, theta: 0.5, max_ndof: 10_000, ..Default::default() };
    let run = run_afem(&bench, &config).unwrap();
    let (mu1, mu2, lambda): (f64, f64, f64) = (1.0, 2.0, 0.0084);
    let xi1 = (2.0 * lambda * mu1 / mu2).sqrt();
    let xi2 = mu2 * xi1 / mu1;
    let fraction = |xi: f64| ((xi - xi1) / (xi2 - xi1)).clamp(0.0, 1.0);
    let space = &run.space;
    let mesh = space.mesh();
    let rule = TriangleRule::new(4).unwrap();
    let lambdas: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| {
            let geom = mesh.geometry(t);
            let mut mean = [0.0f64; 2];
            for (r, &w) in rule.reference_points().zip(&rule.weights) {
                let g = run.grad.eval(t, &geom, &space.rt, r);
                mean[0] += w * g[0];
                mean[1] += w * g[1];
            }
            let wsum: f64 = rule.weights.iter().sum();
            fraction(mean[0].hypot(mean[1]) / wsum)
        })
        .collect();
    let zero = lambdas.iter().filter(|&&l| l == 0.0).count();
    let one = lambdas.iter().filter(|&&l| l == 1.0).count();
    let mixed = lambdas.len() - zero - one;
    let centre = mesh.locate([0.5 + 1e-9, 0.5 + 2e-9]).unwrap();
    let boundary: Vec<usize> = mesh
        .sides()
        .iter()
        .filter(|s| s.minus.is_none())
        .map(|s| s.plus.0)
        .collect();
    let boundary_mixed = boundary.iter().filter(|&&t| lambdas[t] > 0.0 && lambdas[t] < 1.0).count();
    let ndof = run.records.last().unwrap().ndof;
    let passed = zero > 0 && one > 0 && mixed > 0 && lambdas[centre] == 0.0 && boundary_mixed < boundary.len();
    report(
        8,
        "optimal design volume fraction",
        passed,
        &format!(
            "ndof {ndof}: {zero} cells with fraction 0, {one} with 1, {mixed} in between; centre fraction {}; {boundary_mixed} of {} boundary cells mixed",
            lambdas[centre],
            boundary.len()
        ),
    );
    assert!(passed);
}
