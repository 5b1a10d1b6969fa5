use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::density::{OptimalDesign, PLaplace, TwoWell};
use crate::error::{Error, Result};
use crate::hho::{Problem, ScalarField, VectorField};
use crate::mesh::{domains, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkId {
    PLaplaceSquare,
    PLaplaceLShape,
    OdpSquare,
    OdpLShape,
    TwoWell,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 5] = [
        BenchmarkId::PLaplaceSquare,
        BenchmarkId::PLaplaceLShape,
        BenchmarkId::OdpSquare,
        BenchmarkId::OdpLShape,
        BenchmarkId::TwoWell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::PLaplaceSquare => "plaplace-square",
            BenchmarkId::PLaplaceLShape => "plaplace-lshape",
            BenchmarkId::OdpSquare => "odp-square",
            BenchmarkId::OdpLShape => "odp-lshape",
            BenchmarkId::TwoWell => "twowell",
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = BenchmarkId::ALL.iter().map(|b| b.name()).collect();
                Error::Config(format!("unknown problem '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// Exact solution data for error diagnostics.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarField,
    pub grad: VectorField,
    pub stress: VectorField,
}

/// A fully specified benchmark.
#[derive(Clone)]
pub struct Benchmark {
    pub id: BenchmarkId,
    pub problem: Problem,
    pub mesh: Mesh,
    pub exact: Option<ExactSolution>,
    /// `min E(V)`: exact where the solution is known, otherwise an
    /// extrapolated reference.
    pub reference_energy: Option<f64>,
    /// Set for the optimal design benchmarks.
    pub optimal_design: Option<OptimalDesign<f64>>,
    /// Power of `h_T` in the oscillation term of RHS as a function of `k`.
    pub rhs_osc_power: fn(usize) -> f64,
}

impl fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Benchmark")
            .field("id", &self.id)
            .field("problem", &self.problem)
            .field("triangles", &self.mesh.n_triangles())
            .field("reference_energy", &self.reference_energy)
            .finish()
    }
}

/// Reference energy of the 4-Laplacian on the unit square, `-1/1960`.
pub const PLAPLACE_SQUARE_ENERGY: f64 = -1.0 / 1960.0;
/// Extrapolated reference for the 4-Laplacian with `f = 1` on the L-shape.
pub const PLAPLACE_LSHAPE_ENERGY: f64 = -0.34333387;
/// Extrapolated reference for the optimal design problem on the square.
pub const ODP_SQUARE_ENERGY: f64 = -0.011181337;
/// Extrapolated reference for the optimal design problem on the L-shape.
pub const ODP_LSHAPE_ENERGY: f64 = -0.074551285;

pub const ODP_SQUARE_LAMBDA: f64 = 0.0084;
pub const ODP_LSHAPE_LAMBDA: f64 = 0.0145;

/// Weight `alpha` of `alpha ||g - u_T||^2` in the two-well benchmark.
pub const TWOWELL_ALPHA: f64 = 0.5;

fn one() -> ScalarField {
    Arc::new(|_| 1.0)
}

/// `u = x y (x - 1)(y - 1)` with `f = -div(|grad u|^2 grad u)`.
fn plaplace_square() -> Benchmark {
    let grad = |x: [f64; 2]| {
        let [a, b] = x;
        [b * (b - 1.0) * (2.0 * a - 1.0), a * (a - 1.0) * (2.0 * b - 1.0)]
    };
    let f = move |x: [f64; 2]| {
        let [a, b] = x;
        let g = grad(x);
        let hxx = 2.0 * b * (b - 1.0);
        let hyy = 2.0 * a * (a - 1.0);
        let hxy = (2.0 * a - 1.0) * (2.0 * b - 1.0);
        let s = g[0] * g[0] + g[1] * g[1];
        let ghg = g[0] * (hxx * g[0] + hxy * g[1]) + g[1] * (hxy * g[0] + hyy * g[1]);
        -(2.0 * ghg + s * (hxx + hyy))
    };
    let stress = move |x: [f64; 2]| {
        let g = grad(x);
        let s = g[0] * g[0] + g[1] * g[1];
        [s * g[0], s * g[1]]
    };
    Benchmark {
        id: BenchmarkId::PLaplaceSquare,
        problem: Problem::new(Arc::new(PLaplace::new(4.0).expect("p > 1")), Arc::new(f)),
        mesh: domains::unit_square(),
        exact: Some(ExactSolution {
            u: Arc::new(|x| x[0] * x[1] * (x[0] - 1.0) * (x[1] - 1.0)),
            grad: Arc::new(grad),
            stress: Arc::new(stress),
        }),
        reference_energy: Some(PLAPLACE_SQUARE_ENERGY),
        optimal_design: None,
        rhs_osc_power: |k| k as f64,
    }
}

fn plaplace_lshape() -> Benchmark {
    Benchmark {
        id: BenchmarkId::PLaplaceLShape,
        problem: Problem::new(Arc::new(PLaplace::new(4.0).expect("p > 1")), one()),
        mesh: domains::lshape(),
        exact: None,
        reference_energy: Some(PLAPLACE_LSHAPE_ENERGY),
        optimal_design: None,
        rhs_osc_power: |_| 1.0,
    }
}

fn odp(id: BenchmarkId, lambda: f64, mesh: Mesh, reference: f64) -> Benchmark {
    let w = OptimalDesign::from_lambda(1.0, 2.0, lambda).expect("valid parameters");
    Benchmark {
        id,
        problem: Problem::new(Arc::new(w), one()),
        mesh,
        exact: None,
        reference_energy: Some(reference),
        optimal_design: Some(w),
        rhs_osc_power: |_| 1.0,
    }
}

/// Two-well data with a known solution: wells `F1 = -n`, `F2 = n` for
/// `n = (3, 2)/sqrt(13)`, and `u = phi(zeta)` with `zeta = (3x + 2y - 3)/sqrt(13)`,
/// `phi(z) = z + z^4/4`. The gradient stays on the flat segment between the
/// wells where `zeta < 0` and leaves it where `zeta > 0`, so `grad u` has a
/// kink across the line from `(1,0)` to `(0,3/2)`. `g = u_D = u`, so the
/// data do not depend on `alpha`.
pub fn twowell_benchmark(alpha: f64) -> Benchmark {
    let s13 = 13f64.sqrt();
    let n = [3.0 / s13, 2.0 / s13];
    let zeta = move |x: [f64; 2]| (3.0 * x[0] + 2.0 * x[1] - 3.0) / s13;
    let u = move |x: [f64; 2]| {
        let z = zeta(x);
        z + z.powi(4) / 4.0
    };
    let dphi = move |x: [f64; 2]| 1.0 + zeta(x).powi(3);
    let grad = move |x: [f64; 2]| {
        let d = dphi(x);
        [d * n[0], d * n[1]]
    };
    let stress = move |x: [f64; 2]| {
        if zeta(x) <= 0.0 {
            return [0.0, 0.0];
        }
        let d = dphi(x);
        let s = 4.0 * (d * d - 1.0) * d;
        [s * n[0], s * n[1]]
    };
    let f = move |x: [f64; 2]| {
        let z = zeta(x);
        if z <= 0.0 {
            return 0.0;
        }
        let d = 1.0 + z.powi(3);
        -4.0 * (3.0 * d * d - 1.0) * 3.0 * z * z
    };
    let w = TwoWell::new([-n[0], -n[1]], n).expect("distinct wells");
    let ud: ScalarField = Arc::new(u);
    Benchmark {
        id: BenchmarkId::TwoWell,
        problem: Problem::new(Arc::new(w), Arc::new(f))
            .with_dirichlet(ud.clone())
            .with_lower_order(ud.clone(), alpha),
        mesh: domains::twowell_rectangle(),
        exact: Some(ExactSolution { u: ud, grad: Arc::new(grad), stress: Arc::new(stress) }),
        reference_energy: None,
        optimal_design: None,
        rhs_osc_power: |_| 1.0,
    }
}

pub fn benchmark(id: BenchmarkId) -> Benchmark {
    match id {
        BenchmarkId::PLaplaceSquare => plaplace_square(),
        BenchmarkId::PLaplaceLShape => plaplace_lshape(),
        BenchmarkId::OdpSquare => odp(id, ODP_SQUARE_LAMBDA, domains::unit_square(), ODP_SQUARE_ENERGY),
        BenchmarkId::OdpLShape => odp(id, ODP_LSHAPE_LAMBDA, domains::lshape(), ODP_LSHAPE_ENERGY),
        BenchmarkId::TwoWell => twowell_benchmark(TWOWELL_ALPHA),
    }
}

pub fn benchmark_library() -> Vec<Benchmark> {
    BenchmarkId::ALL.into_iter().map(benchmark).collect()
}

/// `E(u) = int W(grad u) - f u + alpha (g - u)^2` of an exact solution by
/// quadrature on `mesh` refined `levels` times.
pub fn exact_energy(bench: &Benchmark, levels: usize) -> Option<f64> {
    use crate::femspaces::quadrature::TriangleRule;
    let exact = bench.exact.as_ref()?;
    let mut mesh = bench.mesh.clone();
    for _ in 0..levels {
        mesh = crate::mesh::uniform_refine(&mesh).mesh;
    }
    let rule = TriangleRule::new(20).expect("supported degree");
    let w = &*bench.problem.density;
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.geometry(t);
        for (r, &wq) in rule.reference_points().zip(&rule.weights) {
            let x = geom.to_physical(r);
            let u = (exact.u)(x);
            let mut e = w.value((exact.grad)(x)) - (bench.problem.f)(x) * u;
            if let Some(lo) = &bench.problem.lower_order {
                e += lo.alpha * ((lo.g)(x) - u).powi(2);
            }
            total += wq * geom.area * e;
        }
    }
    Some(total)
}
