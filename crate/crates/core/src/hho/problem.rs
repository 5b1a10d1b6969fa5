use std::fmt;
use std::sync::Arc;

use crate::density::Density;

pub type ScalarField = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

/// The quadratic term `alpha ||g - v_T||^2` added to the energy.
#[derive(Clone)]
pub struct LowerOrderTerm {
    pub g: ScalarField,
    pub alpha: f64,
}

/// Minimise `int W(grad v) - int f v (+ alpha ||g - v||^2)` subject to
/// `v = u_D` on the boundary (zero when no data is given).
#[derive(Clone)]
pub struct Problem {
    pub density: Arc<dyn Density<f64>>,
    pub f: ScalarField,
    pub dirichlet: Option<ScalarField>,
    pub lower_order: Option<LowerOrderTerm>,
}

impl Problem {
    pub fn new(density: Arc<dyn Density<f64>>, f: ScalarField) -> Self {
        Self { density, f, dirichlet: None, lower_order: None }
    }

    pub fn with_dirichlet(mut self, u_d: ScalarField) -> Self {
        self.dirichlet = Some(u_d);
        self
    }

    pub fn with_lower_order(mut self, g: ScalarField, alpha: f64) -> Self {
        self.lower_order = Some(LowerOrderTerm { g, alpha });
        self
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("density", &self.density)
            .field("dirichlet", &self.dirichlet.is_some())
            .field("alpha", &self.lower_order.as_ref().map(|l| l.alpha))
            .finish()
    }
}
