//! The HHO space, the gradient reconstruction and the discrete energy.

mod energy;
mod function;
mod problem;
mod space;

pub use energy::{discrete_energy, energy_gradient, DiscreteEnergy, LocalModel};
pub use function::{GradientField, HhoFunction, RtField, StressField};
pub use problem::{LowerOrderTerm, Problem, ScalarField, VectorField};
pub use space::{HhoSpace, RefTables};
pub(crate) use space::reference_edge_point;
