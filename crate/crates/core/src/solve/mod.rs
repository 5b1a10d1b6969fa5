//! Minimisation of the discrete energy and transfer between meshes.

mod newton;
mod transfer;

pub use newton::{initial_guess, minimize, SolveReport, SolverConfig};
pub use transfer::prolongate;
