pub mod density;
pub mod driver;
pub mod error;
pub mod estimate;
pub mod femspaces;
pub mod hho;
pub mod mesh;
pub mod solve;
pub mod sparse;

pub use error::{Error, Result};

/// The densities are generic over the scalar type; these are the `f64`
/// instances used by the rest of the crate.
pub type PLaplace = density::PLaplace<f64>;
pub type OptimalDesign = density::OptimalDesign<f64>;
pub type TwoWell = density::TwoWell<f64>;
