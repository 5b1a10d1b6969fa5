//! Polynomial spaces, Raviart-Thomas elements, quadrature and projections.

pub mod basis;
pub mod geometry;
pub mod poly;
pub mod projection;
pub mod quadrature;

pub use basis::{CellBasis, EdgeBasis, LagrangeBasis, RtBasis};
pub use geometry::TriangleGeometry;
pub use projection::{l2_project_cell, l2_project_edge, l2_project_rt, rt_mass_matrix};
pub use quadrature::{quad_rule_edge, quad_rule_triangle, EdgeRule, TriangleRule};
