//! Lagrange finite elements on the solid.

mod assembly;
mod electric;
pub mod lagrange;
mod rigid;
mod spaces;

pub use assembly::{trace_coupling, FemBlocks, NeumannLoad};
pub use electric::ElectricSolver;
pub use rigid::rigid_motion_basis;
pub use spaces::FemSpaces;
