//! Galerkin boundary elements for the Laplace-domain wave equation.

mod assembly;
mod kernel;
mod potential;
pub mod spaces;

pub use assembly::{assemble_operators, assemble_operators_with, LayerOperators, QuadratureSettings};
pub use kernel::{helmholtz_kernel, helmholtz_kernel_and_derivative};
pub use potential::eval_potentials;
pub use spaces::BoundarySpaces;
