pub mod bem;
pub mod coupler;
pub mod cq;
pub mod error;
pub mod fem;
pub mod incident;
pub mod material;
pub mod meshio;
pub mod quadrature;
pub mod sparse;
pub mod special;

pub use error::{Error, Result};
