//! Coupled FEM-BEM solver in the Laplace domain and its time-domain driver.

mod discretization;
mod energy;
mod frequency;
mod norms;
mod scenario;

pub use discretization::{Discretization, SolidPart};
pub use frequency::{FrequencyAssembler, FrequencyBlockSystem, FrequencyData, FrequencySolution};
pub use scenario::{inside_curve, solve_scenario, Raster, Scenario, SimulationResult, Snapshot, SnapshotSpec};
pub use energy::{elastic_energy, interior_conservation_run, random_smooth_state, EnergyHistory};
pub use norms::{norm_timeseries, norm_timeseries_with, BoundaryNormOperators, NormHistory};
