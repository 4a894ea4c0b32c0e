//! Model layer: parameter bundles, the physical coupling-rate formulas, and
//! the Hamiltonian/collapse-operator builders for every regime of the hybrid
//! interface.

pub mod hamiltonians;
pub mod params;
pub mod physical;

pub use hamiltonians::{h_entangle, h_total_t, h_transfer, lambda_full_model, HamiltonianSet, TimeDependentModel};
pub use params::{ModelParams, PhysicalParams};
