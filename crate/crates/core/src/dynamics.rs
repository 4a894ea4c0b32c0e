//! Time evolution of density matrices: a fixed-step RK4 integrator with a
//! dense and a charge-graded backend, an exponential-map oracle for
//! verification, and propagation of the explicitly time-dependent model.

pub mod engine;
pub mod graded;
pub mod oracle;
pub mod rhs;
pub mod spec;
pub mod timedep;

pub use engine::{propagate_initial, propagate_rk4, propagate_rk4_dense};
pub use graded::{propagate_blocks, propagate_rk4_graded, BlockDensity};
pub use oracle::{build_liouvillian, propagate_oracle};
pub use rhs::lindblad_rhs;
pub use spec::{EvolutionSpec, HealthReport, InitialState, Observer, TimeSeries};
pub use timedep::propagate_timedep;
