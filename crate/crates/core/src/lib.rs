//! Simulation core for a hybrid quantum interface: an NV-center spin coupled
//! to an optical cavity, an electro-optic link between the optical cavity and
//! a microwave resonator, and a superconducting qubit on the microwave side.
//!
//! The crate builds the composite Hamiltonians of that chain (beam-splitter
//! form for state transfer on the red sideband, two-mode squeezing for
//! entanglement generation on the blue sideband), integrates the Lindblad
//! master equation with a fixed-step RK4 scheme, and evaluates the figures of
//! merit: conditional transfer fidelity, two-qubit concurrence, mode
//! occupations and purity. A superoperator-exponential oracle provides an
//! independent check of the integrator, and a full time-dependent model plus
//! a three-level Raman model back the rotating-wave and adiabatic-elimination
//! approximations.
//!
//! Everything numerical is generic over the real scalar type through
//! [`scalar::Scalar`]; `f64` is the supported precision for the quoted
//! tolerances, `f32` instantiates but carries proportionally looser accuracy.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod scalar;

pub use error::{CoreError, Result};

/// Default real scalar used by the concrete aliases below.
pub type Real = f64;

/// Complex number over the default scalar.
pub type Cplx = num_complex::Complex<Real>;

/// Dense complex matrix, `f64` precision.
pub type Matrix = algebra::matrix::ComplexMatrix<Real>;
/// Sparse operator, `f64` precision.
pub type Sparse = algebra::sparse::SparseOperator<Real>;
/// Density matrix, `f64` precision.
pub type Density = algebra::density::DensityMatrix<Real>;

/// Dense complex matrix, `f32` precision.
pub type Matrix32 = algebra::matrix::ComplexMatrix<f32>;
/// Sparse operator, `f32` precision.
pub type Sparse32 = algebra::sparse::SparseOperator<f32>;
/// Density matrix, `f32` precision.
pub type Density32 = algebra::density::DensityMatrix<f32>;
