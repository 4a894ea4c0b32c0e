//! Linear-algebra layer: dense and sparse complex matrices, tensor-product
//! layouts, Hermitian eigendecomposition, matrix exponentials and the
//! validated density-matrix wrapper.

pub mod density;
pub mod eig;
pub mod expm;
pub mod layout;
pub mod matrix;
pub mod ops;
pub mod sparse;

pub use density::DensityMatrix;
pub use layout::{SubsystemLabel, SystemLayout};
pub use matrix::{kron, ComplexMatrix};
pub use sparse::SparseOperator;
