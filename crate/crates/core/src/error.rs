//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Everything that can go wrong while building models or propagating states.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Incompatible shapes passed to an operation that cannot recover.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter or constructor argument violates its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Subsystem layout construction or lookup failure.
    #[error("layout error: {0}")]
    Layout(String),

    /// A density-matrix invariant (Hermiticity, unit trace, positivity) failed.
    #[error("density matrix invariant violated: {0}")]
    DensityInvariant(String),

    /// The cyclic Jacobi eigensolver did not reach its off-diagonal target.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigNonConvergence { sweeps: usize, off: f64 },

    /// A matrix-exponential series failed to converge.
    #[error("matrix exponential did not converge: {0}")]
    ExpmNonConvergence(String),

    /// The integrator measured trace drift beyond the configured tolerance.
    #[error("trace drift {drift:.3e} exceeded tolerance {tol:.3e} at t = {t:.6}")]
    TraceDrift { drift: f64, tol: f64, t: f64 },

    /// The superoperator oracle refuses dimensions above its cap.
    #[error("total dimension {dim} exceeds the oracle cap of {cap}")]
    OracleCap { dim: usize, cap: usize },

    /// Step size too coarse to resolve an explicit time dependence.
    #[error("dt = {dt:.3e} too coarse for omega_b = {omega_b:.3e}; require dt <= {limit:.3e}")]
    StepTooCoarse { dt: f64, omega_b: f64, limit: f64 },
}
