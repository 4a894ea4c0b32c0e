//! Propagation of the explicitly time-dependent model, for checking how
//! fast the rotating-wave picture becomes exact.

use crate::algebra::{DensityMatrix, SystemLayout};
use crate::dynamics::engine::{run_dense, HamiltonianSource};
use crate::dynamics::rhs::Dissipator;
use crate::dynamics::spec::{EvolutionSpec, Observer, TimeSeries};
use crate::error::{CoreError, Result};
use crate::model::{ModelParams, TimeDependentModel};
use crate::scalar::{real, Scalar};

/// RK4 with the Hamiltonian re-evaluated at `t`, `t + dt/2` and `t + dt`
/// within each step. The dissipators stay time-independent.
///
/// Requires `dt <= 0.02 / omega_b` so the fast phase is resolved by at
/// least ~300 steps per period.
pub fn propagate_timedep<T: Scalar>(
    rho0: &DensityMatrix<T>,
    m: &ModelParams<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    spec.validate()?;
    m.validate()?;
    if !(m.omega_b > T::zero()) {
        return Err(CoreError::InvalidArgument(format!(
            "omega_b = {} must be positive",
            m.omega_b
        )));
    }
    let limit = real::<T>(0.02) / m.omega_b;
    if spec.dt > limit {
        return Err(CoreError::StepTooCoarse {
            dt: spec.dt.to_f64().unwrap_or(f64::NAN),
            omega_b: m.omega_b.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    let layout = SystemLayout::canonical(m.n_a, m.n_b)?;
    if rho0.layout() != &layout {
        return Err(CoreError::Layout(
            "state layout does not match the canonical layout of the parameters".into(),
        ));
    }
    let model = TimeDependentModel::new(m, &layout)?;
    let diss = Dissipator::build(model.collapse_ops());
    run_dense(
        &layout,
        HamiltonianSource::TimeDependent(&model),
        &diss,
        rho0.matrix(),
        spec,
        observers,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::engine::propagate_rk4_dense;
    use crate::model::h_transfer;

    #[test]
    fn rejects_coarse_steps() {
        let mut m = ModelParams::<f64>::default();
        m.omega_b = 50.0;
        m.delta = 50.0;
        let layout = SystemLayout::canonical(2, 2).unwrap();
        let rho0 = DensityMatrix::nv_superposition(layout, 0.5).unwrap();
        let spec = EvolutionSpec::new(1.0, 1e-3, 10, 1e-6).unwrap();
        match propagate_timedep(&rho0, &m, &spec, &[Observer::Trace]) {
            Err(CoreError::StepTooCoarse { .. }) => {}
            other => panic!("expected the step bound error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn no_interaction_term_matches_rwa_exactly() {
        // with G = 0 the time dependence disappears entirely
        let mut m = ModelParams::<f64>::default();
        m.gi_lin = 0.0;
        m.omega_b = 50.0;
        m.delta = 50.0;
        let layout = SystemLayout::canonical(2, 2).unwrap();
        let rho0 = DensityMatrix::nv_superposition(layout.clone(), 0.7).unwrap();
        let spec = EvolutionSpec::new(0.5, 4e-4, 25, 1e-6).unwrap();
        let timed = propagate_timedep(&rho0, &m, &spec, &[Observer::Trace]).unwrap();
        let set = h_transfer(&m, &layout).unwrap();
        let rwa = propagate_rk4_dense(&rho0, &set, &spec, &[Observer::Trace]).unwrap();
        let a = timed.final_state.unwrap();
        let b = rwa.final_state.unwrap();
        assert!(a.matrix().max_diff(b.matrix()) <= 1e-13);
    }
}
