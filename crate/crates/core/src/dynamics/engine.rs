//! Fixed-step RK4 propagation, dense backend and backend dispatch.

use std::borrow::Cow;

use crate::algebra::density::EIG_FLOOR;
use crate::algebra::eig::{cholesky_psd_ok, min_eigenvalue};
use crate::algebra::{ComplexMatrix, DensityMatrix, SparseOperator, SubsystemLabel, SystemLayout};
use crate::dynamics::graded::{self, BlockDensity};
use crate::dynamics::rhs::{rhs_into, Dissipator, RhsWorkspace};
use crate::dynamics::spec::{EvolutionSpec, HealthReport, InitialState, Observer, TimeSeries};
use crate::error::{CoreError, Result};
use crate::model::{HamiltonianSet, TimeDependentModel};
use crate::observables::occupation_report;
use crate::scalar::{c_re, real, Scalar};

/// Below this dimension the dense backend is used even when a grading is
/// available; block bookkeeping only pays off on larger systems.
pub(crate) const GRADED_THRESHOLD: usize = 64;

/// Hard cap on materializing dense density matrices (a 4096^2 complex
/// matrix is 256 MiB in f64).
pub const DENSE_CAP: usize = 4096;

/// Largest dimension where positivity checkpoints diagonalize exactly;
/// beyond it a shifted Cholesky certificate is used.
pub(crate) const EXACT_EIG_CHECK: usize = 64;

/// Positivity checkpoints per run (roughly; always includes the final
/// sample).
pub(crate) const HEALTH_CHECKPOINTS: usize = 32;

pub(crate) enum HamiltonianSource<'a, T: Scalar> {
    Fixed(&'a SparseOperator<T>),
    TimeDependent(&'a TimeDependentModel<T>),
}

impl<T: Scalar> HamiltonianSource<'_, T> {
    fn at(&self, t: T) -> Cow<'_, SparseOperator<T>> {
        match self {
            HamiltonianSource::Fixed(h) => Cow::Borrowed(*h),
            HamiltonianSource::TimeDependent(m) => Cow::Owned(m.at(t)),
        }
    }
}

/// Integrates the master equation with the classic fourth-order scheme.
///
/// Each step symmetrizes the state; the trace is never renormalized and its
/// drift aborts the run once it exceeds `spec.tolerance_trace`.
pub(crate) fn run_dense<T: Scalar>(
    layout: &SystemLayout,
    source: HamiltonianSource<'_, T>,
    diss: &[Dissipator<T>],
    rho0: &ComplexMatrix<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    spec.validate()?;
    let dim = layout.total_dim();
    if rho0.rows() != dim || rho0.cols() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "state is {}x{} but the layout has dimension {dim}",
            rho0.rows(),
            rho0.cols()
        )));
    }

    let (n_steps, remainder) = spec.step_plan();
    let planned_samples = n_steps / spec.record_stride + 2;
    let health_stride = (planned_samples / HEALTH_CHECKPOINTS).max(1);
    let modes: Vec<SubsystemLabel> = layout
        .parts()
        .iter()
        .map(|&(l, _)| l)
        .filter(|&l| matches!(l, SubsystemLabel::Opt | SubsystemLabel::Mw))
        .collect();

    let mut rho = rho0.clone();
    let mut k1 = ComplexMatrix::zeros(dim, dim);
    let mut k2 = ComplexMatrix::zeros(dim, dim);
    let mut k3 = ComplexMatrix::zeros(dim, dim);
    let mut k4 = ComplexMatrix::zeros(dim, dim);
    let mut stage = ComplexMatrix::zeros(dim, dim);
    let mut ws = RhsWorkspace::new(dim);

    let mut series = TimeSeries::new(observers.iter().map(|o| o.name()).collect());
    let mut health = HealthReport::default();
    let mut row = vec![T::zero(); observers.len()];
    let mut sample_idx = 0usize;

    let sample = |rho: &ComplexMatrix<T>,
                      t: T,
                      sample_idx: &mut usize,
                      series: &mut TimeSeries<T>,
                      health: &mut HealthReport<T>,
                      row: &mut [T],
                      is_final: bool|
     -> Result<()> {
        let dm = DensityMatrix::new_unchecked(layout.clone(), rho.clone());
        for (slot, obs) in row.iter_mut().zip(observers) {
            *slot = obs.evaluate(&dm)?;
        }
        series.push_row(t, row);
        for &label in &modes {
            let rep = occupation_report(&dm, label)?;
            if rep.top_level_mass > health.top_fock_max {
                health.top_fock_max = rep.top_level_mass;
            }
            match health.top_fock_modes.iter_mut().find(|(l, _)| *l == label) {
                Some(slot) if rep.top_level_mass > slot.1 => slot.1 = rep.top_level_mass,
                Some(_) => {}
                None => health.top_fock_modes.push((label, rep.top_level_mass)),
            }
        }
        if *sample_idx % health_stride == 0 || is_final {
            if dim <= EXACT_EIG_CHECK {
                let me = min_eigenvalue(rho)?;
                health.min_eigenvalue = Some(match health.min_eigenvalue {
                    Some(prev) if prev < me => prev,
                    _ => me,
                });
                if me < real::<T>(EIG_FLOOR) {
                    health.positivity_certified = false;
                }
            } else if !cholesky_psd_ok(rho, real::<T>(-EIG_FLOOR)) {
                health.positivity_certified = false;
            }
        }
        *sample_idx += 1;
        Ok(())
    };

    sample(&rho, T::zero(), &mut sample_idx, &mut series, &mut health, &mut row, false)?;

    let half = real::<T>(0.5);
    let sixth = T::one() / real::<T>(6.0);
    let third = T::one() / real::<T>(3.0);
    let total_steps = n_steps + usize::from(remainder.is_some());

    for step in 0..total_steps {
        let t = spec.dt * real::<T>(step as f64);
        let dt = match remainder {
            Some(rem) if step == n_steps => rem,
            _ => spec.dt,
        };

        let h1 = source.at(t);
        let h2 = source.at(t + half * dt);
        let h3 = source.at(t + dt);
        rhs_into(&h1, diss, &rho, &mut ws, &mut k1);
        stage.copy_from(&rho);
        stage.axpy(c_re(half * dt), &k1);
        rhs_into(&h2, diss, &stage, &mut ws, &mut k2);
        stage.copy_from(&rho);
        stage.axpy(c_re(half * dt), &k2);
        rhs_into(&h2, diss, &stage, &mut ws, &mut k3);
        stage.copy_from(&rho);
        stage.axpy(c_re(dt), &k3);
        rhs_into(&h3, diss, &stage, &mut ws, &mut k4);
        rho.axpy(c_re(dt * sixth), &k1);
        rho.axpy(c_re(dt * third), &k2);
        rho.axpy(c_re(dt * third), &k3);
        rho.axpy(c_re(dt * sixth), &k4);

        let is_last = step + 1 == total_steps;
        let t_next = if is_last && remainder.is_some() {
            spec.t_final
        } else {
            spec.dt * real::<T>((step + 1) as f64)
        };
        let will_sample = (step + 1) % spec.record_stride == 0 || is_last;

        if will_sample {
            let dev = rho.hermitian_deviation();
            if dev > health.herm_dev_max {
                health.herm_dev_max = dev;
            }
        }
        rho.symmetrize();

        let mut tr = T::zero();
        for k in 0..dim {
            tr += rho[(k, k)].re;
        }
        let drift = (tr - T::one()).abs();
        if drift > health.trace_drift_max {
            health.trace_drift_max = drift;
        }
        if drift > spec.tolerance_trace {
            return Err(CoreError::TraceDrift {
                drift: drift.to_f64().unwrap_or(f64::NAN),
                tol: spec.tolerance_trace.to_f64().unwrap_or(f64::NAN),
                t: t_next.to_f64().unwrap_or(f64::NAN),
            });
        }

        if will_sample {
            sample(&rho, t_next, &mut sample_idx, &mut series, &mut health, &mut row, is_last)?;
        }
    }

    series.health = health;
    series.final_state = Some(DensityMatrix::new_unchecked(layout.clone(), rho));
    Ok(series)
}

/// Dense-backend propagation, the literal reference path.
pub fn propagate_rk4_dense<T: Scalar>(
    rho0: &DensityMatrix<T>,
    h: &HamiltonianSet<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    if rho0.layout() != &h.layout {
        return Err(CoreError::Layout(
            "state and model layouts disagree".into(),
        ));
    }
    let diss = Dissipator::build(&h.collapse_ops);
    run_dense(
        &h.layout,
        HamiltonianSource::Fixed(&h.hamiltonian),
        &diss,
        rho0.matrix(),
        spec,
        observers,
    )
}

/// Propagates a valid state, choosing the backend.
///
/// Systems whose model carries a conserved charge, whose state is
/// block-diagonal in it, and whose dimension is large enough to matter run
/// on the graded backend; everything else runs dense. Both backends
/// integrate the same equation with the same steps.
pub fn propagate_rk4<T: Scalar>(
    rho0: &DensityMatrix<T>,
    h: &HamiltonianSet<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    if let Some(q) = &h.charges {
        if rho0.dim() > GRADED_THRESHOLD && graded::is_block_diagonal(rho0.matrix(), q) {
            return graded::propagate_rk4_graded(rho0, h, spec, observers);
        }
    }
    propagate_rk4_dense(rho0, h, spec, observers)
}

/// Builds the initial state and propagates it, without materializing a
/// dense matrix when the graded backend can host the state directly.
pub fn propagate_initial<T: Scalar>(
    h: &HamiltonianSet<T>,
    initial: &InitialState<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    let dim = h.dim();
    let graded_viable = h.charges.is_some() && dim > GRADED_THRESHOLD;
    match initial {
        InitialState::Density(rho0) => propagate_rk4(rho0, h, spec, observers),
        InitialState::AllGround => {
            if graded_viable {
                let blocks =
                    BlockDensity::all_ground(h.layout.clone(), h.charges.clone().unwrap())?;
                return graded::propagate_blocks(blocks, h, spec, observers);
            }
            require_dense_cap(dim)?;
            propagate_rk4(&DensityMatrix::all_ground(h.layout.clone()), h, spec, observers)
        }
        InitialState::NvSuperposition(theta) => {
            require_dense_cap(dim)?;
            let rho0 = DensityMatrix::nv_superposition(h.layout.clone(), *theta)?;
            propagate_rk4(&rho0, h, spec, observers)
        }
        InitialState::Pure(amps) => {
            if graded_viable {
                if let Some(blocks) = BlockDensity::from_pure_graded(
                    h.layout.clone(),
                    h.charges.clone().unwrap(),
                    amps,
                )? {
                    return graded::propagate_blocks(blocks, h, spec, observers);
                }
            }
            require_dense_cap(dim)?;
            let rho0 = DensityMatrix::pure(h.layout.clone(), amps)?;
            propagate_rk4(&rho0, h, spec, observers)
        }
    }
}

fn require_dense_cap(dim: usize) -> Result<()> {
    if dim > DENSE_CAP {
        return Err(CoreError::InvalidArgument(format!(
            "dimension {dim} exceeds the dense propagation cap {DENSE_CAP}; \
             this initial state has no block form"
        )));
    }
    Ok(())
}
