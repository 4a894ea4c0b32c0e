//! Evolution parameters, recorded observables, and the result container.

use num_complex::Complex;

use crate::algebra::{DensityMatrix, SubsystemLabel};
use crate::dynamics::graded::BlockDensity;
use crate::error::{CoreError, Result};
use crate::observables::{
    concurrence, mode_occupation, transfer_fidelity, QubitPureState,
};
use crate::scalar::{real, Scalar};

/// Fixed-step integration window.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionSpec<T: Scalar> {
    /// End of the window, in units of g*t.
    pub t_final: T,
    /// Step size, in units of 1/g. At most 0.01.
    pub dt: T,
    /// Steps between recorded samples.
    pub record_stride: usize,
    /// Abort bound on |trace - 1|.
    pub tolerance_trace: T,
}

impl<T: Scalar> EvolutionSpec<T> {
    pub fn new(t_final: T, dt: T, record_stride: usize, tolerance_trace: T) -> Result<Self> {
        let s = Self { t_final, dt, record_stride, tolerance_trace };
        s.validate()?;
        Ok(s)
    }

    /// Production defaults: dt = 1e-3, a sample every 20 steps, trace
    /// tolerance 1e-6.
    pub fn standard(t_final: T) -> Result<Self> {
        Self::new(t_final, real::<T>(1e-3), 20, real::<T>(1e-6))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt <= real::<T>(0.01)) || !self.dt.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "dt must lie in (0, 0.01], got {}",
                self.dt
            )));
        }
        if !(self.t_final > T::zero()) || !self.t_final.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.record_stride < 1 {
            return Err(CoreError::InvalidArgument("record_stride must be at least 1".into()));
        }
        if !(self.tolerance_trace > T::zero()) || !self.tolerance_trace.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "tolerance_trace must be positive, got {}",
                self.tolerance_trace
            )));
        }
        Ok(())
    }

    /// Number of full steps, plus an optional trailing remainder step.
    pub(crate) fn step_plan(&self) -> (usize, Option<T>) {
        let ratio = self.t_final / self.dt;
        let whole = ratio.floor();
        let n = whole.to_usize().unwrap_or(0);
        let rem = self.t_final - whole * self.dt;
        // remainders below one part in 1e9 of a step are grid roundoff
        if rem > self.dt * real::<T>(1e-9) {
            (n, Some(rem))
        } else {
            (n, None)
        }
    }
}

/// A named scalar observable recorded along the evolution.
#[derive(Clone, Copy, Debug)]
pub enum Observer<T: Scalar> {
    /// Overlap of the reduced SC state with a fixed target.
    Fidelity(QubitPureState<T>),
    /// Wootters concurrence of the reduced two-qubit state.
    Concurrence,
    /// Mean photon number of the optical mode.
    NOpt,
    /// Mean photon number of the microwave mode.
    NMw,
    /// Real part of the trace.
    Trace,
    /// trace(rho^2).
    Purity,
    /// Population of one level of the three-level NV, for the adiabatic
    /// elimination study. The level must be 0, 1 or 2.
    NvLevel(u8),
}

impl<T: Scalar> Observer<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Observer::Fidelity(_) => "fidelity",
            Observer::Concurrence => "concurrence",
            Observer::NOpt => "n_opt",
            Observer::NMw => "n_mw",
            Observer::Trace => "trace",
            Observer::Purity => "purity",
            Observer::NvLevel(0) => "p_nv0",
            Observer::NvLevel(1) => "p_nv1",
            Observer::NvLevel(_) => "p_nv2",
        }
    }

    /// Dense evaluation. The graded backend computes the same quantities
    /// from its block representation instead.
    pub fn evaluate(&self, rho: &DensityMatrix<T>) -> Result<T> {
        match self {
            Observer::Fidelity(target) => transfer_fidelity(rho, target),
            Observer::Concurrence => {
                let pair = rho.partial_trace(&[SubsystemLabel::Nv, SubsystemLabel::Sc])?;
                concurrence(&pair)
            }
            Observer::NOpt => mode_occupation(rho, SubsystemLabel::Opt),
            Observer::NMw => mode_occupation(rho, SubsystemLabel::Mw),
            Observer::Trace => Ok(rho.trace()),
            Observer::Purity => Ok(rho.purity()),
            Observer::NvLevel(level) => {
                if *level > 2 {
                    return Err(CoreError::InvalidArgument(format!(
                        "the three-level NV has no level {level}"
                    )));
                }
                let red = rho.partial_trace(&[SubsystemLabel::NvLambda])?;
                Ok(red.matrix()[(*level as usize, *level as usize)].re)
            }
        }
    }
}

/// Initial condition of a scenario, kept symbolic so large graded runs can
/// construct their block form directly.
#[derive(Clone, Debug)]
pub enum InitialState<T: Scalar> {
    /// Every subsystem in its ground level.
    AllGround,
    /// NV in cos(theta)|0> + sin(theta)|1>, everything else ground.
    NvSuperposition(T),
    /// Explicit pure state over the full layout.
    Pure(Vec<Complex<T>>),
    /// Explicit density matrix.
    Density(DensityMatrix<T>),
}

/// Numerical health evidence gathered along a propagation.
#[derive(Clone, Debug)]
pub struct HealthReport<T> {
    /// max |trace - 1| over all steps.
    pub trace_drift_max: T,
    /// max Hermiticity deviation before symmetrization, over sampled steps.
    pub herm_dev_max: T,
    /// Smallest eigenvalue seen at positivity checkpoints, when the
    /// dimension admits exact diagonalization.
    pub min_eigenvalue: Option<T>,
    /// True when every positivity checkpoint passed (exact eigenvalue or
    /// shifted Cholesky certificate).
    pub positivity_certified: bool,
    /// Largest top-Fock-level population seen on any bosonic mode.
    pub top_fock_max: T,
    /// The same maximum split per mode, for truncation planning.
    pub top_fock_modes: Vec<(SubsystemLabel, T)>,
}

impl<T: Scalar> Default for HealthReport<T> {
    fn default() -> Self {
        Self {
            trace_drift_max: T::zero(),
            herm_dev_max: T::zero(),
            min_eigenvalue: None,
            positivity_certified: true,
            top_fock_max: T::zero(),
            top_fock_modes: Vec::new(),
        }
    }
}

/// Recorded evolution: sample times, named columns, the final state in
/// whichever representation fits, and health evidence.
#[derive(Clone, Debug)]
pub struct TimeSeries<T: Scalar> {
    pub times: Vec<T>,
    names: Vec<&'static str>,
    columns: Vec<Vec<T>>,
    /// Dense final state, omitted when the dimension is too large to
    /// materialize.
    pub final_state: Option<DensityMatrix<T>>,
    /// Block form of the final state from the graded backend.
    pub final_blocks: Option<BlockDensity<T>>,
    pub health: HealthReport<T>,
}

impl<T: Scalar> TimeSeries<T> {
    pub(crate) fn new(names: Vec<&'static str>) -> Self {
        let columns = names.iter().map(|_| Vec::new()).collect();
        Self {
            times: Vec::new(),
            names,
            columns,
            final_state: None,
            final_blocks: None,
            health: HealthReport::default(),
        }
    }

    pub(crate) fn push_row(&mut self, t: T, row: &[T]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.times.push(t);
        for (col, &v) in self.columns.iter_mut().zip(row) {
            col.push(v);
        }
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[T]> {
        let k = self.names.iter().position(|&n| n == name)?;
        Some(&self.columns[k])
    }

    /// Greatest recorded value of a column and the time it occurred,
    /// earliest time on ties.
    pub fn peak(&self, name: &str) -> Option<(T, T)> {
        let col = self.column(name)?;
        let mut best: Option<(T, T)> = None;
        for (&v, &t) in col.iter().zip(&self.times) {
            match best {
                Some((bv, _)) if v <= bv => {}
                _ => best = Some((v, t)),
            }
        }
        best
    }

    /// Value of a column at the last sample.
    pub fn last_value(&self, name: &str) -> Option<T> {
        self.column(name)?.last().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_bounds() {
        assert!(EvolutionSpec::new(3.0f64, 1e-3, 20, 1e-6).is_ok());
        assert!(EvolutionSpec::new(3.0f64, 0.02, 20, 1e-6).is_err());
        assert!(EvolutionSpec::new(3.0f64, 0.0, 20, 1e-6).is_err());
        assert!(EvolutionSpec::new(-1.0f64, 1e-3, 20, 1e-6).is_err());
        assert!(EvolutionSpec::new(3.0f64, 1e-3, 0, 1e-6).is_err());
    }

    #[test]
    fn step_plan_handles_grid_and_offgrid_windows() {
        let on_grid = EvolutionSpec::new(2.0f64, 1e-3, 20, 1e-6).unwrap();
        let (n, rem) = on_grid.step_plan();
        assert_eq!(n, 2000);
        assert!(rem.is_none());

        let off_grid = EvolutionSpec::new(0.0105f64, 1e-2, 1, 1e-6).unwrap();
        let (n, rem) = off_grid.step_plan();
        assert_eq!(n, 1);
        let r = rem.unwrap();
        assert!((r - 5e-4).abs() < 1e-12);
    }

    #[test]
    fn peak_prefers_earliest_tie() {
        let mut ts = TimeSeries::<f64>::new(vec!["trace"]);
        ts.push_row(0.0, &[1.0]);
        ts.push_row(1.0, &[3.0]);
        ts.push_row(2.0, &[3.0]);
        let (v, t) = ts.peak("trace").unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(t, 1.0);
        assert!(ts.peak("missing").is_none());
        assert_eq!(ts.last_value("trace"), Some(3.0));
    }
}
