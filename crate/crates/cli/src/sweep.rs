//! Parameter sweeps: the base scenario rerun once per axis value.
//!
//! Members execute concurrently on a small worker pool, each one internally
//! sequential; results land in index-addressed slots, so the assembled
//! output is identical however the members interleave. Values are visited
//! in ascending order and the output rows keep that order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use hqsim_core::dynamics::Observer;
use hqsim_core::observables::transfer_arrival_target;

use crate::config::{apply_axis, Reduction, Scenario, Sweep};
use crate::error::{CliError, CliResult};
use crate::output::fmt_axis;
use crate::scenario::{run_scenario, ScenarioOutcome};

/// All member runs of a sweep, ordered by axis value.
pub struct SweepOutcome {
    pub axis: String,
    pub values: Vec<f64>,
    pub members: Vec<ScenarioOutcome>,
    pub reduction: Reduction,
    pub observable: String,
}

/// The base scenario with one axis value substituted.
///
/// `theta` lives in the initial state and the fidelity target rather than in
/// the Hamiltonian, so a theta sweep rewrites those too; every other axis
/// only touches the model parameters.
pub fn member_scenario(base: &Scenario, axis: &str, value: f64) -> Scenario {
    let mut sc = base.clone();
    apply_axis(&mut sc.params, axis, value);
    if axis == "theta" {
        if let hqsim_core::dynamics::InitialState::NvSuperposition(_) = sc.initial {
            sc.initial = hqsim_core::dynamics::InitialState::NvSuperposition(value);
        }
        for obs in &mut sc.outputs {
            if let Observer::Fidelity(_) = obs {
                *obs = Observer::Fidelity(transfer_arrival_target(value));
            }
        }
    }
    sc
}

pub fn run_sweep(sw: &Sweep) -> CliResult<SweepOutcome> {
    let n = sw.values.len();
    let slots: Mutex<Vec<Option<CliResult<ScenarioOutcome>>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(n);

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let sc = member_scenario(&sw.base, &sw.axis, sw.values[i]);
                let result = run_scenario(&sc);
                slots.lock().expect("no panics hold the lock")[i] = Some(result);
            });
        }
    });

    // first failure by axis order, independent of execution order
    let mut members = Vec::with_capacity(n);
    for (slot, &v) in slots.into_inner().expect("scope joined").into_iter().zip(&sw.values) {
        let outcome = slot
            .expect("every index was claimed")
            .map_err(|e| match e {
                CliError::Check(m) => {
                    CliError::Check(format!("{} = {}: {m}", sw.axis, fmt_axis(v)))
                }
                CliError::Runtime(m) => {
                    CliError::Runtime(format!("{} = {}: {m}", sw.axis, fmt_axis(v)))
                }
                other => other,
            })?;
        members.push(outcome);
    }

    Ok(SweepOutcome {
        axis: sw.axis.clone(),
        values: sw.values.clone(),
        members,
        reduction: sw.reduction,
        observable: sw.observable.clone(),
    })
}

impl SweepOutcome {
    /// Rows `(axis value, reduced quantity)` for the peak reductions.
    pub fn reduced_rows(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.members)
            .map(|(&v, m)| {
                let (peak, at) = m.series.peak(&self.observable).expect("validated output");
                let reduced = match self.reduction {
                    Reduction::PeakTime => at,
                    _ => peak,
                };
                (v, reduced)
            })
            .collect()
    }

    /// Column label of one member curve.
    pub fn curve_name(&self, value: f64) -> String {
        format!("{}@{}={}", self.observable, self.axis, fmt_axis(value))
    }

    /// Shared time grid plus one named column per member, for `full_curves`.
    /// Fails when members recorded on different grids.
    pub fn curves(&self) -> CliResult<(Vec<f64>, Vec<(String, &[f64])>)> {
        let times = self.members[0].series.times.clone();
        let mut cols = Vec::with_capacity(self.members.len());
        for (m, &v) in self.members.iter().zip(&self.values) {
            if m.series.times != times {
                return Err(CliError::Runtime(
                    "sweep members recorded on different time grids".into(),
                ));
            }
            let col = m.series.column(&self.observable).expect("validated output");
            cols.push((self.curve_name(v), col));
        }
        Ok((times, cols))
    }
}
