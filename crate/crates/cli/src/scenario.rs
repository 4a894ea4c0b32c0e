//! Runs one resolved scenario, including the automatic truncation ladder.
//!
//! The auto policy raises both Fock truncations in steps of
//! [`AUTO_STEP`](crate::config::AUTO_STEP) until the recorded occupation
//! maxima of both modes move by no more than 5% between consecutive rungs.
//! The accepted run is then audited against the top-Fock warning threshold;
//! a mode whose highest level still carries more than 1e-4 population gets a
//! warning with the truncation the measured tail slope predicts, so the
//! caller can decide whether to raise the cap and rerun.

use hqsim_core::algebra::density::DensityMatrix;
use hqsim_core::algebra::layout::{SubsystemLabel, SystemLayout};
use hqsim_core::dynamics::{
    propagate_initial, propagate_timedep, InitialState, Observer, TimeSeries,
};
use hqsim_core::model::hamiltonians::{h_entangle, h_transfer};
use hqsim_core::Real;

use crate::config::{
    Mode, Scenario, Truncation, AUTO_REL_TOL, AUTO_STEP, TOP_FOCK_WARN,
};
use crate::error::{CliError, CliResult};
use crate::output::fmt_axis;

/// One rung of the truncation ladder.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Greatest recorded mean photon number, per mode.
    pub occ_opt: f64,
    pub occ_mw: f64,
    /// Greatest top-Fock-level population seen, per mode.
    pub top_opt: f64,
    pub top_mw: f64,
}

/// Evidence the auto policy gathered on its way to the accepted truncation.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub accepted_n: usize,
    /// True when no mode exceeded the top-Fock warning threshold.
    pub top_fock_clean: bool,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// Plain-text table for logs and reports.
    pub fn table(&self) -> String {
        let mut s = String::from("  n      max<n_opt>    max<n_mw>     top_opt       top_mw\n");
        for r in &self.rows {
            s.push_str(&format!(
                "  {:<6} {:<13.6} {:<13.6} {:<13.3e} {:<13.3e}\n",
                r.n, r.occ_opt, r.occ_mw, r.top_opt, r.top_mw
            ));
        }
        s
    }
}

/// A finished scenario run.
pub struct ScenarioOutcome {
    pub series: TimeSeries<Real>,
    pub n_a: usize,
    pub n_b: usize,
    /// The first `requested` recorded columns are the configured outputs;
    /// anything after them was added internally by the truncation ladder.
    pub requested: usize,
    pub convergence: Option<ConvergenceReport>,
    pub warnings: Vec<String>,
}

impl ScenarioOutcome {
    /// Peak value and peak time per configured output, in order.
    pub fn peaks(&self) -> Vec<(&'static str, f64, f64)> {
        self.series
            .names()
            .iter()
            .take(self.requested)
            .map(|&name| {
                let (v, t) = self.series.peak(name).expect("recorded column");
                (name, v, t)
            })
            .collect()
    }

    /// Names of the configured output columns.
    pub fn output_names(&self) -> Vec<&'static str> {
        self.series.names().iter().take(self.requested).copied().collect()
    }
}

/// Propagates one model instance at an explicit truncation.
fn run_at(
    sc: &Scenario,
    n_a: usize,
    n_b: usize,
    observers: &[Observer<Real>],
) -> CliResult<TimeSeries<Real>> {
    let p = sc.params.with_truncation(n_a, n_b);
    match sc.mode {
        Mode::Transfer => {
            let layout = SystemLayout::canonical(n_a, n_b)?;
            let h = h_transfer(&p, &layout)?;
            Ok(propagate_initial(&h, &sc.initial, &sc.evolution, observers)?)
        }
        Mode::Entangle => {
            let layout = SystemLayout::canonical(n_a, n_b)?;
            let h = h_entangle(&p, &layout)?;
            Ok(propagate_initial(&h, &sc.initial, &sc.evolution, observers)?)
        }
        Mode::TotalTimedep => {
            let layout = SystemLayout::canonical(n_a, n_b)?;
            let rho0 = match &sc.initial {
                InitialState::AllGround => DensityMatrix::all_ground(layout),
                InitialState::NvSuperposition(theta) => {
                    DensityMatrix::nv_superposition(layout, *theta)?
                }
                InitialState::Pure(amps) => DensityMatrix::pure(layout, amps)?,
                InitialState::Density(rho) => rho.clone(),
            };
            Ok(propagate_timedep(&rho0, &p, &sc.evolution, observers)?)
        }
    }
}

fn mode_top(series: &TimeSeries<Real>, label: SubsystemLabel) -> f64 {
    series
        .health
        .top_fock_modes
        .iter()
        .find(|(l, _)| *l == label)
        .map(|&(_, v)| v)
        .unwrap_or(0.0)
}

fn max_of(series: &TimeSeries<Real>, name: &str) -> f64 {
    series.peak(name).map(|(v, _)| v).unwrap_or(0.0)
}

fn measure(series: &TimeSeries<Real>, n: usize) -> ConvergenceRow {
    ConvergenceRow {
        n,
        occ_opt: max_of(series, "n_opt"),
        occ_mw: max_of(series, "n_mw"),
        top_opt: mode_top(series, SubsystemLabel::Opt),
        top_mw: mode_top(series, SubsystemLabel::Mw),
    }
}

/// Occupation maxima agree to the relative tolerance; tiny occupations are
/// converged by definition.
fn settled(prev: f64, cur: f64) -> bool {
    if cur < 1e-9 {
        return true;
    }
    (cur - prev).abs() <= AUTO_REL_TOL * cur
}

/// Predicted truncation clearing the warning threshold, from the tail decay
/// ratio between the last two rungs. `None` when the tail shows no decay.
fn predict_clearing(n: usize, top_prev: f64, top_cur: f64) -> Option<usize> {
    if top_cur <= 0.0 || top_prev <= 0.0 || top_cur >= top_prev {
        return None;
    }
    let r = top_cur / top_prev;
    let steps = (TOP_FOCK_WARN / top_cur).ln() / r.ln();
    Some(n + (steps * AUTO_STEP as f64).ceil() as usize)
}

fn audit_top_fock(
    row: &ConvergenceRow,
    prev: Option<&ConvergenceRow>,
    warnings: &mut Vec<String>,
) -> bool {
    let mut clean = true;
    let modes = [
        ("optical", row.top_opt, prev.map(|p| p.top_opt)),
        ("microwave", row.top_mw, prev.map(|p| p.top_mw)),
    ];
    for (name, top, top_prev) in modes {
        if top <= TOP_FOCK_WARN {
            continue;
        }
        clean = false;
        let prediction = top_prev
            .and_then(|tp| predict_clearing(row.n, tp, top))
            .map(|n| format!("; the tail slope predicts n of about {n} to clear it"))
            .unwrap_or_default();
        warnings.push(format!(
            "{name} top-Fock population {} exceeds {} at n = {}{}",
            fmt_axis(top),
            fmt_axis(TOP_FOCK_WARN),
            row.n,
            prediction
        ));
    }
    clean
}

/// Adds the mode occupation observers the ladder needs, preserving the
/// configured outputs as a prefix.
fn augment(outputs: &[Observer<Real>]) -> Vec<Observer<Real>> {
    let mut all = outputs.to_vec();
    for extra in [Observer::NOpt, Observer::NMw] {
        if !all.iter().any(|o| o.name() == extra.name()) {
            all.push(extra);
        }
    }
    all
}

/// Runs a scenario under its truncation policy.
pub fn run_scenario(sc: &Scenario) -> CliResult<ScenarioOutcome> {
    match sc.policy {
        Truncation::Fixed => run_fixed(sc),
        Truncation::Auto { start, max } => match sc.mode {
            // a single NV excitation cannot climb the Fock ladder, so the
            // minimal truncation is already exact and laddering it would
            // only repeat the same dynamics at far higher cost
            Mode::Transfer => run_transfer_exact(sc),
            Mode::Entangle => run_ladder(sc, start, max),
            Mode::TotalTimedep => Err(CliError::Config(
                "truncation_policy: the time-dependent model propagates densely and does \
                 not support the auto ladder; use a fixed truncation"
                    .into(),
            )),
        },
    }
}

fn run_fixed(sc: &Scenario) -> CliResult<ScenarioOutcome> {
    let (n_a, n_b) = (sc.params.n_a, sc.params.n_b);
    let series = run_at(sc, n_a, n_b, &sc.outputs)?;
    let mut warnings = Vec::new();
    if !transfer_is_exact(sc, n_a, n_b) {
        for (label, name) in
            [(SubsystemLabel::Opt, "optical"), (SubsystemLabel::Mw, "microwave")]
        {
            let top = mode_top(&series, label);
            if top > TOP_FOCK_WARN {
                warnings.push(format!(
                    "{name} top-Fock population {} exceeds {}; the fixed truncation \
                     looks too small",
                    fmt_axis(top),
                    fmt_axis(TOP_FOCK_WARN)
                ));
            }
        }
    }
    Ok(ScenarioOutcome {
        series,
        n_a,
        n_b,
        requested: sc.outputs.len(),
        convergence: None,
        warnings,
    })
}

/// The transfer chain conserves the total excitation number and starts with
/// at most one quantum, so levels above the first are unreachable and the
/// top-level heuristic would misread the legitimately occupied level 1.
fn transfer_is_exact(sc: &Scenario, n_a: usize, n_b: usize) -> bool {
    sc.mode == Mode::Transfer
        && n_a == 2
        && n_b == 2
        && matches!(
            sc.initial,
            InitialState::NvSuperposition(_) | InitialState::AllGround
        )
}

fn run_transfer_exact(sc: &Scenario) -> CliResult<ScenarioOutcome> {
    let all = augment(&sc.outputs);
    let series = run_at(sc, 2, 2, &all)?;
    let row = measure(&series, 2);
    let report = ConvergenceReport {
        rows: vec![row],
        accepted_n: 2,
        top_fock_clean: true,
        notes: vec![
            "transfer conserves the single initial excitation; n = 2 is exact".into(),
        ],
    };
    Ok(ScenarioOutcome {
        series,
        n_a: 2,
        n_b: 2,
        requested: sc.outputs.len(),
        convergence: Some(report),
        warnings: Vec::new(),
    })
}

fn run_ladder(sc: &Scenario, start: usize, max: usize) -> CliResult<ScenarioOutcome> {
    let all = augment(&sc.outputs);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut prev: Option<ConvergenceRow> = None;
    let mut n = start;
    loop {
        let series = run_at(sc, n, n, &all)?;
        let row = measure(&series, n);
        rows.push(row);

        if let Some(p) = &prev {
            if settled(p.occ_opt, row.occ_opt) && settled(p.occ_mw, row.occ_mw) {
                let mut warnings = Vec::new();
                let clean = audit_top_fock(&row, Some(p), &mut warnings);
                let mut notes = Vec::new();
                if !clean {
                    notes.push(format!(
                        "occupations settled at n = {n}, but a top Fock level still \
                         carries more than {}; treat absolute occupations near the \
                         warning's predicted truncation with care",
                        fmt_axis(TOP_FOCK_WARN)
                    ));
                }
                let report = ConvergenceReport {
                    rows,
                    accepted_n: n,
                    top_fock_clean: clean,
                    notes,
                };
                return Ok(ScenarioOutcome {
                    series,
                    n_a: n,
                    n_b: n,
                    requested: sc.outputs.len(),
                    convergence: Some(report),
                    warnings,
                });
            }
        }

        prev = Some(row);
        n += AUTO_STEP;
        if n > max {
            let table = ConvergenceReport {
                rows,
                accepted_n: 0,
                top_fock_clean: false,
                notes: Vec::new(),
            }
            .table();
            return Err(CliError::Check(format!(
                "auto truncation did not converge: occupation maxima still move more \
                 than {}% between rungs at the ladder cap n = {max}; raise \
                 truncation_policy.max or fix the truncation explicitly\n{table}",
                AUTO_REL_TOL * 100.0
            )));
        }
    }
}
