//! Golden-path reproduction of the four reference figures, with the
//! parameter sets baked in and the quoted peak positions checked.
//!
//! Every figure writes one CSV and one SVG into the output directory; the
//! writers are deterministic, so rerunning a figure reproduces the files
//! byte for byte. Check failures are reported per figure and drive the
//! process exit status, they do not abort the file output.

use std::path::{Path, PathBuf};

use hqsim_core::dynamics::{EvolutionSpec, InitialState, Observer};
use hqsim_core::model::params::ModelParams;
use hqsim_core::observables::transfer_arrival_target;
use hqsim_core::Real;

use crate::config::{Mode, Reduction, Scenario, Sweep, Truncation};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_axis, write_csv, write_svg};
use crate::scenario::run_scenario;
use crate::sweep::run_sweep;

/// Fock truncation baked into the entangling figures. The reference curves
/// live in this truncation regime; the fully converged occupations are
/// documented separately (see the README truncation study).
pub const FIGURE_TRUNCATION: usize = 20;

/// Quoted peak positions: (center, half width).
const FID_PEAK: (f64, f64) = (0.94, 0.02);
const FID_TIME: (f64, f64) = (2.98, 0.10);
const CONC_PEAK_SMALL: (f64, f64) = (0.77, 0.02);
const CONC_TIME_SMALL: (f64, f64) = (2.92, 0.10);
const CONC_PEAK_LARGE: (f64, f64) = (0.65, 0.02);
const CONC_TIME_LARGE: (f64, f64) = (2.62, 0.15);
/// Greatest admissible shift of the concurrence peak between decay sets.
const PEAK_TIME_SHIFT: f64 = 0.5;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            other => Err(CliError::Config(format!(
                "figure: expected fig2, fig3, fig4 or fig5, got {other:?}"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

/// One verified statement about a figure.
pub struct FigureCheck {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

pub struct FigureReport {
    pub id: FigureId,
    pub files: Vec<PathBuf>,
    pub checks: Vec<FigureCheck>,
    pub notes: Vec<String>,
}

impl FigureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    (v - band.0).abs() <= band.1
}

fn peak_check(
    label: &str,
    peak: (f64, f64),
    v_band: (f64, f64),
    t_band: (f64, f64),
) -> FigureCheck {
    let (value, time) = peak;
    let passed = in_band(value, v_band) && in_band(time, t_band);
    FigureCheck {
        label: label.to_string(),
        passed,
        detail: format!(
            "peak {value:.4} at g t = {time:.3}; expected {:.2}±{:.2} at {:.2}±{:.2}",
            v_band.0, v_band.1, t_band.0, t_band.1
        ),
    }
}

/// Transfer reference configuration at the exact truncation.
fn transfer_base() -> Scenario {
    let params = ModelParams::<Real>::default();
    let theta = params.theta;
    Scenario {
        mode: Mode::Transfer,
        params,
        initial: InitialState::NvSuperposition(theta),
        evolution: EvolutionSpec::new(5.0, 1e-3, 50, 1e-6).expect("static spec"),
        outputs: vec![Observer::Fidelity(transfer_arrival_target(theta))],
        policy: Truncation::Fixed,
    }
}

/// Entangling configuration with an explicit decay set.
fn entangle_scenario(kappa1: f64, rest: f64) -> Scenario {
    let mut params = ModelParams::<Real>::default();
    params.gi_lin = 0.5;
    params.kappa1 = kappa1;
    params.gamma1 = rest;
    params.kappa2 = rest;
    params.gamma2 = rest;
    let params = params.with_truncation(FIGURE_TRUNCATION, FIGURE_TRUNCATION);
    Scenario {
        mode: Mode::Entangle,
        params,
        initial: InitialState::AllGround,
        evolution: EvolutionSpec::new(5.0, 5e-3, 10, 1e-6).expect("static spec"),
        outputs: vec![Observer::Concurrence],
        policy: Truncation::Fixed,
    }
}

fn truncation_note() -> String {
    format!(
        "computed at fixed Fock truncation {FIGURE_TRUNCATION}; \
         README.md documents the truncation study"
    )
}

pub fn reproduce_figure(id: FigureId, out_dir: &Path) -> CliResult<FigureReport> {
    std::fs::create_dir_all(out_dir)?;
    match id {
        FigureId::Fig2 => fig2(out_dir),
        FigureId::Fig3 => fig3(out_dir),
        FigureId::Fig4 => fig4(out_dir),
        FigureId::Fig5 => fig5(out_dir),
    }
}

/// Transfer fidelity over time for three electro-optic couplings.
fn fig2(out_dir: &Path) -> CliResult<FigureReport> {
    let sweep = Sweep {
        base: transfer_base(),
        axis: "gi_lin".into(),
        values: vec![0.5, 1.0, 1.5],
        reduction: Reduction::FullCurves,
        observable: "fidelity".into(),
    };
    let outcome = run_sweep(&sweep)?;
    let (times, cols) = outcome.curves()?;

    let csv = out_dir.join("fig2.csv");
    write_csv(&csv, &cols, &times)?;
    let svg = out_dir.join("fig2.svg");
    let series: Vec<(String, &[f64], &[f64])> =
        cols.iter().map(|(n, c)| (n.clone(), times.as_slice(), *c)).collect();
    write_svg(&svg, "g t", "fidelity", &series)?;

    let mut notes = Vec::new();
    let mut matching = Vec::new();
    let mut reference_peak = None;
    for (&v, m) in outcome.values.iter().zip(&outcome.members) {
        let peak = m.series.peak("fidelity").expect("recorded");
        notes.push(format!(
            "gi_lin = {}: peak {:.4} at g t = {:.3}",
            fmt_axis(v),
            peak.0,
            peak.1
        ));
        if in_band(peak.0, FID_PEAK) && in_band(peak.1, FID_TIME) {
            matching.push(v);
        }
        if v == 1.0 {
            reference_peak = Some(peak);
        }
    }
    let check = peak_check(
        "fidelity peak on the gi_lin = 1 curve",
        reference_peak.expect("value 1 is in the sweep"),
        FID_PEAK,
        FID_TIME,
    );
    if !check.passed {
        notes.push(if matching.is_empty() {
            "no curve in the sweep matches both quoted bands".to_string()
        } else {
            let list: Vec<String> = matching.iter().map(|&v| fmt_axis(v)).collect();
            format!(
                "the quoted peak appears on the gi_lin = {} curve(s) instead",
                list.join(", ")
            )
        });
    }

    Ok(FigureReport { id: FigureId::Fig2, files: vec![csv, svg], checks: vec![check], notes })
}

/// Concurrence over time, small decay.
fn fig3(out_dir: &Path) -> CliResult<FigureReport> {
    let outcome = run_scenario(&entangle_scenario(0.1, 0.01))?;
    let times = &outcome.series.times;
    let col = outcome.series.column("concurrence").expect("recorded");

    let csv = out_dir.join("fig3.csv");
    write_csv(&csv, &[("concurrence".into(), col)], times)?;
    let svg = out_dir.join("fig3.svg");
    write_svg(&svg, "g t", "concurrence", &[("concurrence".into(), times.as_slice(), col)])?;

    let check = peak_check(
        "concurrence peak, small decay",
        outcome.series.peak("concurrence").expect("recorded"),
        CONC_PEAK_SMALL,
        CONC_TIME_SMALL,
    );
    Ok(FigureReport {
        id: FigureId::Fig3,
        files: vec![csv, svg],
        checks: vec![check],
        notes: vec![truncation_note()],
    })
}

/// Concurrence over time for five superconducting-side couplings.
fn fig4(out_dir: &Path) -> CliResult<FigureReport> {
    let sweep = Sweep {
        base: entangle_scenario(0.1, 0.01),
        axis: "g2".into(),
        values: vec![0.5, 0.75, 1.0, 1.25, 1.5],
        reduction: Reduction::FullCurves,
        observable: "concurrence".into(),
    };
    let outcome = run_sweep(&sweep)?;
    let (times, cols) = outcome.curves()?;

    let csv = out_dir.join("fig4.csv");
    write_csv(&csv, &cols, &times)?;
    let svg = out_dir.join("fig4.svg");
    let series: Vec<(String, &[f64], &[f64])> =
        cols.iter().map(|(n, c)| (n.clone(), times.as_slice(), *c)).collect();
    write_svg(&svg, "g t", "concurrence", &series)?;

    let peak_at = |target: f64| -> f64 {
        outcome
            .values
            .iter()
            .zip(&outcome.members)
            .find(|(&v, _)| v == target)
            .map(|(_, m)| m.series.peak("concurrence").expect("recorded").0)
            .expect("value is in the sweep")
    };
    let (lo, mid, hi) = (peak_at(0.5), peak_at(1.0), peak_at(1.5));
    let check = FigureCheck {
        label: "peak concurrence maximal at the symmetric coupling g2 = 1".into(),
        passed: mid > lo && mid > hi,
        detail: format!("peaks: {lo:.4} at g2 = 0.5, {mid:.4} at g2 = 1, {hi:.4} at g2 = 1.5"),
    };
    Ok(FigureReport {
        id: FigureId::Fig4,
        files: vec![csv, svg],
        checks: vec![check],
        notes: vec![truncation_note()],
    })
}

/// Concurrence over time for the small and large decay sets.
fn fig5(out_dir: &Path) -> CliResult<FigureReport> {
    let small = run_scenario(&entangle_scenario(0.1, 0.01))?;
    let large = run_scenario(&entangle_scenario(0.3, 0.03))?;
    if small.series.times != large.series.times {
        return Err(CliError::Runtime("decay runs recorded on different grids".into()));
    }
    let times = &small.series.times;
    let col_s = small.series.column("concurrence").expect("recorded");
    let col_l = large.series.column("concurrence").expect("recorded");

    let cols = [
        ("concurrence_small_decay".to_string(), col_s),
        ("concurrence_large_decay".to_string(), col_l),
    ];
    let csv = out_dir.join("fig5.csv");
    write_csv(&csv, &cols, times)?;
    let svg = out_dir.join("fig5.svg");
    let series: Vec<(String, &[f64], &[f64])> =
        cols.iter().map(|(n, c)| (n.clone(), times.as_slice(), *c)).collect();
    write_svg(&svg, "g t", "concurrence", &series)?;

    let peak_s = small.series.peak("concurrence").expect("recorded");
    let peak_l = large.series.peak("concurrence").expect("recorded");
    let shift = (peak_s.1 - peak_l.1).abs();
    let checks = vec![
        peak_check(
            "concurrence peak, large decay",
            peak_l,
            CONC_PEAK_LARGE,
            CONC_TIME_LARGE,
        ),
        FigureCheck {
            label: "peak time insensitive to the decay set".into(),
            passed: shift <= PEAK_TIME_SHIFT,
            detail: format!(
                "peak times {:.3} (small) vs {:.3} (large), shift {shift:.3} <= {PEAK_TIME_SHIFT}",
                peak_s.1, peak_l.1
            ),
        },
    ];
    Ok(FigureReport {
        id: FigureId::Fig5,
        files: vec![csv, svg],
        checks,
        notes: vec![truncation_note()],
    })
}
