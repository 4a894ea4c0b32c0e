//! Scenario and sweep configuration: a small TOML schema mirroring the model
//! parameters by their exact field names, with mode-dependent defaults.
//!
//! A scenario file looks like
//!
//! ```toml
//! mode = "entangle"            # transfer | entangle | total_timedep
//!
//! [params]                     # any subset; unset fields take mode defaults
//! gi_lin = 0.5
//! kappa1 = 0.1
//!
//! [initial]                    # optional; see the mode rules below
//! kind = "all_ground"          # nv_superposition | all_ground | explicit
//!
//! [evolution]
//! t_final = 5.0
//! dt = 0.005
//! record_stride = 10
//!
//! outputs = ["concurrence", "n_opt", "n_mw"]
//!
//! [truncation_policy]
//! kind = "auto"                # fixed | auto
//! start = 20
//! max = 100
//! ```
//!
//! Mode rules: `transfer` requires (and defaults to) an `nv_superposition`
//! initial state and pins the truncation to the exact single-excitation
//! value `n_a = n_b = 2` unless told otherwise; `entangle` defaults to
//! `all_ground` with the auto truncation ladder; `total_timedep` propagates
//! the explicitly time-dependent chain and defaults to the fixed truncation
//! taken from `params`.

use hqsim_core::dynamics::{EvolutionSpec, InitialState, Observer};
use hqsim_core::model::params::ModelParams;
use hqsim_core::observables::transfer_arrival_target;
use hqsim_core::Real;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Occupation maxima must move less than this fraction between ladder rungs.
pub const AUTO_REL_TOL: f64 = 0.05;
/// Ladder increment of the auto policy.
pub const AUTO_STEP: usize = 5;
/// Default starting truncation of the auto policy.
pub const AUTO_START: usize = 20;
/// Default ladder cap; hitting it without occupation convergence is an error.
pub const AUTO_MAX: usize = 100;
/// Top Fock level population above this is flagged as truncation suspicion.
pub const TOP_FOCK_WARN: f64 = 1e-4;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    mode: String,
    #[serde(default)]
    params: ParamsPatch,
    initial: Option<InitialFile>,
    evolution: Option<EvolutionFile>,
    outputs: Option<Vec<String>>,
    truncation_policy: Option<TruncationFile>,
}

/// Optional overlay on the model parameters, field for field.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ParamsPatch {
    g1: Option<f64>,
    g2: Option<f64>,
    gi_lin: Option<f64>,
    kappa1: Option<f64>,
    gamma1: Option<f64>,
    kappa2: Option<f64>,
    gamma2: Option<f64>,
    omega_b: Option<f64>,
    delta: Option<f64>,
    theta: Option<f64>,
    n_a: Option<usize>,
    n_b: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    kind: String,
    theta: Option<f64>,
    amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolutionFile {
    t_final: Option<f64>,
    dt: Option<f64>,
    record_stride: Option<usize>,
    tolerance_trace: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncationFile {
    kind: String,
    n: Option<usize>,
    start: Option<usize>,
    max: Option<usize>,
}

/// Which interaction model a scenario propagates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Transfer,
    Entangle,
    TotalTimedep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Transfer => "transfer",
            Mode::Entangle => "entangle",
            Mode::TotalTimedep => "total_timedep",
        }
    }
}

/// Fock truncation policy. `Fixed` uses `params.n_a` / `params.n_b`
/// verbatim; `Auto` ladders both truncations together until the occupation
/// maxima settle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Truncation {
    Fixed,
    Auto { start: usize, max: usize },
}

/// Fully resolved scenario, ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub mode: Mode,
    pub params: ModelParams<Real>,
    pub initial: InitialState<Real>,
    pub evolution: EvolutionSpec<Real>,
    /// Observables to record and write out, in order.
    pub outputs: Vec<Observer<Real>>,
    pub policy: Truncation,
}

impl Scenario {
    /// Parses and validates a scenario from TOML text.
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        let n = fixed_n(&file);
        resolve(file)?.apply_fixed_shorthand(n)
    }

    /// Rewrites both truncations from the `truncation_policy.n` shorthand.
    fn apply_fixed_shorthand(mut self, n: Option<usize>) -> CliResult<Self> {
        if let Some(n) = n {
            self.params = self.params.with_truncation(n, n);
            self.params
                .validate()
                .map_err(|e| CliError::Config(format!("truncation_policy.n: {e}")))?;
        }
        Ok(self)
    }
}

fn resolve(file: ScenarioFile) -> CliResult<Scenario> {
    let mode = match file.mode.as_str() {
        "transfer" => Mode::Transfer,
        "entangle" => Mode::Entangle,
        "total_timedep" => Mode::TotalTimedep,
        other => {
            return Err(CliError::Config(format!(
                "mode: expected transfer, entangle or total_timedep, got {other:?}"
            )))
        }
    };

    let params = resolve_params(mode, &file.params)?;
    let policy = resolve_policy(mode, &file)?;
    let initial = resolve_initial(mode, policy, &params, file.initial.as_ref())?;
    let evolution = resolve_evolution(mode, &params, file.evolution.as_ref())?;
    let outputs = resolve_outputs(mode, &initial, file.outputs.as_deref())?;

    Ok(Scenario { mode, params, initial, evolution, outputs, policy })
}

fn resolve_params(mode: Mode, patch: &ParamsPatch) -> CliResult<ModelParams<Real>> {
    let mut p = ModelParams::default();
    // the entangling reference configuration runs at half the qubit coupling
    if mode == Mode::Entangle {
        p.gi_lin = 0.5;
    }
    if let Some(v) = patch.g1 {
        p.g1 = v;
    }
    if let Some(v) = patch.g2 {
        p.g2 = v;
    }
    if let Some(v) = patch.gi_lin {
        p.gi_lin = v;
    }
    if let Some(v) = patch.kappa1 {
        p.kappa1 = v;
    }
    if let Some(v) = patch.gamma1 {
        p.gamma1 = v;
    }
    if let Some(v) = patch.kappa2 {
        p.kappa2 = v;
    }
    if let Some(v) = patch.gamma2 {
        p.gamma2 = v;
    }
    if let Some(v) = patch.omega_b {
        p.omega_b = v;
        // keep the default resonance condition unless delta is set explicitly
        if patch.delta.is_none() {
            p.delta = v;
        }
    }
    if let Some(v) = patch.delta {
        p.delta = v;
    }
    if let Some(v) = patch.theta {
        p.theta = v;
    }
    if let Some(n) = patch.n_a {
        p.n_a = n;
    }
    if let Some(n) = patch.n_b {
        p.n_b = n;
    }
    p.validate().map_err(|e| CliError::Config(format!("params: {e}")))?;
    Ok(p)
}

fn resolve_policy(mode: Mode, file: &ScenarioFile) -> CliResult<Truncation> {
    let Some(tp) = &file.truncation_policy else {
        // transfer conserves the single initial excitation, so n = 2 is
        // already exact and the ladder would only waste work
        return Ok(match mode {
            Mode::Transfer | Mode::TotalTimedep => Truncation::Fixed,
            Mode::Entangle => Truncation::Auto { start: AUTO_START, max: AUTO_MAX },
        });
    };
    match tp.kind.as_str() {
        "fixed" => {
            if tp.start.is_some() || tp.max.is_some() {
                return Err(CliError::Config(
                    "truncation_policy: start/max apply to kind = \"auto\" only".into(),
                ));
            }
            // a bare n is shorthand for a symmetric truncation
            if tp.n.is_some() && (file.params.n_a.is_some() || file.params.n_b.is_some()) {
                return Err(CliError::Config(
                    "truncation_policy: give either n here or n_a/n_b under params, not both"
                        .into(),
                ));
            }
            Ok(Truncation::Fixed)
        }
        "auto" => {
            if tp.n.is_some() {
                return Err(CliError::Config(
                    "truncation_policy: n applies to kind = \"fixed\"; auto takes start/max"
                        .into(),
                ));
            }
            if file.params.n_a.is_some() || file.params.n_b.is_some() {
                return Err(CliError::Config(
                    "truncation_policy: the auto ladder owns n_a/n_b; remove them from params"
                        .into(),
                ));
            }
            let start = tp.start.unwrap_or(AUTO_START);
            let max = tp.max.unwrap_or(AUTO_MAX);
            if start < 2 {
                return Err(CliError::Config(
                    "truncation_policy: start must be at least 2".into(),
                ));
            }
            if max < start + AUTO_STEP {
                return Err(CliError::Config(format!(
                    "truncation_policy: max must leave room for at least one ladder step \
                     (start + {AUTO_STEP} = {})",
                    start + AUTO_STEP
                )));
            }
            Ok(Truncation::Auto { start, max })
        }
        other => Err(CliError::Config(format!(
            "truncation_policy.kind: expected fixed or auto, got {other:?}"
        ))),
    }
}

/// The fixed-n shorthand from a `truncation_policy` table, if any.
fn fixed_n(file: &ScenarioFile) -> Option<usize> {
    file.truncation_policy.as_ref().and_then(|tp| tp.n)
}

fn resolve_initial(
    mode: Mode,
    policy: Truncation,
    params: &ModelParams<Real>,
    spec: Option<&InitialFile>,
) -> CliResult<InitialState<Real>> {
    if let Some(s) = spec {
        // reject fields that would be silently ignored
        if s.kind != "nv_superposition" && s.theta.is_some() {
            return Err(CliError::Config(
                "initial.theta: applies to kind = \"nv_superposition\" only".into(),
            ));
        }
        if s.kind != "explicit" && s.amplitudes.is_some() {
            return Err(CliError::Config(
                "initial.amplitudes: applies to kind = \"explicit\" only".into(),
            ));
        }
    }
    let kind = spec.map(|s| s.kind.as_str());
    match (mode, kind) {
        (Mode::Transfer, None | Some("nv_superposition")) => {
            let theta = spec.and_then(|s| s.theta).unwrap_or(params.theta);
            Ok(InitialState::NvSuperposition(theta))
        }
        (Mode::Transfer, Some(other)) => Err(CliError::Config(format!(
            "initial.kind: transfer encodes the qubit in the NV superposition; \
             {other:?} is not a transfer initial state"
        ))),
        (_, None | Some("all_ground")) => Ok(InitialState::AllGround),
        (_, Some("nv_superposition")) => {
            let theta = spec.and_then(|s| s.theta).unwrap_or(params.theta);
            Ok(InitialState::NvSuperposition(theta))
        }
        (_, Some("explicit")) => {
            if matches!(policy, Truncation::Auto { .. }) {
                return Err(CliError::Config(
                    "initial.kind: explicit amplitudes fix the dimension, which the auto \
                     truncation ladder would change; use a fixed truncation"
                        .into(),
                ));
            }
            let amps = spec
                .and_then(|s| s.amplitudes.as_ref())
                .ok_or_else(|| {
                    CliError::Config("initial.amplitudes: required for kind = \"explicit\"".into())
                })?;
            let dim = 4 * params.n_a * params.n_b;
            if amps.len() != dim {
                return Err(CliError::Config(format!(
                    "initial.amplitudes: {} entries for layout dimension {dim}",
                    amps.len()
                )));
            }
            let v: Vec<hqsim_core::Cplx> =
                amps.iter().map(|&[re, im]| hqsim_core::Cplx::new(re, im)).collect();
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(CliError::Config(format!(
                    "initial.amplitudes: norm^2 = {norm:.12}, expected 1"
                )));
            }
            Ok(InitialState::Pure(v))
        }
        (_, Some(other)) => Err(CliError::Config(format!(
            "initial.kind: expected nv_superposition, all_ground or explicit, got {other:?}"
        ))),
    }
}

fn resolve_evolution(
    mode: Mode,
    params: &ModelParams<Real>,
    spec: Option<&EvolutionFile>,
) -> CliResult<EvolutionSpec<Real>> {
    let default_dt = match mode {
        Mode::Transfer => 1e-3,
        Mode::Entangle => 5e-3,
        // the time-dependent integrator needs many steps per fast period
        Mode::TotalTimedep => (0.02 / params.omega_b).min(1e-3),
    };
    let t_final = spec.and_then(|s| s.t_final).unwrap_or(5.0);
    let dt = spec.and_then(|s| s.dt).unwrap_or(default_dt);
    let stride = spec.and_then(|s| s.record_stride).unwrap_or_else(|| {
        // aim for samples every 0.05 time units
        ((0.05 / dt).round() as usize).max(1)
    });
    let tol = spec.and_then(|s| s.tolerance_trace).unwrap_or(1e-6);
    if mode == Mode::TotalTimedep && dt > 0.02 / params.omega_b {
        return Err(CliError::Config(format!(
            "evolution.dt: the time-dependent model needs dt <= 0.02 / omega_b = {:.2e}",
            0.02 / params.omega_b
        )));
    }
    EvolutionSpec::new(t_final, dt, stride, tol)
        .map_err(|e| CliError::Config(format!("evolution: {e}")))
}

fn resolve_outputs(
    mode: Mode,
    initial: &InitialState<Real>,
    names: Option<&[String]>,
) -> CliResult<Vec<Observer<Real>>> {
    let default: &[&str] = match (mode, initial) {
        (Mode::Transfer, _) => &["fidelity"],
        (Mode::TotalTimedep, InitialState::NvSuperposition(_)) => &["fidelity"],
        _ => &["concurrence", "n_opt", "n_mw"],
    };
    let owned: Vec<String>;
    let requested: &[String] = match names {
        Some(list) if !list.is_empty() => list,
        Some(_) => return Err(CliError::Config("outputs: must not be empty".into())),
        None => {
            owned = default.iter().map(|s| s.to_string()).collect();
            &owned
        }
    };

    let mut out = Vec::with_capacity(requested.len());
    for name in requested {
        let obs = match name.as_str() {
            "fidelity" => {
                let theta = match initial {
                    InitialState::NvSuperposition(t) => *t,
                    _ => {
                        return Err(CliError::Config(
                            "outputs: fidelity tracks the transferred NV superposition and \
                             needs an nv_superposition initial state"
                                .into(),
                        ))
                    }
                };
                Observer::Fidelity(transfer_arrival_target(theta))
            }
            "concurrence" => Observer::Concurrence,
            "n_opt" => Observer::NOpt,
            "n_mw" => Observer::NMw,
            "trace" => Observer::Trace,
            "purity" => Observer::Purity,
            other => {
                return Err(CliError::Config(format!(
                    "outputs: unknown observable {other:?}; expected fidelity, concurrence, \
                     n_opt, n_mw, trace or purity"
                )))
            }
        };
        out.push(obs);
    }
    Ok(out)
}

/// How a sweep condenses each member run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reduction {
    PeakValue,
    PeakTime,
    FullCurves,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    axis: String,
    values: Vec<f64>,
    reduction: String,
    observable: Option<String>,
    base: toml::Value,
}

/// A validated sweep: the base scenario, the parameter axis, and the values
/// to visit in ascending order.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub base: Scenario,
    pub axis: String,
    pub values: Vec<f64>,
    pub reduction: Reduction,
    /// Column the peak reductions condense; defaults to the first output.
    pub observable: String,
}

/// Real-valued model fields a sweep may scan.
pub const SWEEP_AXES: [&str; 10] = [
    "g1", "g2", "gi_lin", "kappa1", "gamma1", "kappa2", "gamma2", "omega_b", "delta", "theta",
];

/// Overwrites one named field; the single place mapping axis names to fields.
pub fn apply_axis(p: &mut ModelParams<Real>, axis: &str, value: f64) {
    match axis {
        "g1" => p.g1 = value,
        "g2" => p.g2 = value,
        "gi_lin" => p.gi_lin = value,
        "kappa1" => p.kappa1 = value,
        "gamma1" => p.gamma1 = value,
        "kappa2" => p.kappa2 = value,
        "gamma2" => p.gamma2 = value,
        "omega_b" => p.omega_b = value,
        "delta" => p.delta = value,
        "theta" => p.theta = value,
        _ => unreachable!("axis validated at parse time"),
    }
}

impl Sweep {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let file: SweepFile =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        if !SWEEP_AXES.contains(&file.axis.as_str()) {
            return Err(CliError::Config(format!(
                "axis: {:?} is not a real-valued model parameter; expected one of {}",
                file.axis,
                SWEEP_AXES.join(", ")
            )));
        }
        if file.values.is_empty() {
            return Err(CliError::Config("values: must not be empty".into()));
        }
        for v in &file.values {
            if !v.is_finite() {
                return Err(CliError::Config(format!("values: {v} is not finite")));
            }
        }
        let reduction = match file.reduction.as_str() {
            "peak_value" => Reduction::PeakValue,
            "peak_time" => Reduction::PeakTime,
            "full_curves" => Reduction::FullCurves,
            other => {
                return Err(CliError::Config(format!(
                    "reduction: expected peak_value, peak_time or full_curves, got {other:?}"
                )))
            }
        };

        let base_text = toml::to_string(&file.base)
            .map_err(|e| CliError::Config(format!("base: {e}")))?;
        let base = Scenario::from_toml(&base_text)
            .map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("base: {m}")),
                other => other,
            })?;

        // every member must accept every sweep value up front
        for &v in &file.values {
            let mut p = base.params.clone();
            apply_axis(&mut p, &file.axis, v);
            p.validate().map_err(|e| {
                CliError::Config(format!("values: {v} rejected by the model: {e}"))
            })?;
        }

        let observable = match file.observable {
            Some(name) => {
                if !base.outputs.iter().any(|o| o.name() == name) {
                    return Err(CliError::Config(format!(
                        "observable: {name:?} is not among the base outputs"
                    )));
                }
                name
            }
            None => base.outputs[0].name().to_string(),
        };

        let mut values = file.values;
        values.sort_by(|a, b| a.partial_cmp(b).expect("finiteness checked"));

        Ok(Sweep { base, axis: file.axis, values, reduction, observable })
    }
}

