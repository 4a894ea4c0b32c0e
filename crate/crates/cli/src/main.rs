use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hqsim_cli::config::{Reduction, Scenario, Sweep, Truncation};
use hqsim_cli::couplings::coupling_report;
use hqsim_cli::error::{CliError, CliResult};
use hqsim_cli::figures::{reproduce_figure, FigureId};
use hqsim_cli::output::{fmt_axis, write_csv, write_svg, write_table};
use hqsim_cli::scenario::{run_scenario, ScenarioOutcome};
use hqsim_cli::studies::{run_study, StudyKind};
use hqsim_cli::sweep::run_sweep;

use hqsim_core::model::PhysicalParams;

/// Hybrid-chain simulator: photon-mediated state transfer and entanglement
/// between an NV center and a superconducting qubit.
#[derive(Parser)]
#[command(name = "hqsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write its time series.
    Simulate {
        /// Scenario TOML file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write an SVG line plot.
        #[arg(long)]
        svg: bool,
        /// Base name for the emitted files.
        #[arg(long, default_value = "scenario")]
        name: String,
    },
    /// Run a parameter sweep over a scenario.
    Sweep {
        /// Sweep TOML file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value = "sweep")]
        name: String,
    },
    /// Reproduce a reference figure and check its peaks.
    Figure {
        /// One of fig2, fig3, fig4, fig5.
        #[arg(value_parser = ["fig2", "fig3", "fig4", "fig5"])]
        id: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a validation study and report measured errors.
    Validate {
        /// One of oracle, rwa, adiabatic.
        #[arg(value_parser = ["oracle", "rwa", "adiabatic"])]
        study: String,
    },
    /// Print coupling-rate estimates for a physical device set.
    Couplings(CouplingArgs),
}

/// Physical device parameters; defaults describe the reference device.
/// Frequencies and rates are angular [rad/s], lengths are meters.
#[derive(clap::Args)]
struct CouplingArgs {
    /// Optical angular frequency [rad/s].
    #[arg(long)]
    omega_a: Option<f64>,
    /// Microwave angular frequency [rad/s].
    #[arg(long)]
    omega_b: Option<f64>,
    /// Refractive index.
    #[arg(long)]
    n_refr: Option<f64>,
    /// Electro-optic coefficient [m/V].
    #[arg(long)]
    c_eo: Option<f64>,
    /// Modulator length [m].
    #[arg(long)]
    length_l: Option<f64>,
    /// Modulator thickness [m].
    #[arg(long)]
    thickness_d: Option<f64>,
    /// Ratio l / (c tau).
    #[arg(long)]
    tau_fraction: Option<f64>,
    /// Resonator capacitance [F].
    #[arg(long)]
    capacitance: Option<f64>,
    /// Intracavity drive amplitude |alpha_a|.
    #[arg(long)]
    alpha_a: Option<f64>,
    /// Classical Rabi drive [rad/s].
    #[arg(long)]
    omega_rabi: Option<f64>,
    /// Bare NV-cavity coupling [rad/s].
    #[arg(long)]
    g_e0: Option<f64>,
    /// Excited-state detuning [rad/s].
    #[arg(long)]
    delta_e: Option<f64>,
    /// Reference coupling g / 2 pi [Hz]; adds a dimensionless column.
    #[arg(long)]
    g_ref: Option<f64>,
}

impl CouplingArgs {
    fn params(&self) -> PhysicalParams<f64> {
        let mut p = PhysicalParams::device_defaults();
        macro_rules! patch {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        patch!(
            omega_a, omega_b, n_refr, c_eo, length_l, thickness_d, tau_fraction,
            capacitance, alpha_a, omega_rabi, g_e0, delta_e
        );
        p
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate { config, out, svg, name } => simulate(&config, &out, svg, &name),
        Command::Sweep { config, out, svg, name } => sweep(&config, &out, svg, &name),
        Command::Figure { id, out } => figure(&id, &out),
        Command::Validate { study } => validate(&study),
        Command::Couplings(args) => couplings(&args),
    }
}

fn read_config(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn print_outcome(oc: &ScenarioOutcome, sc: &Scenario) {
    println!("mode: {}", sc.mode.name());
    match sc.policy {
        Truncation::Fixed => println!("truncation: fixed n_a = {}, n_b = {}", oc.n_a, oc.n_b),
        Truncation::Auto { .. } => println!("truncation: auto, accepted n = {}", oc.n_a),
    }
    if let Some(report) = &oc.convergence {
        print!("{}", report.table());
        for note in &report.notes {
            println!("note: {note}");
        }
    }
    for w in &oc.warnings {
        println!("warning: {w}");
    }
    for (name, v, t) in oc.peaks() {
        println!("peak {name}: {v:.6} at g t = {t:.4}");
    }
}

/// Columns for the configured outputs only, dropping internal extras.
fn requested_columns<'a>(oc: &'a ScenarioOutcome) -> Vec<(String, &'a [f64])> {
    oc.output_names()
        .iter()
        .map(|&n| (n.to_string(), oc.series.column(n).expect("recorded column")))
        .collect()
}

fn simulate(config: &Path, out: &Path, svg: bool, name: &str) -> CliResult<()> {
    let sc = Scenario::from_toml(&read_config(config)?)?;
    let oc = run_scenario(&sc)?;
    fs::create_dir_all(out)?;

    let columns = requested_columns(&oc);
    let csv = out.join(format!("{name}.csv"));
    write_csv(&csv, &columns, &oc.series.times)?;
    print_outcome(&oc, &sc);
    println!("wrote {}", csv.display());
    if svg {
        let series: Vec<(String, &[f64], &[f64])> = columns
            .iter()
            .map(|(n, c)| (n.clone(), oc.series.times.as_slice(), *c))
            .collect();
        let path = out.join(format!("{name}.svg"));
        write_svg(&path, "g t", "observable", &series)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep(config: &Path, out: &Path, svg: bool, name: &str) -> CliResult<()> {
    let sw = Sweep::from_toml(&read_config(config)?)?;
    let so = run_sweep(&sw)?;
    fs::create_dir_all(out)?;

    for (value, member) in so.values.iter().zip(&so.members) {
        for (obs, v, t) in member.peaks() {
            println!(
                "{} = {}: peak {obs} = {v:.6} at g t = {t:.4}",
                so.axis,
                fmt_axis(*value)
            );
        }
    }

    let csv = out.join(format!("{name}.csv"));
    match so.reduction {
        Reduction::FullCurves => {
            let (times, named) = so.curves()?;
            write_csv(&csv, &named, &times)?;
            if svg {
                let series: Vec<(String, &[f64], &[f64])> =
                    named.iter().map(|(n, c)| (n.clone(), times.as_slice(), *c)).collect();
                let path = out.join(format!("{name}.svg"));
                write_svg(&path, "g t", &so.observable, &series)?;
                println!("wrote {}", path.display());
            }
        }
        Reduction::PeakValue | Reduction::PeakTime => {
            let value_col = match so.reduction {
                Reduction::PeakTime => "peak_time",
                _ => "peak_value",
            };
            let rows: Vec<Vec<f64>> =
                so.reduced_rows().into_iter().map(|(x, y)| vec![x, y]).collect();
            write_table(&csv, &[&so.axis, value_col], &rows)?;
            if svg {
                let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
                let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
                let series = [(so.observable.clone(), xs.as_slice(), ys.as_slice())];
                let path = out.join(format!("{name}.svg"));
                write_svg(&path, &so.axis, value_col, &series)?;
                println!("wrote {}", path.display());
            }
        }
    }
    println!("wrote {}", csv.display());
    Ok(())
}

fn figure(id: &str, out: &Path) -> CliResult<()> {
    let id = FigureId::parse(id)?;
    let report = reproduce_figure(id, out)?;
    for c in &report.checks {
        let tag = if c.passed { "pass" } else { "FAIL" };
        println!("[{tag}] {}: {}", c.label, c.detail);
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    if report.passed() {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(CliError::Check(format!(
            "{}: {failed} of {} checks failed",
            report.id.name(),
            report.checks.len()
        )))
    }
}

fn validate(study: &str) -> CliResult<()> {
    let report = run_study(StudyKind::parse(study)?)?;
    for l in &report.lines {
        let tag = if l.passed { "pass" } else { "FAIL" };
        println!("[{tag}] {}: {}", l.label, l.detail);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} study failed", report.name)))
    }
}

fn couplings(args: &CouplingArgs) -> CliResult<()> {
    let report = coupling_report(&args.params(), args.g_ref)?;
    for line in report.render() {
        println!("{line}");
    }
    Ok(())
}
