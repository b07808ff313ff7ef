use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lrpulse::commands::{self, Table};
use lrpulse::formats::write_json;
use lrpulse::verify;
use lrpulse::{parse_fraction, CliError, CliResult, RunConfig, StrategyTag};

/// Invariant-based pulse design for a three-level Λ system without the
/// rotating-wave approximation.
#[derive(Debug, Parser)]
#[command(name = "lrpulse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Calibrated ωT for the strategy-A (I) or strategy-B (II) table.
    Tables {
        #[arg(long, value_enum)]
        which: Table,
        #[arg(long)]
        out: PathBuf,
        /// Calibration bracket width in units of π.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Write a schedule CSV.
    Synth {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples_per_period: usize,
        /// JSON summary path; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Propagate a schedule and write populations.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        /// JSON summary path; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the verification suites; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Verify the samples of this schedule file instead of a config.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// JSON report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ω₀/ω giving a per-period Δε for strategy C.
    CalibrateC {
        /// Target Δε in units of π, e.g. `1/6`.
        #[arg(long, value_parser = parse_fraction)]
        target: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyTag>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Strategy-B half-width δt in units of T.
    #[arg(long)]
    delta_t: Option<f64>,
    #[arg(long)]
    neglect_imag: bool,
    #[arg(long)]
    omega0_over_omega: Option<f64>,
    /// Strategy-C per-period Δε in units of π, e.g. `1/6`.
    #[arg(long, value_parser = parse_fraction)]
    target: Option<f64>,
    #[arg(long)]
    n_periods: Option<usize>,
    /// ωT in units of π; skips calibration for A and B.
    #[arg(long)]
    omega_t: Option<f64>,
    /// Carrier ω for strategy C.
    #[arg(long)]
    omega: Option<f64>,
    /// Total time T for strategies A and B.
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    steps_per_period: Option<usize>,
    #[arg(long)]
    record_stride: Option<usize>,
    /// Calibration tolerance (ωT bracket in units of π, or Ω₀/ω bracket).
    #[arg(long)]
    tol: Option<f64>,
}

impl RunArgs {
    fn flags(&self) -> RunConfig {
        RunConfig {
            strategy: self.strategy,
            a: self.a,
            b: self.b,
            delta_t_over_t: self.delta_t,
            neglect_imag: self.neglect_imag.then_some(true),
            omega0_over_omega: self.omega0_over_omega,
            target_delta_epsilon_over_pi: self.target,
            n_periods: self.n_periods,
            omega_t_over_pi: self.omega_t,
            period: self.period,
            omega: self.omega,
            steps_per_period: self.steps_per_period,
            record_stride: self.record_stride,
            calibration_tol: self.tol,
        }
    }

    fn config(&self) -> CliResult<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(&self.flags()))
    }
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Tables { which, out, tol } => emit(&commands::tables(which, &out, tol)?, None),
        Command::Synth { run, out, samples_per_period, summary } => {
            let plan = run.config()?.resolve()?;
            emit(&commands::synth(&plan, &out, samples_per_period)?, summary.as_deref())
        }
        Command::Simulate { run, out, summary } => {
            let config = run.config()?;
            let plan = config.resolve()?;
            let (_, s) = commands::simulate(&plan, &config, &out)?;
            emit(&s, summary.as_deref())
        }
        Command::Verify { run, schedule, out } => {
            let report = match schedule {
                Some(path) => {
                    let flags = run.config()?;
                    if flags != RunConfig::default() {
                        return Err(CliError::Validation(
                            "--schedule takes its parameters from the file header".into(),
                        ));
                    }
                    verify::verify_file(&path)?
                }
                None => verify::verify_plan(&run.config()?.resolve()?)?,
            };
            emit(&report, out.as_deref())?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(report.failed()))
            }
        }
        Command::CalibrateC { target, tol } => emit(&commands::calibrate_c(target, tol)?, None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
