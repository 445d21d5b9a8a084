//! `calabi` command-line front end.
//!
//! Exit codes: 0 success, 1 solver error, 2 verification failure, 3 usage
//! error. `CALABI_LOG_LEVEL` sets the log filter.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, Format, PartialConfig, RunConfig};
use crate::error::{Error, Result};
use crate::report::{
    conical_run, line_run, plot_data, probe_run, smooth_run, sweep, verify, write_sweep_csv, ReportEnvelope,
    RunResults, Timings,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "calabi", version, about = "Shooting solver and verifier for conical higher cscK momentum profiles")]
struct Cli {
    /// TOML file with defaults for any of the run options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Solve the conical problem for one (m, beta0).
    SolveConical(Opts),
    /// Solve the smooth higher-extremal problem for one m.
    SolveSmooth(Opts),
    /// Recheck a saved JSON report.
    Verify(Opts),
    /// Solve every (m, beta0) pair of the given lists.
    Sweep(Opts),
    /// Cone-angle line for one m.
    Line(Opts),
    /// Compare the conical solution with the cone-angle line.
    Probe(Opts),
}

#[derive(Debug, Args, Default)]
struct Opts {
    /// Kähler class parameter; comma-separated list for sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    m: Option<Vec<f64>>,
    /// Cone angle along the zero divisor; comma-separated list for sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta0: Option<Vec<f64>>,
    /// Relative tolerance on the boundary residual.
    #[arg(long)]
    tol: Option<f64>,
    /// Points of the uniform output grid.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Gauss-Legendre panels for the invariant quadratures.
    #[arg(long)]
    quad_panels: Option<usize>,
    /// Report destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Report to check (verify only).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory for TSV plot columns.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// json or csv (csv for sweep only).
    #[arg(long)]
    format: Option<Format>,
}

impl From<Opts> for PartialConfig {
    fn from(o: Opts) -> Self {
        PartialConfig {
            m: o.m,
            beta0: o.beta0,
            tol: o.tol,
            grid_n: o.grid_n,
            quad_panels: o.quad_panels,
            output: o.output,
            input: o.input,
            plot_dir: o.plot_dir,
            format: o.format,
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("CALABI_LOG_LEVEL", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Json(_) | Error::Io(_) => EXIT_USAGE,
        Error::Verification(_) => EXIT_VERIFY,
        _ => EXIT_SOLVER,
    }
}

/// Resolves flags over the optional config file.
fn resolve(cli: Cli) -> Result<RunConfig> {
    let (command, opts) = match cli.command {
        Sub::SolveConical(o) => (Command::SolveConical, o),
        Sub::SolveSmooth(o) => (Command::SolveSmooth, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Sweep(o) => (Command::Sweep, o),
        Sub::Line(o) => (Command::Line, o),
        Sub::Probe(o) => (Command::Probe, o),
    };
    let file = match &cli.config {
        Some(path) => PartialConfig::from_toml_file(path)?,
        None => PartialConfig::default(),
    };
    PartialConfig::from(opts).over(file).resolve(command)
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<()> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Runs one resolved configuration and returns the exit code.
pub fn run(cfg: RunConfig) -> Result<u8> {
    if cfg.command == Command::Verify {
        let path = cfg.input_path.clone().expect("validated");
        let report = ReportEnvelope::read(&path)
            .map_err(|e| Error::Usage(format!("cannot load report {}: {e}", path.display())))?;
        let outcome = verify(&report);
        emit(&cfg, format!("{}\n", serde_json::to_string_pretty(&outcome)?).as_bytes())?;
        for c in outcome.failures() {
            log::error!("{}: {}", c.name, c.detail);
        }
        return Ok(if outcome.passed() { EXIT_OK } else { EXIT_VERIFY });
    }

    let mut timings = Timings::default();
    let results = match cfg.command {
        Command::SolveConical => RunResults::Conical(Box::new(conical_run(cfg.m[0], cfg.beta0[0], &cfg, &mut timings)?)),
        Command::SolveSmooth => RunResults::Smooth(Box::new(smooth_run(cfg.m[0], &cfg, &mut timings)?)),
        Command::Line => RunResults::Line(line_run(cfg.m[0], &cfg, &mut timings)?),
        Command::Probe => RunResults::Probe(probe_run(cfg.m[0], cfg.beta0[0], &cfg, &mut timings)?),
        Command::Sweep => RunResults::Sweep { rows: timings.time("sweep", || sweep(&cfg)) },
        Command::Verify => unreachable!(),
    };
    if let Some(dir) = &cfg.plot_dir {
        for path in plot_data(&results, dir)? {
            log::info!("wrote {}", path.display());
        }
    }
    let report = ReportEnvelope::new(cfg.clone(), results, timings.into_inner());
    match cfg.format {
        Format::Json => emit(&cfg, format!("{}\n", report.to_json()?).as_bytes())?,
        Format::Csv => {
            let RunResults::Sweep { rows } = &report.results else { unreachable!("validated") };
            let mut buf = Vec::new();
            write_sweep_csv(rows, &mut buf)?;
            emit(&cfg, &buf)?;
        }
    }
    let outcome = verify(&report);
    for c in outcome.failures() {
        log::error!("{}: {}", c.name, c.detail);
    }
    if let RunResults::Sweep { rows } = &report.results {
        for r in rows.iter().filter(|r| r.status != "ok") {
            log::warn!("cell (m = {}, beta0 = {}): {}", r.m, r.beta0, r.status);
        }
    }
    Ok(if outcome.passed() { EXIT_OK } else { EXIT_VERIFY })
}

/// Entry point of the `calabi` binary.
pub fn main_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match resolve(cli).and_then(run) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Solver { history, .. } = &e {
                for h in history {
                    eprintln!("  probe {h}");
                }
            }
            exit_code(&e)
        }
    };
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_globals() {
        let cli = Cli::try_parse_from(["calabi", "sweep", "--m", "0.5,1,2", "--beta0", "1", "--config", "x.toml"]).unwrap();
        assert_eq!(cli.config, Some(PathBuf::from("x.toml")));
        let Sub::Sweep(o) = cli.command else { panic!() };
        assert_eq!(o.m, Some(vec![0.5, 1.0, 2.0]));
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Usage("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Domain("x".into())), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::Verification("x".into())), EXIT_VERIFY);
    }
}
