//! Run configuration: command-line values layered over an optional TOML file
//! layered over defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::IntegratorConfig;
use crate::quadrature::QuadratureConfig;
use crate::shooting::ShootingOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveConical,
    SolveSmooth,
    Verify,
    Sweep,
    Line,
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Usage(format!("unknown format {other:?}; expected json or csv"))),
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_GRID_N: usize = 4097;

/// Fully resolved configuration handed to the runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub m: Vec<f64>,
    pub beta0: Vec<f64>,
    pub tol: f64,
    pub grid_n: usize,
    pub quad_panels: usize,
    pub output_path: Option<PathBuf>,
    pub input_path: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
    pub format: Format,
}

/// Values that may come from flags or from the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub m: Option<Vec<f64>>,
    pub beta0: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub grid_n: Option<usize>,
    pub quad_panels: Option<usize>,
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Usage(format!("malformed config {}: {e}", path.display())))
    }

    /// `self` wins wherever it has a value.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            m: self.m.or(lower.m),
            beta0: self.beta0.or(lower.beta0),
            tol: self.tol.or(lower.tol),
            grid_n: self.grid_n.or(lower.grid_n),
            quad_panels: self.quad_panels.or(lower.quad_panels),
            output: self.output.or(lower.output),
            input: self.input.or(lower.input),
            plot_dir: self.plot_dir.or(lower.plot_dir),
            format: self.format.or(lower.format),
        }
    }

    pub fn resolve(self, command: Command) -> Result<RunConfig> {
        let cfg = RunConfig {
            command,
            m: self.m.unwrap_or_default(),
            beta0: self.beta0.unwrap_or_default(),
            tol: self.tol.unwrap_or(DEFAULT_TOL),
            grid_n: self.grid_n.unwrap_or(DEFAULT_GRID_N),
            quad_panels: self.quad_panels.unwrap_or(QuadratureConfig::default().panels),
            output_path: self.output,
            input_path: self.input,
            plot_dir: self.plot_dir,
            format: self.format.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(Error::Usage(msg));
        let single = |name: &str, v: &[f64]| -> Result<()> {
            if v.len() != 1 {
                return Err(Error::Usage(format!("{:?} needs exactly one --{name}, got {}", self.command, v.len())));
            }
            Ok(())
        };
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return usage(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.grid_n < 3 {
            return usage(format!("grid-n must be at least 3, got {}", self.grid_n));
        }
        if self.quad_panels == 0 {
            return usage("quad-panels must be positive".into());
        }
        if self.m.iter().chain(&self.beta0).any(|x| !x.is_finite() || *x <= 0.0) {
            return usage("m and beta0 must be positive and finite".into());
        }
        if self.format == Format::Csv && self.command != Command::Sweep {
            return usage("csv output is only available for sweep".into());
        }
        match self.command {
            Command::SolveConical | Command::Probe => {
                single("m", &self.m)?;
                single("beta0", &self.beta0)?;
            }
            Command::SolveSmooth | Command::Line => single("m", &self.m)?,
            Command::Sweep => {
                if self.m.is_empty() || self.beta0.is_empty() {
                    return usage("sweep needs non-empty --m and --beta0 lists".into());
                }
            }
            Command::Verify => {
                if self.input_path.is_none() {
                    return usage("verify needs --input".into());
                }
            }
        }
        Ok(())
    }

    pub fn shooting_options(&self) -> ShootingOptions {
        let base = ShootingOptions::with_tol(self.tol);
        ShootingOptions {
            integrator: Some(IntegratorConfig { dense_grid_n: self.grid_n, ..base.integrator_config() }),
            ..base
        }
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig { panels: self.quad_panels, ..QuadratureConfig::default() }
    }

    /// Same run with every numerical tolerance tightened by `factor`.
    pub fn tightened(&self, factor: f64) -> RunConfig {
        RunConfig { tol: self.tol / factor, quad_panels: self.quad_panels * 2, ..self.clone() }
    }
}
