//! Run configuration: optional `key = value` file, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use indstab::contour::{DEFAULT_SAMPLES_PER_EDGE, MIN_SAMPLES_PER_EDGE};
use indstab::cpoly::Precision;
use indstab::roots::SolverConfig;
use indstab::stability::DEFAULT_STABILITY_TOL;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::usage(format!(
                "unknown format {other:?} (expected json or csv)"
            ))),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct GlobalArgs {
    /// Iteration cap for the root solver
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Relative residual every returned root must meet
    #[arg(long, global = true, value_name = "TOL")]
    pub residual_tol: Option<f64>,
    /// Working precision: standard or extended
    #[arg(long, global = true, value_name = "P")]
    pub precision: Option<String>,
    /// Half-width of the indeterminate band around Re x = 0
    #[arg(long, global = true, value_name = "TOL")]
    pub stability_tol: Option<f64>,
    /// Contour samples per rectangle edge
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key = value file with defaults for the flags above
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Log progress to stderr
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision: Precision,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub stability_tol: f64,
    pub samples_per_edge: usize,
    /// `None` lets rayon pick.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    /// `None` means the subcommand's default.
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            precision: solver.precision,
            max_iterations: solver.max_iterations,
            residual_tol: solver.residual_tolerance,
            stability_tol: DEFAULT_STABILITY_TOL,
            samples_per_edge: DEFAULT_SAMPLES_PER_EDGE,
            threads: None,
            output: None,
            format: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("config line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), CliError> {
        match key {
            "max_iter" => self.max_iterations = parse_value(key, value, line)?,
            "residual_tol" => self.residual_tol = parse_value(key, value, line)?,
            "precision" => {
                self.precision = value
                    .parse()
                    .map_err(|e| CliError::usage(format!("config line {line}: {e}")))?
            }
            "stability_tol" => self.stability_tol = parse_value(key, value, line)?,
            "samples" => self.samples_per_edge = parse_value(key, value, line)?,
            "threads" => self.threads = threads(parse_value(key, value, line)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            other => return Err(CliError::usage(format!("config line {line}: unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn parse_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim(), i + 1)?;
        }
        Ok(())
    }

    fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.parse_file_text(&text)
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &GlobalArgs) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.load_file(path)?;
        }
        if let Some(v) = args.max_iter {
            cfg.max_iterations = v;
        }
        if let Some(v) = args.residual_tol {
            cfg.residual_tol = v;
        }
        if let Some(v) = &args.precision {
            cfg.precision = v.parse().map_err(|e| CliError::usage(format!("{e}")))?;
        }
        if let Some(v) = args.stability_tol {
            cfg.stability_tol = v;
        }
        if let Some(v) = args.samples {
            cfg.samples_per_edge = v;
        }
        if let Some(v) = args.threads {
            cfg.threads = threads(v);
        }
        if let Some(v) = &args.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = args.format {
            cfg.format = Some(v);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(CliError::usage("residual tolerance must be positive"));
        }
        if !(self.stability_tol > 0.0 && self.stability_tol.is_finite()) {
            return Err(CliError::usage("stability tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(CliError::usage("max_iter must be positive"));
        }
        if self.samples_per_edge < MIN_SAMPLES_PER_EDGE {
            return Err(CliError::usage(format!(
                "samples must be at least {MIN_SAMPLES_PER_EDGE}, got {}",
                self.samples_per_edge
            )));
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_iterations: self.max_iterations,
            residual_tolerance: self.residual_tol,
            precision: self.precision,
            ..SolverConfig::default()
        }
    }
}

fn threads(n: usize) -> Option<usize> {
    (n > 0).then_some(n)
}
