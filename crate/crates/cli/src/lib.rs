//! Command-line front end: argument parsing, configuration, and the
//! `verify`, `report`, `lemma-w` and `derivation` commands.

pub mod commands;
pub mod config;
pub mod format;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{Command, ConfigError, RunConfig, Tolerances};

/// Result of a command: an optional CSV table and summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: Option<String>,
    pub summary: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Parser)]
#[command(name = "twistlab", version, about = "Numerical checks for quasilinear maps on l_p^n")]
pub struct Cli {
    /// Exponent p of the l_p spaces.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Comma-separated dimensions, e.g. 16,64,256.
    #[arg(long = "n-grid", global = true)]
    pub n_grid: Option<String>,
    /// Sample budget per estimate.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance override KEY=VAL (repeatable; `all=VAL` sets every one).
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Run every invariant check; exit 1 if any fails.
    Verify,
    /// Accessibility report for a family of maps.
    Report {
        /// ribe, kp, kp-index, kp-unscaled, linear, or truncation:<ribe|kp>.
        family: String,
    },
    /// Grid search of the omega defect ratio on [-range, range]^2.
    LemmaW {
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 2.0)]
        range: f64,
    },
    /// Leibniz defect table for the normalised derivation.
    Derivation,
}

impl Cli {
    /// Defaults, then the config file, then flags.
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let command = match self.command {
            Sub::Verify => Command::Verify,
            Sub::Report { family } => Command::Report { family },
            Sub::LemmaW { step, range } => Command::LemmaW { step, range },
            Sub::Derivation => Command::Derivation,
        };
        let mut cfg = RunConfig::new(command);
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if let Some(g) = &self.n_grid {
            cfg.n_grid = config::parse_grid(g)?;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = self.out {
            cfg.output_path = Some(o);
        }
        for t in &self.tol {
            cfg.tolerances.apply_assignment(t)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    match &cfg.command {
        Command::Verify => verify::verify(cfg),
        Command::Report { family } => commands::report(cfg, family),
        Command::LemmaW { step, range } => commands::lemma_w(cfg, *step, *range),
        Command::Derivation => commands::derivation(cfg),
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
