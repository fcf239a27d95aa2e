//! Run configuration: defaults, `key = value` files, and flag overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use twistlab::PExponent;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Verify,
    Report { family: String },
    LemmaW { step: f64, range: f64 },
    Derivation,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Report { .. } => "report",
            Self::LemmaW { .. } => "lemma-w",
            Self::Derivation => "derivation",
        }
    }
}

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("commutation", 1e-12),
    ("group_average", 1e-12),
    ("homogeneity", 1e-12),
    ("idempotent", 1e-12),
    ("kp_norm", 1e-9),
    ("lemma_w", 1e-3),
    ("lemma_w_sound", 1e-12),
    ("leibniz", 1e-9),
    ("leibniz_variant", 1e-12),
    ("phi0", 1e-12),
    ("q_range", 1e-12),
    ("ribe_certificate", 1e-9),
    ("ribe_identity", 1e-9),
    ("symmetric", 1e-6),
    ("triangle", 1e-12),
    ("truncation_norm", 1e-6),
    ("twisted_isometry", 1e-12),
    ("twisted_modulus", 1e-12),
];

/// Named tolerances used by the checks. `all` is accepted as a key and sets
/// every entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        if !(value.is_finite() && value >= 0.0) {
            return err(format!("tolerance {key} = {value} must be finite and >= 0"));
        }
        if key == "all" {
            self.0.values_mut().for_each(|v| *v = value);
            return Ok(());
        }
        match self.0.get_mut(key) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => {
                err(format!("unknown tolerance '{key}' (known: all, {})", self.keys().collect::<Vec<_>>().join(", ")))
            }
        }
    }

    /// Applies a `KEY=VAL` assignment.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((k, v)) = assignment.split_once('=') else {
            return err(format!("expected KEY=VAL, got '{assignment}'"));
        };
        self.set(k.trim(), parse_f64("tolerance", v.trim())?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub budget: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            p: 1.0,
            n_grid: vec![16, 64, 256, 1024],
            budget: 2000,
            seed: 0,
            tolerances: Tolerances::default(),
            output_path: None,
        }
    }

    pub fn exponent(&self) -> Result<PExponent<f64>, ConfigError> {
        PExponent::new(self.p).map_err(|e| ConfigError(e.to_string()))
    }

    /// Applies the entries of a config file.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (key, value) in parse_config_text(text)? {
            self.apply_entry(&key, &value)?;
        }
        Ok(())
    }

    pub fn apply_entry(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "p" => self.p = parse_f64(key, value)?,
            "n_grid" | "n-grid" => self.n_grid = parse_grid(value)?,
            "budget" => self.budget = parse_int(key, value)?,
            "seed" => self.seed = parse_int(key, value)?,
            "out" => self.output_path = Some(PathBuf::from(value)),
            _ => match key.strip_prefix("tol.") {
                Some(name) => self.tolerances.set(name, parse_f64(key, value)?)?,
                None => return err(format!("unknown config key '{key}'")),
            },
        }
        Ok(())
    }

    /// Checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.exponent()?;
        if self.budget == 0 {
            return err("budget must be positive");
        }
        if self.n_grid.is_empty() {
            return err("n grid is empty");
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return err("n grid must be strictly increasing");
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected key = value", lineno + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return err(format!("line {}: empty key", lineno + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("{key}: '{v}' is not a number")))
}

fn parse_int<I: std::str::FromStr>(key: &str, v: &str) -> Result<I, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("{key}: '{v}' is not a non-negative integer")))
}

pub fn parse_grid(v: &str) -> Result<Vec<usize>, ConfigError> {
    v.split(',').map(|s| parse_int("n_grid", s.trim())).collect()
}
