//! Run configuration: defaults, the JSON config file and command-line
//! overrides, merged in that order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance names and their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 6] = [
    ("residual", 1e-9),
    ("consistency", 1e-6),
    ("gate", 1e-9),
    ("conservation", 1e-7),
    ("c_min", 1e-6),
    ("convergence", 0.95),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("unknown tolerance `{0}` (known: residual, consistency, gate, conservation, c_min, convergence)")]
    UnknownTolerance(String),
    #[error("tolerance `{name}` must be positive and finite, got {value}")]
    NonPositiveTolerance { name: String, value: f64 },
    #[error("config key `bordism_coefficients` must start with 1")]
    BadCoefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// The config file schema. Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bordism_coefficients: Option<Vec<u64>>,
}

/// The effective configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bordism_coefficients: Option<Vec<u64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: TOLERANCE_DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed: 0,
            format: None,
            output: None,
            bordism_coefficients: None,
        }
    }
}

impl RunConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        if !self.tolerances.contains_key(name) {
            return Err(ConfigError::UnknownTolerance(name.to_string()));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(ConfigError::NonPositiveTolerance { name: name.to_string(), value });
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn apply_file(&mut self, file: ConfigFile) -> Result<(), ConfigError> {
        for (k, v) in &file.tolerances {
            self.set_tolerance(k, *v)?;
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if file.format.is_some() {
            self.format = file.format;
        }
        if file.output.is_some() {
            self.output = file.output;
        }
        if let Some(c) = file.bordism_coefficients {
            if c.first() != Some(&1) {
                return Err(ConfigError::BadCoefficients);
            }
            self.bordism_coefficients = Some(c);
        }
        Ok(())
    }
}

/// Reads and validates a config file, applying it over the defaults.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
    let mut cfg = RunConfig::default();
    cfg.apply_file(file)?;
    Ok(cfg)
}
