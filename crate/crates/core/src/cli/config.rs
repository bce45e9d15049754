//! Experiment configuration: JSON-loadable bundles with built-in defaults,
//! overridable by command-line flags. The effective configuration is echoed
//! into the output directory for provenance.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;

fn default_seed() -> u64 {
    42
}

fn default_n() -> usize {
    1000
}

fn default_sigma_z() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    1.0
}

/// Inclusive numeric range with a fixed step.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if !self.step.is_finite() || self.step <= 0.0 || self.stop < self.start {
            return Err(CliError::Config(format!(
                "bad grid range {} .. {} step {}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| round9(self.start + self.step * i as f64))
            .collect())
    }
}

/// Rounds to 9 decimals so accumulated grid values print cleanly.
fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Configuration for `densities`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DensitiesConfig {
    pub n: usize,
    pub mu_z: f64,
    pub sigma_z: f64,
    pub delta: f64,
    pub sigma_u_values: Vec<f64>,
    pub sigma_mu_values: Vec<f64>,
    pub kde_points: usize,
    pub seed: u64,
}

impl Default for DensitiesConfig {
    fn default() -> Self {
        Self {
            n: default_n(),
            mu_z: 0.0,
            sigma_z: default_sigma_z(),
            delta: default_delta(),
            sigma_u_values: vec![0.0, 0.5, 5.0],
            sigma_mu_values: vec![0.0, 0.5, 5.0],
            kde_points: 512,
            seed: default_seed(),
        }
    }
}

/// Configuration for `sweep-kl`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SweepKlConfig {
    pub n: usize,
    pub mu_z: f64,
    pub sigma_z: f64,
    pub deltas: Vec<f64>,
    pub sigma_u: GridRange,
    pub sigma_mu_values: Vec<f64>,
    pub k: usize,
    pub seed: u64,
}

impl Default for SweepKlConfig {
    fn default() -> Self {
        Self {
            n: default_n(),
            mu_z: 0.0,
            sigma_z: default_sigma_z(),
            deltas: vec![1.0],
            sigma_u: GridRange {
                start: 0.0,
                stop: 5.0,
                step: 0.1,
            },
            sigma_mu_values: vec![0.0, 0.5, 1.0, 5.0],
            k: 10,
            seed: default_seed(),
        }
    }
}

/// Configuration for `variance-table`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VarianceTableConfig {
    pub n: usize,
    pub mu_z: f64,
    pub sigma_z: f64,
    pub sigma_u: f64,
    pub sigma_mu: f64,
    pub delta: f64,
    pub reps: usize,
    pub seed: u64,
}

impl Default for VarianceTableConfig {
    fn default() -> Self {
        Self {
            n: default_n(),
            mu_z: 0.0,
            sigma_z: default_sigma_z(),
            sigma_u: 5.0,
            sigma_mu: 5.0,
            delta: default_delta(),
            reps: 50,
            seed: default_seed(),
        }
    }
}

/// Loads a config from JSON, falling back to defaults when no path is given.
pub fn load<T: Default + for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

/// Writes the effective config into the output directory.
pub fn echo<T: Serialize>(config: &T, out: &Path, name: &str) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let path = out.join(format!("{name}_config.json"));
    fs::write(path, serde_json::to_string_pretty(config)?)?;
    Ok(())
}
