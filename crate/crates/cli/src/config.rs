//! Run configuration: a flat TOML file, overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use codesign::adaptive::AdaptiveSettings;
use codesign::uav::{Catalog, TaskProfile, UavModel, UavParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Deterministic,
    Interval,
    Distributional,
    Adaptive,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

pub fn default_payloads() -> Vec<f64> {
    (0..8).map(|i| 3000.0 * i as f64 / 7.0).collect()
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Every setting of a run. Keys absent from the file take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Catalog TOML; the built-in table when absent.
    pub catalog: Option<PathBuf>,
    /// g, strictly increasing
    pub payloads: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    /// Per-scalar probability of the rectangle bound.
    pub rho: f64,
    /// Relative perturbation of the interval experiment.
    pub frac: f64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
    pub policy_n: usize,
    pub inner_n: usize,
    /// m/s
    pub cruise_velocity: f64,
    /// W
    pub c0: f64,
    /// W·s/m
    pub c1: f64,
    /// m/s²
    pub g: f64,
    /// g
    pub frame_mass: f64,
    /// m
    pub distance: f64,
    pub num_missions: f64,
    /// missions per day
    pub frequency: f64,
    pub spread: f64,
    pub level: f64,
    pub trace_tol: f64,
    pub trace_max_iter: usize,
    /// g
    pub mass_ceiling: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = UavParams::default();
        let t = TaskProfile::default();
        let a = AdaptiveSettings::default();
        Self {
            experiment: Experiment::Distributional,
            catalog: None,
            payloads: default_payloads(),
            n: 2000,
            seed: 1,
            rho: 0.9,
            frac: 0.05,
            workers: default_workers(),
            out: None,
            formats: vec![Format::Csv],
            policy_n: a.policy_n,
            inner_n: a.inner_n,
            cruise_velocity: p.cruise_velocity,
            c0: p.c0,
            c1: p.c1,
            g: p.g,
            frame_mass: p.frame_mass,
            distance: t.distance,
            num_missions: t.num_missions,
            frequency: t.frequency,
            spread: p.spread,
            level: p.level,
            trace_tol: p.trace_tol,
            trace_max_iter: p.trace_max_iter,
            mass_ceiling: p.mass_ceiling,
        }
    }
}

fn range(field: &str, ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{field}` {what}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        range("n", self.n >= 1, "must be at least 1")?;
        range("workers", self.workers >= 1, "must be at least 1")?;
        range("payloads", !self.payloads.is_empty(), "must not be empty")?;
        range("payloads", self.payloads.iter().all(|p| p.is_finite() && *p >= 0.0), "must be finite and nonnegative")?;
        range("payloads", self.payloads.windows(2).all(|w| w[0] < w[1]), "must be strictly increasing")?;
        range("rho", self.rho > 0.0 && self.rho < 1.0, "must lie in (0, 1)")?;
        range("frac", (0.0..1.0).contains(&self.frac), "must lie in [0, 1)")?;
        range("level", self.level > 0.0 && self.level < 1.0, "must lie in (0, 1)")?;
        range("spread", (0.0..1.0).contains(&self.spread), "must lie in [0, 1)")?;
        range("policy_n", self.policy_n >= 1, "must be at least 1")?;
        range("inner_n", self.inner_n >= 1, "must be at least 1")?;
        range("formats", !self.formats.is_empty(), "must name at least one format")?;
        range("trace_tol", self.trace_tol > 0.0, "must be positive")?;
        range("trace_max_iter", self.trace_max_iter >= 1, "must be at least 1")?;
        range("mass_ceiling", self.mass_ceiling > 0.0, "must be positive")?;
        Ok(())
    }

    pub fn load_catalog(&self) -> Result<Catalog, CliError> {
        match &self.catalog {
            None => Ok(Catalog::builtin()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("catalog {}: {e}", path.display())))?;
                Catalog::from_toml(&text).map_err(|e| CliError::Config(format!("catalog {}: {e}", path.display())))
            }
        }
    }

    pub fn model(&self) -> Result<UavModel, CliError> {
        let params = UavParams {
            g: self.g,
            frame_mass: self.frame_mass,
            c0: self.c0,
            c1: self.c1,
            cruise_velocity: self.cruise_velocity,
            trace_tol: self.trace_tol,
            trace_max_iter: self.trace_max_iter,
            mass_ceiling: self.mass_ceiling,
            spread: self.spread,
            level: self.level,
        };
        let task = TaskProfile { num_missions: self.num_missions, distance: self.distance, frequency: self.frequency };
        UavModel::new(self.load_catalog()?, params, task).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn adaptive_settings(&self) -> AdaptiveSettings {
        AdaptiveSettings { policy_n: self.policy_n, inner_n: self.inner_n }
    }

    /// Output directory: the configured one, else `$CODESIGN_OUT`, else `out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("CODESIGN_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// SHA-256 over every setting that can change a result, with the
    /// catalog's contents in place of its path.
    pub fn hash(&self) -> Result<String, CliError> {
        let mut canon = self.clone();
        canon.workers = 1;
        canon.out = None;
        canon.formats = Vec::new();
        canon.catalog = None;
        let catalog = toml::to_string(&self.load_catalog()?).map_err(|e| CliError::Config(e.to_string()))?;
        let body = serde_json::to_string(&canon).map_err(|e| CliError::Config(e.to_string()))?;
        let digest = Sha256::new().chain_update(body).chain_update(catalog).finalize();
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_toml(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
