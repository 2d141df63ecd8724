//! Task-driven delivery UAV: component catalog, component design problems,
//! the system diagram with its weight feedback loop, and the experiments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::DpError;
use crate::interval::IntervalError;
use crate::uncertainty::UncertaintyError;

mod components;
mod experiments;
mod model;

pub use components::{actuator_dp, battery_dp, energy_dp, lift_dp, perception_dp, task_dp, task_management_dp, totals_dp};
pub use experiments::{
    experiment_deterministic, experiment_distributional, experiment_interval, BoundRow, Curve, CurveRow,
    Distributional, IntervalCurves,
};
pub use model::{Combo, UavModel, TASK_SLOT};

const BUILTIN_CATALOG: &str = include_str!("../../data/catalog.toml");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UavError {
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("invalid setting: {0}")]
    Setting(String),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorModel {
    pub id: String,
    /// g
    pub mass: f64,
    /// $
    pub cost: f64,
    /// m/s
    pub v_max: f64,
    /// W
    pub p0: f64,
    /// W/N²
    pub p1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryTech {
    pub id: String,
    /// Wh/kg
    pub energy_density: f64,
    /// Wh/$
    pub energy_per_cost: f64,
    pub cycles: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    #[serde(rename = "actuator")]
    pub actuators: Vec<ActuatorModel>,
    #[serde(rename = "battery")]
    pub batteries: Vec<BatteryTech>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN_CATALOG).expect("shipped catalog is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, UavError> {
        let c: Catalog = toml::from_str(text).map_err(|e| UavError::Catalog(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), UavError> {
        if self.actuators.is_empty() || self.batteries.is_empty() {
            return Err(UavError::Catalog("needs at least one actuator and one battery".into()));
        }
        let mut ids = std::collections::BTreeSet::new();
        for a in &self.actuators {
            if !ids.insert(a.id.as_str()) {
                return Err(UavError::Catalog(format!("duplicate id `{}`", a.id)));
            }
            for (k, v) in [("mass", a.mass), ("cost", a.cost), ("v_max", a.v_max), ("p0", a.p0), ("p1", a.p1)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(UavError::Catalog(format!("{}.{k} = {v} must be positive", a.id)));
                }
            }
        }
        for b in &self.batteries {
            if !ids.insert(b.id.as_str()) {
                return Err(UavError::Catalog(format!("duplicate id `{}`", b.id)));
            }
            for (k, v) in [("energy_density", b.energy_density), ("energy_per_cost", b.energy_per_cost), ("cycles", b.cycles)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(UavError::Catalog(format!("{}.{k} = {v} must be positive", b.id)));
                }
            }
        }
        if ids.contains(TASK_SLOT) {
            return Err(UavError::Catalog(format!("`{TASK_SLOT}` is reserved")));
        }
        Ok(())
    }

    pub fn actuator(&self, id: &str) -> Result<&ActuatorModel, UavError> {
        self.actuators.iter().find(|a| a.id == id).ok_or_else(|| UavError::UnknownComponent(id.into()))
    }

    pub fn battery(&self, id: &str) -> Result<&BatteryTech, UavError> {
        self.batteries.iter().find(|b| b.id == id).ok_or_else(|| UavError::UnknownComponent(id.into()))
    }
}

/// Mission requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskProfile {
    /// Nominal number of missions over the lifetime.
    pub num_missions: f64,
    /// m per mission
    pub distance: f64,
    /// missions per day; carried for completeness, enters no cost
    pub frequency: f64,
}

impl Default for TaskProfile {
    fn default() -> Self {
        Self { num_missions: 1000.0, distance: 1000.0, frequency: 1.0 }
    }
}

/// Physical constants, fixed subsystem models and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavParams {
    /// m/s²
    pub g: f64,
    /// g
    pub frame_mass: f64,
    /// perception power at rest, W
    pub c0: f64,
    /// perception power slope, W·s/m
    pub c1: f64,
    /// m/s
    pub cruise_velocity: f64,
    pub trace_tol: f64,
    pub trace_max_iter: usize,
    /// g; loop masses above this count as divergence
    pub mass_ceiling: f64,
    /// Relative half-width of each random parameter's calibration interval.
    pub spread: f64,
    /// Probability of that interval.
    pub level: f64,
}

impl Default for UavParams {
    fn default() -> Self {
        Self {
            g: 9.81,
            frame_mass: 0.0,
            c0: 5.0,
            c1: 2.0,
            cruise_velocity: 2.5,
            trace_tol: 1e-10,
            trace_max_iter: 10_000,
            mass_ceiling: 1e7,
            spread: 0.05,
            level: 0.90,
        }
    }
}

#[cfg(test)]
mod tests;
