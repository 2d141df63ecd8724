//! Scalar references for the UAV weight loop, written from the model
//! equations without the DP engine.

use codesign::uav::UavModel;
use codesign::uncertainty::OmegaPoint;

/// Everything one combination needs at one outcome and payload.
#[derive(Debug, Clone, Copy)]
pub struct Scalars {
    /// g
    pub payload: f64,
    pub act_mass: f64,
    pub act_cost: f64,
    pub v_max: f64,
    pub p0: f64,
    pub p1: f64,
    /// Wh/kg
    pub density: f64,
    /// Wh/$
    pub per_cost: f64,
    pub cycles: f64,
    pub missions: f64,
    /// m/s²
    pub g: f64,
    pub frame: f64,
    pub c0: f64,
    pub c1: f64,
    /// m/s
    pub v: f64,
    /// m
    pub distance: f64,
}

pub fn scalars(model: &UavModel, omega: &OmegaPoint, k: usize, payload: f64) -> Scalars {
    let (a, b) = model.combo_ids(k);
    let s = model.space();
    let at = |name: String| omega.get(s.index_of(&name).unwrap());
    let p = model.params();
    Scalars {
        payload,
        act_mass: at(format!("{a}.mass")),
        act_cost: at(format!("{a}.cost")),
        v_max: at(format!("{a}.v_max")),
        p0: at(format!("{a}.p0")),
        p1: at(format!("{a}.p1")),
        density: at(format!("{b}.energy_density")),
        per_cost: at(format!("{b}.energy_per_cost")),
        cycles: at(format!("{b}.cycles")),
        missions: at("N".to_string()),
        g: p.g,
        frame: p.frame_mass,
        c0: p.c0,
        c1: p.c1,
        v: p.cruise_velocity,
        distance: model.task().distance,
    }
}

impl Scalars {
    /// Wh drawn by one mission when the battery weighs `battery_g`.
    pub fn mission_energy(&self, battery_g: f64) -> f64 {
        let lift_n = self.g * (self.payload + self.frame + self.act_mass + battery_g) / 1000.0;
        let watts = self.p0 + self.p1 * lift_n * lift_n + self.c0 + self.c1 * self.v;
        watts * (self.distance / self.v) / 3600.0
    }

    /// Battery mass in g needed for a battery of mass `battery_g`.
    pub fn required_mass(&self, battery_g: f64) -> f64 {
        self.mission_energy(battery_g) / self.density * 1000.0
    }

    pub fn cost_of_capacity(&self, wh: f64) -> f64 {
        self.act_cost + wh / self.per_cost * (self.missions / self.cycles).ceil()
    }

    /// Least battery mass with `required_mass(m) = m`, by bisection. The
    /// map is convex increasing, so the least root lies left of the point
    /// where its slope reaches 1.
    pub fn bisection_mass(&self) -> Option<f64> {
        if self.v > self.v_max {
            return None;
        }
        let gap = |m: f64| self.required_mass(m) - m;
        // slope of required_mass: 2 p1 (g/1000)² (payload + frame + act_mass + m) · K
        let k = (self.distance / self.v) / 3600.0 / self.density * 1000.0;
        let q = self.g / 1000.0;
        let turn = 1.0 / (2.0 * self.p1 * q * q * k) - (self.payload + self.frame + self.act_mass);
        let hi = turn.max(0.0);
        if gap(hi) > 0.0 {
            return None;
        }
        let mut lo = 0.0;
        let mut hi = hi;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }

    pub fn bisection_cost(&self) -> f64 {
        match self.bisection_mass() {
            Some(m) => self.cost_of_capacity(m * self.density / 1000.0),
            None => f64::INFINITY,
        }
    }

    /// Cheapest capacity on a grid of `step` Wh that covers its own mission
    /// energy; searched up to `max_wh`.
    pub fn grid_cost(&self, step: f64, max_wh: f64) -> f64 {
        if self.v > self.v_max {
            return f64::INFINITY;
        }
        let mut k = 0u64;
        loop {
            let wh = k as f64 * step;
            if wh > max_wh {
                return f64::INFINITY;
            }
            if self.mission_energy(wh / self.density * 1000.0) <= wh {
                return self.cost_of_capacity(wh);
            }
            k += 1;
        }
    }
}

/// Cheapest combination by the grid reference.
pub fn grid_min_cost(model: &UavModel, omega: &OmegaPoint, payload: f64, step: f64) -> f64 {
    (0..model.combos().len())
        .map(|k| scalars(model, omega, k, payload).grid_cost(step, 5000.0))
        .fold(f64::INFINITY, f64::min)
}
