use smallvec::smallvec;

use super::{ActuatorModel, BatteryTech};
use crate::dp::DesignProblem;
use crate::poset::{Antichain, Axis, Point, PosetDescriptor};

pub(crate) fn chains(axes: &[(&str, &str)]) -> PosetDescriptor {
    PosetDescriptor::new(axes.iter().map(|(n, u)| Axis::new(*n, *u)).collect())
}

/// ⟨velocity, lift⟩ → ⟨power, cost, mass⟩; infeasible above `v_max`.
pub fn actuator_dp(m: &ActuatorModel) -> DesignProblem {
    let m = m.clone();
    DesignProblem::from_partial_map(
        m.id.clone(),
        chains(&[("velocity", "m/s"), ("lift", "N")]),
        chains(&[("power", "W"), ("cost", "$"), ("mass", "g")]),
        move |x| {
            let (v, f) = (x[0], x[1]);
            (v <= m.v_max).then(|| smallvec![m.p0 + m.p1 * f * f, m.cost, m.mass])
        },
    )
}

/// ⟨capacity, missions⟩ → ⟨mass, lifetime cost⟩. One pack per `cycles`
/// missions.
pub fn battery_dp(t: &BatteryTech) -> DesignProblem {
    let t = t.clone();
    DesignProblem::from_map(
        t.id.clone(),
        chains(&[("capacity", "Wh"), ("missions", "1")]),
        chains(&[("battery mass", "g"), ("battery cost", "$")]),
        move |x| {
            let (c, n) = (x[0], x[1]);
            let packs = (n / t.cycles).ceil();
            smallvec![c / t.energy_density * 1000.0, c / t.energy_per_cost * packs]
        },
    )
}

/// ⟨velocity⟩ → ⟨power⟩, affine.
pub fn perception_dp(c0: f64, c1: f64) -> DesignProblem {
    DesignProblem::from_map("perception", chains(&[("velocity", "m/s")]), chains(&[("power", "W")]), move |x| {
        smallvec![c0 + c1 * x[0]]
    })
}

/// The task requirement as an input: nothing → ⟨missions, distance⟩.
pub fn task_dp(num_missions: f64, distance: f64) -> DesignProblem {
    let res = chains(&[("missions", "1"), ("distance", "m")]);
    let p = Point::new([num_missions, distance]).expect("task values are nonnegative");
    DesignProblem::constant("task", PosetDescriptor::unit(), Antichain::singleton(res, p).expect("conforms"))
}

/// ⟨missions, distance⟩ → ⟨missions, endurance, velocity⟩ at cruise speed.
pub fn task_management_dp(cruise_velocity: f64) -> DesignProblem {
    DesignProblem::from_map(
        "task management",
        chains(&[("missions", "1"), ("distance", "m")]),
        chains(&[("missions", "1"), ("endurance", "s"), ("velocity", "m/s")]),
        move |x| smallvec![x[0], x[1] / cruise_velocity, cruise_velocity],
    )
}

/// ⟨payload, self weight⟩ → ⟨lift⟩.
pub fn lift_dp(g: f64) -> DesignProblem {
    DesignProblem::from_map("lift", chains(&[("payload", "g"), ("self weight", "g")]), chains(&[("lift", "N")]), move |x| {
        smallvec![g * (x[0] + x[1]) / 1000.0]
    })
}

/// ⟨actuation power, actuator cost, actuator mass, perception power,
/// missions, endurance⟩ → ⟨capacity, missions, actuator cost, actuator mass⟩.
pub fn energy_dp() -> DesignProblem {
    DesignProblem::from_map(
        "energy",
        chains(&[("power", "W"), ("cost", "$"), ("mass", "g"), ("power", "W"), ("missions", "1"), ("endurance", "s")]),
        chains(&[("capacity", "Wh"), ("missions", "1"), ("cost", "$"), ("mass", "g")]),
        |x| smallvec![(x[0] + x[3]) * x[5] / 3600.0, x[4], x[1], x[2]],
    )
}

/// ⟨battery mass, battery cost, actuator cost, actuator mass⟩ →
/// ⟨lifetime cost, self weight, self weight⟩.
pub fn totals_dp(frame_mass: f64) -> DesignProblem {
    DesignProblem::from_map(
        "totals",
        chains(&[("battery mass", "g"), ("battery cost", "$"), ("cost", "$"), ("mass", "g")]),
        chains(&[("lifetime cost", "$"), ("self weight", "g"), ("self weight", "g")]),
        move |x| {
            let w = frame_mass + x[3] + x[0];
            smallvec![x[2] + x[1], w, w]
        },
    )
}
