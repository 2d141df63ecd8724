use std::collections::BTreeMap;
use std::sync::Arc;

use super::components::{chains, energy_dp, lift_dp, perception_dp, task_management_dp, totals_dp};
use super::{actuator_dp, battery_dp, task_dp, ActuatorModel, BatteryTech, Catalog, TaskProfile, UavError, UavParams};
use crate::dp::{self, kleene, Bindings, DesignProblem, Diagram, KleeneOutcome, TraceSpec};
use crate::interval::{perturb_params, DPInterval, Effect, ParamEntry};
use crate::poset::{Point, PosetDescriptor};
use crate::uncertainty::{
    compose_random, inner_bound_rect, Block, InnerBound, OmegaPoint, OmegaView, ParamSpec, RandomDP, SampleSpace,
    UncertaintyError,
};

pub const TASK_SLOT: &str = "task";

const ACTUATOR_FIELDS: [(&str, &str, Effect, bool); 5] = [
    ("mass", "g", Effect::Harmful, false),
    ("cost", "$", Effect::Harmful, false),
    ("v_max", "m/s", Effect::Helpful, false),
    ("p0", "W", Effect::Harmful, true),
    ("p1", "W/N^2", Effect::Harmful, true),
];

const BATTERY_FIELDS: [(&str, &str, Effect); 3] = [
    ("energy_density", "Wh/kg", Effect::Helpful),
    ("energy_per_cost", "Wh/$", Effect::Helpful),
    ("cycles", "1", Effect::Helpful),
];

fn key(id: &str, field: &str) -> String {
    format!("{id}.{field}")
}

/// One actuator/battery pairing, by catalog index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combo {
    pub actuator: usize,
    pub battery: usize,
}

/// The benchmark system over a catalog: sample space, random components and
/// the per-combination diagrams with the self-weight loop.
#[derive(Debug, Clone)]
pub struct UavModel {
    catalog: Catalog,
    params: UavParams,
    task: TaskProfile,
    space: Arc<SampleSpace>,
    combos: Vec<Combo>,
    bodies: Vec<Diagram>,
    loops: Vec<Diagram>,
    system: Diagram,
    trace: TraceSpec,
    components: BTreeMap<String, RandomDP>,
}

impl UavModel {
    pub fn new(catalog: Catalog, params: UavParams, task: TaskProfile) -> Result<Self, UavError> {
        for (k, v) in [
            ("g", params.g),
            ("cruise_velocity", params.cruise_velocity),
            ("distance", task.distance),
            ("num_missions", task.num_missions),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(UavError::Setting(format!("{k} = {v} must be positive")));
            }
        }
        for (k, v) in [("frame_mass", params.frame_mass), ("c0", params.c0), ("c1", params.c1), ("spread", params.spread)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(UavError::Setting(format!("{k} = {v} must be nonnegative")));
            }
        }
        let space = build_space(&catalog, &params, &task)?;
        let trace = TraceSpec::new(1, 2)
            .with_tol(params.trace_tol)
            .with_max_iter(params.trace_max_iter)
            .with_ceiling(params.mass_ceiling);
        let combos: Vec<Combo> = (0..catalog.actuators.len())
            .flat_map(|a| (0..catalog.batteries.len()).map(move |b| Combo { actuator: a, battery: b }))
            .collect();
        let bodies: Vec<Diagram> =
            combos.iter().map(|c| body(&params, &catalog.actuators[c.actuator].id, &catalog.batteries[c.battery].id)).collect();
        let loops: Vec<Diagram> = bodies.iter().map(|b| b.clone().traced(trace)).collect();
        let system = Diagram::union_all(loops.iter().cloned()).expect("catalog is not empty");
        system.interface()?;
        let mut model = Self { catalog, params, task, space, combos, bodies, loops, system, trace, components: BTreeMap::new() };
        let slots: Vec<String> = model.catalog.actuators.iter().map(|a| a.id.clone())
            .chain(model.catalog.batteries.iter().map(|b| b.id.clone()))
            .chain([TASK_SLOT.to_string()])
            .collect();
        for slot in slots {
            let c = model.component(&slot)?;
            model.components.insert(slot, c);
        }
        Ok(model)
    }

    pub fn builtin() -> Self {
        Self::new(Catalog::builtin(), UavParams::default(), TaskProfile::default()).expect("defaults are valid")
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn params(&self) -> &UavParams {
        &self.params
    }

    pub fn task(&self) -> &TaskProfile {
        &self.task
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn trace_spec(&self) -> TraceSpec {
        self.trace
    }

    /// Actuator-major, in catalog order.
    pub fn combos(&self) -> &[Combo] {
        &self.combos
    }

    pub fn combo_index(&self, actuator: &str, battery: &str) -> Result<usize, UavError> {
        let a = self.catalog.actuators.iter().position(|x| x.id == actuator);
        let b = self.catalog.batteries.iter().position(|x| x.id == battery);
        match (a, b) {
            (Some(a), Some(b)) => Ok(a * self.catalog.batteries.len() + b),
            (None, _) => Err(UavError::UnknownComponent(actuator.into())),
            (_, None) => Err(UavError::UnknownComponent(battery.into())),
        }
    }

    pub fn combo_ids(&self, k: usize) -> (&str, &str) {
        let c = self.combos[k];
        (&self.catalog.actuators[c.actuator].id, &self.catalog.batteries[c.battery].id)
    }

    /// ⟨payload⟩ → ⟨lifetime cost, self weight⟩ with free choice among all
    /// combinations.
    pub fn system_diagram(&self) -> &Diagram {
        &self.system
    }

    pub fn combo_diagram(&self, k: usize) -> &Diagram {
        &self.loops[k]
    }

    /// The loop body of combination `k`: ⟨payload, self weight⟩ →
    /// ⟨lifetime cost, self weight, self weight⟩.
    pub fn body_diagram(&self, k: usize) -> &Diagram {
        &self.bodies[k]
    }

    pub fn nominal(&self) -> OmegaPoint {
        self.space.nominal()
    }

    /// Names of the sample-space coordinates read by a component slot.
    pub fn component_params(&self, slot: &str) -> Result<Vec<String>, UavError> {
        if slot == TASK_SLOT {
            return Ok(vec!["N".into()]);
        }
        if self.catalog.actuator(slot).is_ok() {
            return Ok(ACTUATOR_FIELDS.iter().map(|(f, ..)| key(slot, f)).collect());
        }
        self.catalog.battery(slot)?;
        Ok(BATTERY_FIELDS.iter().map(|(f, ..)| key(slot, f)).collect())
    }

    /// One random design problem per diagram slot, each reading its own block.
    pub fn components(&self) -> &BTreeMap<String, RandomDP> {
        &self.components
    }

    pub fn component(&self, slot: &str) -> Result<RandomDP, UavError> {
        let names = self.component_params(slot)?;
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let id = slot.to_string();
        let rdp = if slot == TASK_SLOT {
            let distance = self.task.distance;
            RandomDP::new(slot, self.space.clone(), &names, move |w| Ok(task_dp(w.get("N")?, distance)))?
        } else if self.catalog.actuator(slot).is_ok() {
            RandomDP::new(slot, self.space.clone(), &names, move |w| Ok(actuator_dp(&read_actuator(&id, w)?)))?
        } else {
            RandomDP::new(slot, self.space.clone(), &names, move |w| Ok(battery_dp(&read_battery(&id, w)?)))?
        };
        Ok(rdp)
    }

    /// Component realizations at one outcome, keyed by slot.
    pub fn bindings_at(&self, omega: &OmegaPoint) -> Result<Bindings, UavError> {
        let mut b = Bindings::new();
        for (slot, c) in &self.components {
            b.insert(slot.clone(), c.realize(omega)?);
        }
        Ok(b)
    }

    /// The system as a random design problem over the whole sample space.
    pub fn system_random(&self) -> Result<RandomDP, UavError> {
        Ok(compose_random(&self.components, &self.system)?)
    }

    /// A fixed combination as a random design problem.
    pub fn combo_random(&self, k: usize) -> Result<RandomDP, UavError> {
        let (a, b) = self.combo_ids(k);
        let parts: BTreeMap<String, RandomDP> =
            [a, b, TASK_SLOT].iter().map(|s| (s.to_string(), self.components[*s].clone())).collect();
        Ok(compose_random(&parts, &self.loops[k])?)
    }

    /// Minimal lifetime cost of combination `k` at `payload` given realized
    /// components; +inf when infeasible.
    pub fn combo_cost(&self, bindings: &Bindings, k: usize, payload: f64) -> Result<f64, UavError> {
        let dp = self.loops[k].solve(bindings)?;
        Ok(dp::min_resource(&dp, &[payload_point(payload)?], 0)?)
    }

    /// `[payload][combo]` minimal lifetime costs at one outcome.
    pub fn combo_costs(&self, omega: &OmegaPoint, payloads: &[f64]) -> Result<Vec<Vec<f64>>, UavError> {
        let bindings = self.bindings_at(omega)?;
        let dps: Vec<DesignProblem> = self.loops.iter().map(|d| d.solve(&bindings)).collect::<Result<_, _>>()?;
        payloads
            .iter()
            .map(|&p| {
                let f = [payload_point(p)?];
                dps.iter().map(|d| Ok(dp::min_resource(d, &f, 0)?)).collect()
            })
            .collect()
    }

    /// The raw Kleene iteration of combination `k`'s weight loop.
    pub fn combo_fixpoint(&self, omega: &OmegaPoint, k: usize, payload: f64) -> Result<KleeneOutcome, UavError> {
        let body = self.bodies[k].solve(&self.bindings_at(omega)?)?;
        Ok(kleene(&body, &self.trace, &payload_point(payload)?)?)
    }

    /// Outcomes with every catalog parameter moved by `frac` against
    /// (pessimistic) and in favour of (optimistic) feasibility. The mission
    /// count stays nominal.
    pub fn perturbed(&self, frac: f64) -> Result<(OmegaPoint, OmegaPoint), UavError> {
        let idx: Vec<usize> = (0..self.space.len()).filter(|&i| self.space.params()[i].block != Block::Task).collect();
        let nominal = self.space.nominal();
        let table: Vec<ParamEntry> = idx
            .iter()
            .map(|&i| {
                let p = &self.space.params()[i];
                ParamEntry { name: p.name.clone(), value: nominal.get(i), effect: p.effect }
            })
            .collect();
        let (pess, opt) = perturb_params(&table, frac)?;
        let (mut lo, mut hi) = (nominal.clone(), nominal);
        for ((&i, p), o) in idx.iter().zip(&pess).zip(&opt) {
            lo = lo.with(i, p.value);
            hi = hi.with(i, o.value);
        }
        Ok((lo, hi))
    }

    /// Per-slot pessimistic/optimistic component pairs for a relative
    /// perturbation `frac`.
    pub fn interval_components(&self, frac: f64) -> Result<BTreeMap<String, DPInterval>, UavError> {
        let (pess, opt) = self.perturbed(frac)?;
        let (lo, hi) = (self.bindings_at(&pess)?, self.bindings_at(&opt)?);
        lo.into_iter()
            .map(|(k, l)| {
                let u = hi[&k].clone();
                Ok((k, DPInterval::new(l, u)?))
            })
            .collect()
    }

    /// Rectangle inner bound of every component at probability `rho` per
    /// bounded scalar.
    pub fn component_inner_bounds(&self, rho: f64) -> Result<BTreeMap<String, InnerBound>, UavError> {
        self.components.iter().map(|(k, c)| Ok((k.clone(), inner_bound_rect(c, rho)?))).collect()
    }
}

fn read_actuator(id: &str, view: &OmegaView<'_>) -> Result<ActuatorModel, UncertaintyError> {
    Ok(ActuatorModel {
        id: id.to_string(),
        mass: view.get(&key(id, "mass"))?,
        cost: view.get(&key(id, "cost"))?,
        v_max: view.get(&key(id, "v_max"))?,
        p0: view.get(&key(id, "p0"))?,
        p1: view.get(&key(id, "p1"))?,
    })
}

fn read_battery(id: &str, view: &OmegaView<'_>) -> Result<BatteryTech, UncertaintyError> {
    Ok(BatteryTech {
        id: id.to_string(),
        energy_density: view.get(&key(id, "energy_density"))?,
        energy_per_cost: view.get(&key(id, "energy_per_cost"))?,
        cycles: view.get(&key(id, "cycles"))?,
    })
}

pub(crate) fn payload_point(p: f64) -> Result<Point, UavError> {
    Point::new([p]).map_err(|e| UavError::Setting(e.to_string()))
}

fn build_space(catalog: &Catalog, params: &UavParams, task: &TaskProfile) -> Result<Arc<SampleSpace>, UavError> {
    let calibrated = |p: ParamSpec, random: bool| {
        let mut p = p.with_fraction(if random { params.spread } else { 0.0 });
        p.level = params.level;
        p
    };
    let mut specs = vec![calibrated(
        ParamSpec::new("N", "1", task.num_missions, Effect::Harmful, Block::Task).integer().unbounded(),
        true,
    )];
    for a in &catalog.actuators {
        let values = [a.mass, a.cost, a.v_max, a.p0, a.p1];
        for ((field, unit, effect, random), v) in ACTUATOR_FIELDS.iter().zip(values) {
            specs.push(calibrated(ParamSpec::new(key(&a.id, field), *unit, v, *effect, Block::Actuator), *random));
        }
    }
    for b in &catalog.batteries {
        let values = [b.energy_density, b.energy_per_cost, b.cycles];
        for ((field, unit, effect), v) in BATTERY_FIELDS.iter().zip(values) {
            specs.push(calibrated(ParamSpec::new(key(&b.id, field), *unit, v, *effect, Block::Battery), true));
        }
    }
    Ok(SampleSpace::new(specs)?)
}

/// Loop body for one combination. Stages: lift beside task management;
/// rewire; actuator, perception and pass-through side by side; energy
/// sizing; battery beside pass-through; totals.
fn body(params: &UavParams, actuator: &str, battery: &str) -> Diagram {
    let task_res = chains(&[("missions", "1"), ("distance", "m")]);
    let s1 = Diagram::leaf(lift_dp(params.g)).beside(
        Diagram::slot(TASK_SLOT, PosetDescriptor::unit(), task_res).then(Diagram::leaf(task_management_dp(params.cruise_velocity))),
    );
    let wires = DesignProblem::wiring(
        "wires",
        chains(&[("lift", "N"), ("missions", "1"), ("endurance", "s"), ("velocity", "m/s")]),
        chains(&[("velocity", "m/s"), ("lift", "N"), ("velocity", "m/s"), ("missions", "1"), ("endurance", "s")]),
        vec![3, 0, 3, 1, 2],
    )
    .expect("directions agree");
    let s3 = Diagram::slot(
        actuator,
        chains(&[("velocity", "m/s"), ("lift", "N")]),
        chains(&[("power", "W"), ("cost", "$"), ("mass", "g")]),
    )
    .beside(Diagram::leaf(perception_dp(params.c0, params.c1)))
    .beside(Diagram::leaf(DesignProblem::identity(chains(&[("missions", "1"), ("endurance", "s")]))));
    let s5 = Diagram::slot(
        battery,
        chains(&[("capacity", "Wh"), ("missions", "1")]),
        chains(&[("battery mass", "g"), ("battery cost", "$")]),
    )
    .beside(Diagram::leaf(DesignProblem::identity(chains(&[("cost", "$"), ("mass", "g")]))));
    Diagram::chain([s1, Diagram::leaf(wires), s3, Diagram::leaf(energy_dp()), s5, Diagram::leaf(totals_dp(params.frame_mass))])
        .expect("non-empty chain")
}
