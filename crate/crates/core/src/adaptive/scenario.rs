//! The three adaptivity levels of the UAV benchmark as staged processes.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{estimate_map_policy, inner_stream, map_choice, AdaptiveError, Kernel, Policy, StagedProcess};
use crate::dp::{self, Bindings, DesignProblem};
use crate::uav::{actuator_dp, ActuatorModel, UavModel, TASK_SLOT};
use crate::uncertainty::stats::{mean_se, quantile_sorted, sorted};
use crate::uncertainty::{par_map, sample_omega, tag, MonteCarlo, RandomDP, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Actuator and battery fixed before anything is observed.
    NonAdaptive,
    /// Actuator fixed first; battery chosen after observing the actuator.
    PartlyAdaptive,
    /// Both chosen after observing every parameter.
    FullyAdaptive,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::NonAdaptive, Level::PartlyAdaptive, Level::FullyAdaptive];

    pub fn name(self) -> &'static str {
        match self {
            Level::NonAdaptive => "non_adaptive",
            Level::PartlyAdaptive => "partly_adaptive",
            Level::FullyAdaptive => "fully_adaptive",
        }
    }
}

impl FromStr for Level {
    type Err = AdaptiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| AdaptiveError::Invalid(format!("unknown level `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSettings {
    /// Samples used to fit the pre-observation policies.
    pub policy_n: usize,
    /// Inner samples per observation for the post-observation battery policy.
    pub inner_n: usize,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        Self { policy_n: 500, inner_n: 200 }
    }
}

/// Pre-observation decisions per payload, fitted on samples disjoint from
/// the evaluation samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyTable {
    pub payloads: Vec<f64>,
    /// Combination committed to by the non-adaptive process.
    pub pair: Vec<usize>,
    /// Actuator committed to by the partly adaptive process.
    pub actuator: Vec<usize>,
    /// Batteries ever cheapest together with that actuator; the partly
    /// adaptive battery policy chooses among these.
    pub battery_candidates: Vec<Vec<usize>>,
}

impl PolicyTable {
    pub fn fit(model: &UavModel, payloads: &[f64], settings: &AdaptiveSettings, seed: u64, workers: usize) -> Result<Self, AdaptiveError> {
        if settings.policy_n == 0 || settings.inner_n == 0 {
            return Err(AdaptiveError::Invalid("policy_n and inner_n must be at least 1".into()));
        }
        let costs = par_map(settings.policy_n, workers, |i| {
            let omega = sample_omega(model.space(), &Stream::new(seed, &[tag::POLICY, 0, i as u64]))?;
            Ok::<_, AdaptiveError>(model.combo_costs(&omega, payloads)?)
        })?;
        let nb = model.catalog().batteries.len();
        let na = model.catalog().actuators.len();
        let (mut pair, mut actuator, mut battery_candidates) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..payloads.len() {
            let at: Vec<Vec<f64>> = costs.iter().map(|c| c[j].clone()).collect();
            pair.push(map_choice(&at)?.choice);
            let per_actuator: Vec<Vec<f64>> = at
                .iter()
                .map(|c| (0..na).map(|a| c[a * nb..(a + 1) * nb].iter().copied().fold(f64::INFINITY, f64::min)).collect())
                .collect();
            let a = map_choice(&per_actuator)?.choice;
            actuator.push(a);
            let with_a: Vec<Vec<f64>> = at.iter().map(|c| c[a * nb..(a + 1) * nb].to_vec()).collect();
            let est = map_choice(&with_a)?;
            let mut cands: Vec<usize> = (0..nb).filter(|&b| est.prob[b] > 0.0).collect();
            if cands.is_empty() {
                cands = (0..nb).collect();
            }
            battery_candidates.push(cands);
        }
        Ok(Self { payloads: payloads.to_vec(), pair, actuator, battery_candidates })
    }
}

/// A process's outcome for one sample: the committed combination and its
/// realized design problem.
#[derive(Debug, Clone)]
pub struct Step {
    pub combo: usize,
    pub dp: DesignProblem,
}

/// Reads the parameter block of a component from the world stream: the
/// specification vector of that choice in field order.
pub fn observe_component(model: &UavModel, id: &str) -> Result<Kernel<(), Vec<f64>>, AdaptiveError> {
    let names = model.component_params(id).map_err(|_| AdaptiveError::UnknownChoice(id.into()))?;
    let space = model.space().clone();
    let idx = names.iter().map(|n| space.index_of(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(Kernel::new(format!("obs {id}"), move |_: &(), s| {
        idx.iter().map(|&i| Ok(space.sample_coord(i, s)?)).collect()
    }))
}

fn actuator_from_spec(id: &str, v: &[f64]) -> ActuatorModel {
    ActuatorModel { id: id.into(), mass: v[0], cost: v[1], v_max: v[2], p0: v[3], p1: v[4] }
}

type Input = (usize, f64);

/// Realizes the committed combination from the world stream.
fn realize_stage(model: &UavModel) -> Result<Kernel<(usize, f64, usize), Step>, AdaptiveError> {
    let combos: Arc<Vec<RandomDP>> =
        Arc::new((0..model.combos().len()).map(|k| model.combo_random(k)).collect::<Result<_, _>>()?);
    let space = model.space().clone();
    Ok(Kernel::new("realize", move |&(_, _, k), s| {
        let omega = sample_omega(&space, s)?;
        Ok(Step { combo: k, dp: combos[k].realize(&omega)? })
    }))
}

/// Battery policy after observing actuator `a`: nested Monte Carlo over the
/// battery parameters and mission count, shared across observations.
fn battery_policy(
    model: &Arc<UavModel>,
    a: usize,
    candidates: Vec<usize>,
    payload: f64,
    inner: Arc<Vec<Bindings>>,
    settings: &AdaptiveSettings,
    seed: u64,
) -> Result<Policy<Vec<f64>>, AdaptiveError> {
    let m = model.clone();
    let nb = m.catalog().batteries.len();
    let a_id = m.catalog().actuators[a].id.clone();
    let cands = candidates.clone();
    // `inner[j]` memoizes the components drawn from `inner_stream(seed, j)`
    estimate_map_policy(
        candidates,
        move |spec: &Vec<f64>, j, _| {
            let act = actuator_dp(&actuator_from_spec(&a_id, spec));
            cands
                .iter()
                .map(|&b| {
                    let (_, b_id) = m.combo_ids(a * nb + b);
                    let mut bind = Bindings::new();
                    bind.insert(a_id.clone(), act.clone());
                    bind.insert(b_id.to_string(), inner[j][b_id].clone());
                    bind.insert(TASK_SLOT.to_string(), inner[j][TASK_SLOT].clone());
                    Ok(m.combo_cost(&bind, a * nb + b, payload)?)
                })
                .collect()
        },
        settings.inner_n,
        seed,
    )
}

fn inner_bindings(model: &UavModel, settings: &AdaptiveSettings, seed: u64) -> Result<Vec<Bindings>, AdaptiveError> {
    (0..settings.inner_n)
        .map(|j| Ok(model.bindings_at(&sample_omega(model.space(), &inner_stream(seed, j))?)?))
        .collect()
}

/// The staged process of one adaptivity level. Its input is
/// `(payload index, payload)`.
pub fn build_scenario(
    level: Level,
    model: &Arc<UavModel>,
    policies: &PolicyTable,
    settings: &AdaptiveSettings,
    seed: u64,
) -> Result<StagedProcess<Input, Step>, AdaptiveError> {
    let nb = model.catalog().batteries.len();
    let realize = realize_stage(model)?;
    match level {
        Level::NonAdaptive => {
            let table = policies.pair.clone();
            let pi = Kernel::deterministic("pi_AB", move |&(j, p): &Input| Ok((j, p, table[j])));
            Ok(StagedProcess::start().decide(pi).observe(realize))
        }
        Level::PartlyAdaptive => {
            let table = policies.actuator.clone();
            let pi_a = Kernel::deterministic("pi_A", move |&(j, p): &Input| Ok((j, p, table[j])));
            let obs: Vec<Kernel<(), Vec<f64>>> =
                model.catalog().actuators.iter().map(|a| observe_component(model, &a.id)).collect::<Result<_, _>>()?;
            let obs_a = Kernel::new("obs_A", move |&(j, p, a): &(usize, f64, usize), s| Ok((j, p, a, obs[a].sample(&(), s)?)));
            let inner = Arc::new(inner_bindings(model, settings, seed)?);
            let pis: Vec<Policy<Vec<f64>>> = policies
                .payloads
                .iter()
                .enumerate()
                .map(|(j, &p)| {
                    battery_policy(model, policies.actuator[j], policies.battery_candidates[j].clone(), p, inner.clone(), settings, seed)
                })
                .collect::<Result<_, _>>()?;
            let pi_b = Kernel::new("pi_B", move |(j, p, a, spec): &(usize, f64, usize, Vec<f64>), s| {
                let b = pis[*j].decide(spec, s)?;
                Ok((*j, *p, a * nb + b))
            });
            Ok(StagedProcess::start().decide(pi_a).observe(obs_a).decide(pi_b).observe(realize))
        }
        Level::FullyAdaptive => {
            let space = model.space().clone();
            let obs_all = Kernel::new("obs_all", move |&(j, p): &Input, s| Ok((j, p, sample_omega(&space, s)?)));
            let m = model.clone();
            let pi = Kernel::deterministic("pi_AB", move |(j, p, omega): &(usize, f64, crate::uncertainty::OmegaPoint)| {
                let costs = m.combo_costs(omega, &[*p])?;
                let k = costs[0].iter().enumerate().fold((f64::INFINITY, 0), |(b, a), (k, &c)| if c < b { (c, k) } else { (b, a) }).1;
                Ok((*j, *p, k))
            });
            Ok(StagedProcess::start().observe(obs_all).decide(pi).observe(realize))
        }
    }
}

/// `[payload][sample]` minimal lifetime cost of the realized commitment.
/// Sample `i` lives in the world generated by outcome stream `i`.
pub fn run_process(p: &StagedProcess<Input, Step>, payloads: &[f64], mc: &MonteCarlo) -> Result<Vec<Vec<f64>>, AdaptiveError> {
    if mc.n == 0 {
        return Err(AdaptiveError::Invalid("n must be at least 1".into()));
    }
    let per_sample = mc.map(|i| {
        let world = mc.nature(i);
        payloads
            .iter()
            .enumerate()
            .map(|(j, &payload)| {
                let step = p.run(&(j, payload), &world)?;
                let f = crate::poset::Point::new([payload]).map_err(|e| AdaptiveError::Invalid(e.to_string()))?;
                Ok(dp::min_resource(&step.dp, &[f], 0)?)
            })
            .collect::<Result<Vec<f64>, AdaptiveError>>()
    })?;
    Ok((0..payloads.len()).map(|j| per_sample.iter().map(|s| s[j]).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: Level,
    pub payload: f64,
    pub mean: f64,
    pub se: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub infeasible_frac: f64,
}

const Z95: f64 = 1.959963984540054;

/// Paired comparison of `worse` against `better` on common samples.
///
/// A mean cost is infinite as soon as infeasibility has positive
/// probability, so the comparison is lexicographic: first the gap in
/// infeasibility rates, then the mean gap over samples where both are
/// feasible. Radii are 95% normal half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDiff {
    pub payload: f64,
    pub worse: Level,
    pub better: Level,
    /// Mean of `worse − better` with `∞ − ∞` read as 0; ±inf or NaN when
    /// only one side is infeasible somewhere.
    pub mean: f64,
    /// Frequency of only `worse` infeasible minus that of only `better`.
    pub infeasible_gap: f64,
    pub infeasible_radius95: f64,
    /// Mean of `worse − better` where both are finite; NaN if none are.
    pub finite_mean: f64,
    pub finite_radius95: f64,
    pub finite_n: usize,
}

impl PairedDiff {
    pub fn of(payload: f64, worse: (Level, &[f64]), better: (Level, &[f64])) -> Self {
        let pairs: Vec<(f64, f64)> = worse.1.iter().copied().zip(better.1.iter().copied()).collect();
        let d: Vec<f64> = pairs.iter().map(|&(a, b)| if a == b { 0.0 } else { a - b }).collect();
        let e: Vec<f64> = pairs
            .iter()
            .map(|&(a, b)| match (a.is_infinite(), b.is_infinite()) {
                (true, false) => 1.0,
                (false, true) => -1.0,
                _ => 0.0,
            })
            .collect();
        let f: Vec<f64> = pairs.iter().filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| a - b).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let (infeasible_gap, se_e) = mean_se(&e);
        let (finite_mean, se_f) = mean_se(&f);
        Self {
            payload,
            worse: worse.0,
            better: better.0,
            mean,
            infeasible_gap,
            infeasible_radius95: Z95 * se_e,
            finite_mean,
            finite_radius95: Z95 * se_f,
            finite_n: f.len(),
        }
    }

    fn finite_interval(&self) -> (f64, f64) {
        if self.finite_n == 0 {
            return (0.0, 0.0);
        }
        (self.finite_mean - self.finite_radius95, self.finite_mean + self.finite_radius95)
    }

    /// `worse` is not significantly cheaper than `better`.
    pub fn ordered(&self) -> bool {
        let (lo, hi) = (self.infeasible_gap - self.infeasible_radius95, self.infeasible_gap + self.infeasible_radius95);
        hi >= 0.0 && (lo > 0.0 || self.finite_interval().1 >= 0.0)
    }

    /// `better` is significantly cheaper than `worse`.
    pub fn strict(&self) -> bool {
        let (lo, hi) = (self.infeasible_gap - self.infeasible_radius95, self.infeasible_gap + self.infeasible_radius95);
        lo > 0.0 || (hi >= 0.0 && self.finite_interval().0 > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adaptive {
    pub payloads: Vec<f64>,
    pub policies: PolicyTable,
    /// `(level, [payload][sample])`
    pub samples: Vec<(Level, Vec<Vec<f64>>)>,
    pub summaries: Vec<LevelSummary>,
    pub diffs: Vec<PairedDiff>,
}

/// Runs all three levels on common outcomes.
pub fn experiment_adaptive(model: &Arc<UavModel>, payloads: &[f64], mc: &MonteCarlo, settings: &AdaptiveSettings) -> Result<Adaptive, AdaptiveError> {
    let policies = PolicyTable::fit(model, payloads, settings, mc.seed, mc.workers)?;
    let mut samples = Vec::new();
    for level in Level::ALL {
        let p = build_scenario(level, model, &policies, settings, mc.seed)?;
        samples.push((level, run_process(&p, payloads, mc)?));
    }
    let mut summaries = Vec::new();
    for (level, per_payload) in &samples {
        for (j, xs) in per_payload.iter().enumerate() {
            let (mean, se) = mean_se(xs);
            let s = sorted(xs);
            summaries.push(LevelSummary {
                level: *level,
                payload: payloads[j],
                mean,
                se,
                q05: quantile_sorted(&s, 0.05),
                q50: quantile_sorted(&s, 0.50),
                q95: quantile_sorted(&s, 0.95),
                infeasible_frac: xs.iter().filter(|c| c.is_infinite()).count() as f64 / xs.len() as f64,
            });
        }
    }
    let by = |l: Level| &samples.iter().find(|(x, _)| *x == l).expect("all levels run").1;
    let mut diffs = Vec::new();
    for (j, &payload) in payloads.iter().enumerate() {
        for (w, b) in [
            (Level::NonAdaptive, Level::PartlyAdaptive),
            (Level::PartlyAdaptive, Level::FullyAdaptive),
            (Level::NonAdaptive, Level::FullyAdaptive),
        ] {
            diffs.push(PairedDiff::of(payload, (w, &by(w)[j]), (b, &by(b)[j])));
        }
    }
    Ok(Adaptive { payloads: payloads.to_vec(), policies, samples, summaries, diffs })
}
