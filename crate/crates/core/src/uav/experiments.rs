use serde::Serialize;

use super::model::payload_point;
use super::{UavError, UavModel};
use crate::dp;
use crate::interval::lift_diagram;
use crate::uncertainty::{compose_inner_bounds, MonteCarlo, OmegaPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    /// g
    pub payload: f64,
    /// $, +inf when infeasible
    pub min_cost: f64,
    /// Index into [`UavModel::combos`] of the cheapest combination.
    pub choice: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub label: String,
    pub rows: Vec<CurveRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalCurves {
    pub optimistic: Curve,
    pub nominal: Curve,
    pub pessimistic: Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub payload: f64,
    /// Minimal cost of the optimistic end of the composed inner bound.
    pub lower_cost: f64,
    /// Minimal cost of the pessimistic end.
    pub upper_cost: f64,
    pub level: f64,
    pub out_of_bound_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distributional {
    pub payloads: Vec<f64>,
    /// `[payload][sample]` minimal lifetime cost under free choice.
    pub samples: Vec<Vec<f64>>,
    /// `[payload][sample]` cheapest combination, `None` when all infeasible.
    pub argmin: Vec<Vec<Option<usize>>>,
    /// `[payload][combo]` frequency of being cheapest.
    pub choice_probs: Vec<Vec<f64>>,
    /// `[payload]` frequency of no feasible combination.
    pub infeasible: Vec<f64>,
    pub bounds: Vec<BoundRow>,
}

pub(crate) fn check_payloads(payloads: &[f64]) -> Result<(), UavError> {
    if let Some(p) = payloads.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(UavError::Setting(format!("payload {p} must be finite and nonnegative")));
    }
    Ok(())
}

/// First minimum in catalog order.
pub(crate) fn argmin(costs: &[f64]) -> (f64, Option<usize>) {
    costs.iter().enumerate().fold((f64::INFINITY, None), |(best, arg), (k, &c)| if c < best { (c, Some(k)) } else { (best, arg) })
}

fn curve_at(model: &UavModel, label: &str, omega: &OmegaPoint, payloads: &[f64]) -> Result<Curve, UavError> {
    check_payloads(payloads)?;
    let costs = model.combo_costs(omega, payloads)?;
    let rows = payloads
        .iter()
        .zip(costs)
        .map(|(&payload, c)| {
            let (min_cost, choice) = argmin(&c);
            CurveRow { payload, min_cost, choice }
        })
        .collect();
    Ok(Curve { label: label.into(), rows })
}

/// Minimal lifetime cost per payload at nominal parameters.
pub fn experiment_deterministic(model: &UavModel, payloads: &[f64]) -> Result<Curve, UavError> {
    curve_at(model, "nominal", &model.nominal(), payloads)
}

/// Optimistic, nominal and pessimistic curves for catalog parameters moved
/// by `frac`. Each curve picks its own cheapest combination.
pub fn experiment_interval(model: &UavModel, payloads: &[f64], frac: f64) -> Result<IntervalCurves, UavError> {
    let (pess, opt) = model.perturbed(frac)?;
    let mut optimistic = curve_at(model, "optimistic", &opt, payloads)?;
    let nominal = curve_at(model, "nominal", &model.nominal(), payloads)?;
    let mut pessimistic = curve_at(model, "pessimistic", &pess, payloads)?;
    let lifted = lift_diagram(model.system_diagram(), &model.interval_components(frac)?)?;
    for (curve, dp) in [(&mut optimistic, lifted.upper()), (&mut pessimistic, lifted.lower())] {
        for row in &mut curve.rows {
            row.min_cost = dp::min_resource(dp, &[payload_point(row.payload)?], 0)?;
        }
    }
    Ok(IntervalCurves { optimistic, nominal, pessimistic })
}

/// Free choice after observing every parameter: per-sample minimal cost,
/// optimality frequencies, and the composed rectangle bound at `rho`.
pub fn experiment_distributional(model: &UavModel, payloads: &[f64], mc: &MonteCarlo, rho: f64) -> Result<Distributional, UavError> {
    check_payloads(payloads)?;
    if mc.n == 0 {
        return Err(UavError::Setting("n must be at least 1".into()));
    }
    let per_sample = mc.map(|i| {
        let costs = model.combo_costs(&mc.omega(model.space(), i)?, payloads)?;
        Ok::<_, UavError>(costs.iter().map(|c| argmin(c)).collect::<Vec<_>>())
    })?;
    let n = mc.n as f64;
    let ncombo = model.combos().len();
    let mut samples = Vec::with_capacity(payloads.len());
    let mut argmins = Vec::with_capacity(payloads.len());
    let mut choice_probs = Vec::with_capacity(payloads.len());
    let mut infeasible = Vec::with_capacity(payloads.len());
    for j in 0..payloads.len() {
        let col: Vec<(f64, Option<usize>)> = per_sample.iter().map(|s| s[j]).collect();
        let mut counts = vec![0usize; ncombo];
        let mut none = 0usize;
        for (_, a) in &col {
            match a {
                Some(k) => counts[*k] += 1,
                None => none += 1,
            }
        }
        choice_probs.push(counts.iter().map(|&c| c as f64 / n).collect());
        infeasible.push(none as f64 / n);
        samples.push(col.iter().map(|s| s.0).collect::<Vec<f64>>());
        argmins.push(col.iter().map(|s| s.1).collect());
    }

    let bound = compose_inner_bounds(&model.component_inner_bounds(rho)?, model.system_diagram())?;
    let mut bounds = Vec::with_capacity(payloads.len());
    for (j, &payload) in payloads.iter().enumerate() {
        let f = [payload_point(payload)?];
        let lower_cost = dp::min_resource(bound.interval.upper(), &f, 0)?;
        let upper_cost = dp::min_resource(bound.interval.lower(), &f, 0)?;
        let outside = samples[j].iter().filter(|&&c| c < lower_cost || c > upper_cost).count();
        bounds.push(BoundRow { payload, lower_cost, upper_cost, level: bound.level, out_of_bound_frac: outside as f64 / n });
    }
    Ok(Distributional { payloads: payloads.to_vec(), samples, argmin: argmins, choice_probs, infeasible, bounds })
}
