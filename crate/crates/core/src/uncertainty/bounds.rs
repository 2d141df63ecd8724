//! Inner confidence bounds from parameter rectangles, their composition, and
//! an empirical checker for outer bounds.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{ensure_disjoint, stats, Estimate, MonteCarlo, OmegaPoint, RandomDP, SampleSpace, UncertaintyError};
use crate::dp::Diagram;
use crate::interval::{lift_diagram, DPInterval, IntervalError};
use crate::poset::Point;

/// A design-problem interval that contains the realization with probability
/// at least `level`.
#[derive(Debug, Clone)]
pub struct InnerBound {
    pub interval: DPInterval,
    pub level: f64,
    /// Number of scalars bounded by the rectangle.
    pub k: usize,
    pub space: Arc<SampleSpace>,
    pub depends_on: BTreeSet<usize>,
}

/// Outcomes at the two corners of the central `rho` rectangle over the
/// bounded random parameters in `depends_on`; everything else stays nominal.
pub(crate) fn rectangle_corners(
    space: &SampleSpace,
    depends_on: &BTreeSet<usize>,
    rho: f64,
) -> Result<(OmegaPoint, OmegaPoint, usize), UncertaintyError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(UncertaintyError::Invalid(format!("rho = {rho} outside (0, 1)")));
    }
    let mut pess = space.nominal();
    let mut opt = space.nominal();
    let mut k = 0;
    for &i in depends_on {
        let p = &space.params()[i];
        if !p.is_random() || !p.bounded {
            continue;
        }
        let (lo, hi) = p.marginal()?.central_interval(rho);
        let (a, b) = p
            .effect
            .endpoints(p.finish(lo), p.finish(hi))
            .ok_or_else(|| IntervalError::NonMonotone(p.name.clone()))?;
        pess = pess.with(i, a);
        opt = opt.with(i, b);
        k += 1;
    }
    Ok((pess, opt, k))
}

/// Realizes `rdp` at the pessimistic and optimistic corners of the central
/// `rho` rectangle; the level is `rho^K`.
pub fn inner_bound_rect(rdp: &RandomDP, rho: f64) -> Result<InnerBound, UncertaintyError> {
    let (pess, opt, k) = rectangle_corners(rdp.space(), rdp.depends_on(), rho)?;
    let interval = DPInterval::new(rdp.realize(&pess)?, rdp.realize(&opt)?)?;
    Ok(InnerBound {
        interval,
        level: rho.powi(k as i32),
        k,
        space: rdp.space().clone(),
        depends_on: rdp.depends_on().clone(),
    })
}

/// Lifted diagram solve over independent component bounds; levels multiply.
pub fn compose_inner_bounds(bounds: &BTreeMap<String, InnerBound>, d: &Diagram) -> Result<InnerBound, UncertaintyError> {
    let first = bounds.values().next().ok_or_else(|| UncertaintyError::Invalid("no components".into()))?;
    let space = first.space.clone();
    if bounds.values().any(|b| *b.space != *space) {
        return Err(UncertaintyError::SpaceMismatch);
    }
    if let Some(missing) = d.slots().into_iter().find(|s| !bounds.contains_key(s)) {
        return Err(UncertaintyError::MissingComponent(missing));
    }
    let depends_on = ensure_disjoint(&space, bounds.values().map(|b| &b.depends_on))?;
    let slots: BTreeMap<String, DPInterval> = bounds.iter().map(|(k, b)| (k.clone(), b.interval.clone())).collect();
    Ok(InnerBound {
        interval: lift_diagram(d, &slots)?,
        level: bounds.values().map(|b| b.level).product(),
        k: bounds.values().map(|b| b.k).sum(),
        space,
        depends_on,
    })
}

struct ProbeCounts {
    below_lower: bool,
    above_upper: bool,
    inside: bool,
}

fn probe_realization(rdp: &RandomDP, interval: &DPInterval, probes: &[(Point, Point)], omega: &OmegaPoint) -> Result<ProbeCounts, UncertaintyError> {
    let dp = rdp.realize(omega)?;
    let (mut misses_lower, mut misses_upper, mut exceeds_upper) = (false, false, false);
    for (f, r) in probes {
        let real = dp.feasible(f, r)?;
        let lo = interval.lower().feasible(f, r)?;
        let up = interval.upper().feasible(f, r)?;
        misses_lower |= lo && !real;
        misses_upper |= up && !real;
        exceeds_upper |= real && !up;
    }
    Ok(ProbeCounts {
        below_lower: misses_lower,
        above_upper: !misses_upper && exceeds_upper,
        inside: !misses_lower && !exceeds_upper,
    })
}

/// `(p_hat, q_hat)`: fractions of realizations that fail to contain `lower`,
/// and that strictly contain `upper`, judged on the probe pairs.
pub fn check_outer_bound_empirical(
    rdp: &RandomDP,
    interval: &DPInterval,
    probes: &[(Point, Point)],
    mc: &MonteCarlo,
) -> Result<(f64, f64), UncertaintyError> {
    if mc.n == 0 {
        return Err(UncertaintyError::Invalid("n must be at least 1".into()));
    }
    let counts = mc.map(|i| probe_realization(rdp, interval, probes, &mc.omega(rdp.space(), i)?))?;
    let n = mc.n as f64;
    Ok((
        counts.iter().filter(|c| c.below_lower).count() as f64 / n,
        counts.iter().filter(|c| c.above_upper).count() as f64 / n,
    ))
}

/// Fraction of realizations lying between `lower` and `upper` on the probes.
pub fn coverage_on_probes(rdp: &RandomDP, interval: &DPInterval, probes: &[(Point, Point)], mc: &MonteCarlo) -> Result<Estimate, UncertaintyError> {
    if mc.n == 0 {
        return Err(UncertaintyError::Invalid("n must be at least 1".into()));
    }
    let counts = mc.map(|i| probe_realization(rdp, interval, probes, &mc.omega(rdp.space(), i)?))?;
    let p_hat = counts.iter().filter(|c| c.inside).count() as f64 / mc.n as f64;
    Ok(Estimate { p_hat, radius95: stats::binomial_radius95(p_hat, mc.n), n: mc.n })
}

