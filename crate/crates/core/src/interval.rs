//! Pessimistic/optimistic pairs of design problems and their lifted
//! composition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::{self, Bindings, DesignProblem, Diagram, DpError, TraceSpec};
use crate::poset::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error("{op} takes {expected} operand(s), got {got}")]
    Arity { op: &'static str, expected: usize, got: usize },
    #[error("perturbation fraction {0} outside [0, 1)")]
    Fraction(f64),
    #[error("parameter `{0}` has no monotone effect on feasibility")]
    NonMonotone(String),
    #[error("pessimistic problem admits ({f:?}, {r:?}) but the optimistic one does not")]
    NotNested { f: Box<Point>, r: Box<Point> },
}

/// `lower` is the pessimistic problem, `upper` the optimistic one; every
/// pair feasible for `lower` is feasible for `upper`.
#[derive(Clone, Debug)]
pub struct DPInterval {
    lower: DesignProblem,
    upper: DesignProblem,
}

impl DPInterval {
    /// Checks only that the interfaces agree; nesting is checked on probes
    /// with [`DPInterval::check_nested`].
    pub fn new(lower: DesignProblem, upper: DesignProblem) -> Result<Self, IntervalError> {
        if !lower.fun().compatible(upper.fun()) {
            return Err(dp_mismatch(&lower, &upper));
        }
        if !lower.res().compatible(upper.res()) {
            return Err(dp_mismatch(&lower, &upper));
        }
        Ok(Self { lower, upper })
    }

    pub fn degenerate(dp: DesignProblem) -> Self {
        Self { lower: dp.clone(), upper: dp }
    }

    pub fn lower(&self) -> &DesignProblem {
        &self.lower
    }

    pub fn upper(&self) -> &DesignProblem {
        &self.upper
    }

    pub fn check_nested(&self, probes: &[(Point, Point)]) -> Result<(), IntervalError> {
        for (f, r) in probes {
            if self.lower.feasible(f, r)? && !self.upper.feasible(f, r)? {
                return Err(IntervalError::NotNested { f: Box::new(f.clone()), r: Box::new(r.clone()) });
            }
        }
        Ok(())
    }
}

fn dp_mismatch(a: &DesignProblem, b: &DesignProblem) -> IntervalError {
    IntervalError::Dp(DpError::Mismatch {
        op: "interval",
        left: format!("{:?}→{:?}", a.fun(), a.res()),
        right: format!("{:?}→{:?}", b.fun(), b.res()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LiftOp {
    Series,
    Parallel,
    Union,
    Intersection,
    Trace(TraceSpec),
}

impl LiftOp {
    fn name(&self) -> &'static str {
        match self {
            LiftOp::Series => "series",
            LiftOp::Parallel => "parallel",
            LiftOp::Union => "union",
            LiftOp::Intersection => "intersection",
            LiftOp::Trace(_) => "trace",
        }
    }

    fn apply(&self, xs: &[&DesignProblem]) -> Result<DesignProblem, DpError> {
        match (self, xs) {
            (LiftOp::Series, [a, b]) => dp::series(a, b),
            (LiftOp::Parallel, [a, b]) => dp::parallel(a, b),
            (LiftOp::Union, [a, b]) => dp::union(a, b),
            (LiftOp::Intersection, [a, b]) => dp::intersection(a, b),
            (LiftOp::Trace(spec), [a]) => dp::trace(a, *spec),
            _ => unreachable!("arity checked by lift_op"),
        }
    }
}

/// Applies `op` endpoint-wise. Every operation is monotone in its operands,
/// so nesting is preserved.
pub fn lift_op(op: LiftOp, operands: &[DPInterval]) -> Result<DPInterval, IntervalError> {
    let expected = if matches!(op, LiftOp::Trace(_)) { 1 } else { 2 };
    if operands.len() != expected {
        return Err(IntervalError::Arity { op: op.name(), expected, got: operands.len() });
    }
    let lowers: Vec<&DesignProblem> = operands.iter().map(|i| &i.lower).collect();
    let uppers: Vec<&DesignProblem> = operands.iter().map(|i| &i.upper).collect();
    Ok(DPInterval { lower: op.apply(&lowers)?, upper: op.apply(&uppers)? })
}

/// Solves a diagram once with the pessimistic and once with the optimistic
/// endpoint bound to every slot.
pub fn lift_diagram(
    d: &Diagram,
    slots: &std::collections::BTreeMap<String, DPInterval>,
) -> Result<DPInterval, IntervalError> {
    let lower: Bindings = slots.iter().map(|(k, v)| (k.clone(), v.lower.clone())).collect();
    let upper: Bindings = slots.iter().map(|(k, v)| (k.clone(), v.upper.clone())).collect();
    Ok(DPInterval { lower: d.solve(&lower)?, upper: d.solve(&upper)? })
}

/// How a scalar parameter acts on feasibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Effect {
    /// Larger values shrink the feasible set (masses, costs, power coefficients).
    Harmful,
    /// Larger values enlarge it (energy density, energy per cost, cycles, v_max).
    Helpful,
    /// Neither; no interval endpoint can be derived from a parameter range.
    NonMonotone,
}

impl Effect {
    /// `(pessimistic, optimistic)` endpoints for a `[lo, hi]` range of the parameter.
    pub fn endpoints(self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        match self {
            Effect::Harmful => Some((hi, lo)),
            Effect::Helpful => Some((lo, hi)),
            Effect::NonMonotone => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub value: f64,
    pub effect: Effect,
}

/// Multiplies every entry by `1 ± frac`, the sign chosen so that the first
/// table is the pessimistic one.
pub fn perturb_params(nominal: &[ParamEntry], frac: f64) -> Result<(Vec<ParamEntry>, Vec<ParamEntry>), IntervalError> {
    if !(0.0..1.0).contains(&frac) {
        return Err(IntervalError::Fraction(frac));
    }
    let mut pess = nominal.to_vec();
    let mut opt = nominal.to_vec();
    for (p, o) in pess.iter_mut().zip(opt.iter_mut()) {
        let (lo, hi) = (p.value * (1.0 - frac), p.value * (1.0 + frac));
        (p.value, o.value) = p.effect.endpoints(lo, hi).ok_or_else(|| IntervalError::NonMonotone(p.name.clone()))?;
    }
    Ok((pess, opt))
}
