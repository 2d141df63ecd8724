//! Design problems as monotone maps from a functionality point to the
//! antichain of minimal feasible resources.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::poset::{Antichain, Coords, Point, PosetDescriptor, PosetError};

mod diagram;
mod ops;
mod trace;

pub use diagram::{solve_diagram, Bindings, Diagram};
pub use ops::{intersection, parallel, series, union};
pub use trace::{kleene, trace, KleeneOutcome, TraceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DpError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("{op}: descriptor mismatch {left} vs {right}")]
    Mismatch { op: &'static str, left: String, right: String },
    #[error("feedback loop is not monotone: loop requirement fell from {before} to {after} at iteration {iteration}")]
    NonMonotoneLoop { iteration: usize, before: f64, after: f64 },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("evaluator `{label}` produced an invalid point: {source}")]
    BadEvaluation { label: String, source: PosetError },
    #[error("diagram slot `{0}` is not bound")]
    UnboundSlot(String),
    #[error("ill-typed diagram: {0}")]
    IllTyped(String),
    #[error("empty query: at least one functionality is required")]
    EmptyQuery,
}

pub(crate) fn mismatch(op: &'static str, left: &PosetDescriptor, right: &PosetDescriptor) -> DpError {
    DpError::Mismatch { op, left: format!("{left:?}"), right: format!("{right:?}") }
}

type EvalFn = dyn Fn(&Point) -> Result<Antichain, DpError> + Send + Sync;

/// A monotone feasibility relation between a functionality poset and a
/// resource poset, presented by its minimal resources.
///
/// Cloning is cheap; the evaluator is shared.
#[derive(Clone)]
pub struct DesignProblem {
    label: Arc<str>,
    fun: PosetDescriptor,
    res: PosetDescriptor,
    eval: Arc<EvalFn>,
}

impl DesignProblem {
    /// `eval` receives points that already conform to `fun` and must be
    /// monotone: a larger functionality never admits more resources.
    pub fn new<F>(label: impl Into<Arc<str>>, fun: PosetDescriptor, res: PosetDescriptor, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Antichain, DpError> + Send + Sync + 'static,
    {
        Self { label: label.into(), fun, res, eval: Arc::new(eval) }
    }

    /// Single minimal resource per functionality, `None` meaning infeasible.
    pub fn from_partial_map<F>(label: impl Into<Arc<str>>, fun: PosetDescriptor, res: PosetDescriptor, f: F) -> Self
    where
        F: Fn(&[f64]) -> Option<Coords> + Send + Sync + 'static,
    {
        let label: Arc<str> = label.into();
        let res_desc = res.clone();
        let name = label.clone();
        Self::new(label, fun, res, move |x| match f(x.coords()) {
            None => Ok(Antichain::empty(res_desc.clone())),
            Some(coords) => {
                let p = Point::new(coords)
                    .map_err(|source| DpError::BadEvaluation { label: name.to_string(), source })?;
                Antichain::singleton(res_desc.clone(), p)
                    .map_err(|source| DpError::BadEvaluation { label: name.to_string(), source })
            }
        })
    }

    pub fn from_map<F>(label: impl Into<Arc<str>>, fun: PosetDescriptor, res: PosetDescriptor, f: F) -> Self
    where
        F: Fn(&[f64]) -> Coords + Send + Sync + 'static,
    {
        Self::from_partial_map(label, fun, res, move |x| Some(f(x)))
    }

    pub fn identity(desc: PosetDescriptor) -> Self {
        let res = desc.clone();
        Self::new("id", desc, res.clone(), move |f| Ok(Antichain::singleton(res.clone(), f.clone())?))
    }

    /// Output coordinate `k` copies input coordinate `sources[k]`. Covers
    /// permutation, duplication and projection of wires.
    pub fn wiring(
        label: impl Into<Arc<str>>,
        fun: PosetDescriptor,
        res: PosetDescriptor,
        sources: Vec<usize>,
    ) -> Result<Self, DpError> {
        if sources.len() != res.dim() {
            return Err(DpError::IllTyped(format!("wiring has {} sources for {} outputs", sources.len(), res.dim())));
        }
        for (k, &s) in sources.iter().enumerate() {
            if s >= fun.dim() || fun.direction(s) != res.direction(k) {
                return Err(DpError::IllTyped(format!("wiring output {k} cannot read input {s}")));
            }
        }
        Ok(Self::from_map(label, fun, res, move |x| sources.iter().map(|&s| x[s]).collect()))
    }

    /// The infeasible design problem.
    pub fn empty(fun: PosetDescriptor, res: PosetDescriptor) -> Self {
        let r = res.clone();
        Self::new("empty", fun, res, move |_| Ok(Antichain::empty(r.clone())))
    }

    /// The same minimal resources for every functionality.
    pub fn constant(label: impl Into<Arc<str>>, fun: PosetDescriptor, resources: Antichain) -> Self {
        let res = resources.descriptor().clone();
        Self::new(label, fun, res, move |_| Ok(resources.clone()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<Arc<str>>) -> Self {
        self.label = label.into();
        self
    }

    pub fn fun(&self) -> &PosetDescriptor {
        &self.fun
    }

    pub fn res(&self) -> &PosetDescriptor {
        &self.res
    }

    /// Minimal feasible resources for `f`.
    pub fn eval(&self, f: &Point) -> Result<Antichain, DpError> {
        self.fun.conforms(f)?;
        (self.eval)(f)
    }

    pub fn feasible(&self, f: &Point, r: &Point) -> Result<bool, DpError> {
        self.res.conforms(r)?;
        Ok(self.eval(f)?.dominates_unchecked(r))
    }
}

impl fmt::Debug for DesignProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DesignProblem({}: {:?} → {:?})", self.label, self.fun, self.res)
    }
}

/// Minimal resources feasible for every functionality in `fs`.
pub fn fix_fun_min_res(dp: &DesignProblem, fs: &[Point]) -> Result<Antichain, DpError> {
    let (first, rest) = fs.split_first().ok_or(DpError::EmptyQuery)?;
    let mut acc = dp.eval(first)?;
    for f in rest {
        if acc.is_empty() {
            break;
        }
        acc = acc.intersection(&dp.eval(f)?)?;
    }
    Ok(acc)
}

/// Infimum of resource coordinate `coord` over resources feasible for every
/// functionality in `fs`; +inf when infeasible. `coord` must be increasing.
pub fn min_resource(dp: &DesignProblem, fs: &[Point], coord: usize) -> Result<f64, DpError> {
    if coord >= dp.res().dim() || dp.res().direction(coord) != crate::poset::Direction::Increasing {
        return Err(DpError::IllTyped(format!("resource coordinate {coord} is not an increasing chain")));
    }
    Ok(fix_fun_min_res(dp, fs)?.min_coord(coord))
}
