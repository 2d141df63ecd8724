//! Product sample spaces, random design problems and Monte Carlo queries.
//!
//! Every outcome `ω` of sample `i` is drawn from the stream
//! `[tag::OMEGA, i]` under the master seed, so the same `i` sees the same
//! parameters in every experiment, at every payload and under any worker
//! count.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::dp::{self, Bindings, DesignProblem, Diagram, DpError};
use crate::interval::IntervalError;
use crate::poset::Point;

mod bounds;
pub mod rng;
mod space;
pub mod stats;

pub use bounds::{check_outer_bound_empirical, compose_inner_bounds, coverage_on_probes, inner_bound_rect, InnerBound};
pub use rng::{tag, Stream};
pub use space::{sample_omega, Block, OmegaPoint, OmegaView, ParamSpec, SampleSpace};
pub use stats::{sigma_from_calibration, TruncatedNormal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UncertaintyError {
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("invalid calibration: nominal {nominal}, fraction {fraction}, level {level}")]
    Calibration { nominal: f64, fraction: f64, level: f64 },
    #[error("parameter `{0}` appears twice")]
    DuplicateParam(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("realization read undeclared parameter `{0}`")]
    UndeclaredDependency(String),
    #[error("rejection sampling of `{0}` exceeded the retry budget")]
    Truncation(String),
    #[error("outcome has {got} coordinates, space has {expected}")]
    OmegaShape { expected: usize, got: usize },
    #[error("parameter `{name}` = {value} is below its lower bound")]
    BelowBound { name: String, value: f64 },
    #[error("components share parameters {0:?}; the sample space does not decompose")]
    OverlappingDependencies(Vec<String>),
    #[error("components live on different sample spaces")]
    SpaceMismatch,
    #[error("diagram slot `{0}` has no component")]
    MissingComponent(String),
    #[error("{0}")]
    Invalid(String),
}

type RealizeFn = dyn Fn(&OmegaView<'_>) -> Result<DesignProblem, UncertaintyError> + Send + Sync;

/// A random design problem: a realization map from outcomes of a shared
/// sample space to design problems, reading only `depends_on`.
#[derive(Clone)]
pub struct RandomDP {
    label: Arc<str>,
    space: Arc<SampleSpace>,
    depends_on: Arc<BTreeSet<usize>>,
    realize: Arc<RealizeFn>,
}

impl RandomDP {
    pub fn new<F>(label: impl Into<Arc<str>>, space: Arc<SampleSpace>, depends_on: &[&str], realize: F) -> Result<Self, UncertaintyError>
    where
        F: Fn(&OmegaView<'_>) -> Result<DesignProblem, UncertaintyError> + Send + Sync + 'static,
    {
        let depends_on = Arc::new(space.indices(depends_on)?);
        Ok(Self { label: label.into(), space, depends_on, realize: Arc::new(realize) })
    }

    /// The constant random variable at `dp`.
    pub fn constant(space: Arc<SampleSpace>, dp: DesignProblem) -> Self {
        Self {
            label: dp.label().into(),
            space,
            depends_on: Arc::new(BTreeSet::new()),
            realize: Arc::new(move |_| Ok(dp.clone())),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn depends_on(&self) -> &BTreeSet<usize> {
        &self.depends_on
    }

    pub fn depends_on_names(&self) -> Vec<&str> {
        self.depends_on.iter().map(|&i| self.space.params()[i].name.as_str()).collect()
    }

    pub fn realize(&self, omega: &OmegaPoint) -> Result<DesignProblem, UncertaintyError> {
        if omega.values().len() != self.space.len() {
            return Err(UncertaintyError::OmegaShape { expected: self.space.len(), got: omega.values().len() });
        }
        (self.realize)(&OmegaView { space: &self.space, omega, allowed: &self.depends_on })
    }
}

impl std::fmt::Debug for RandomDP {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RandomDP({}, depends on {:?})", self.label, self.depends_on_names())
    }
}

fn ensure_disjoint<'a>(space: &SampleSpace, sets: impl IntoIterator<Item = &'a BTreeSet<usize>>) -> Result<BTreeSet<usize>, UncertaintyError> {
    let mut seen = BTreeSet::new();
    let mut overlap = BTreeSet::new();
    for set in sets {
        for &i in set {
            if !seen.insert(i) {
                overlap.insert(i);
            }
        }
    }
    if overlap.is_empty() {
        Ok(seen)
    } else {
        Err(UncertaintyError::OverlappingDependencies(overlap.iter().map(|&i| space.params()[i].name.clone()).collect()))
    }
}

/// Realizes each component at the same outcome and solves the diagram.
/// Components must read disjoint parameters so that the composite's law is
/// the product-measure pushforward.
pub fn compose_random(components: &BTreeMap<String, RandomDP>, d: &Diagram) -> Result<RandomDP, UncertaintyError> {
    let first = components.values().next().ok_or_else(|| UncertaintyError::Invalid("no components".into()))?;
    let space = first.space.clone();
    if components.values().any(|c| *c.space != *space) {
        return Err(UncertaintyError::SpaceMismatch);
    }
    if let Some(missing) = d.slots().into_iter().find(|s| !components.contains_key(s)) {
        return Err(UncertaintyError::MissingComponent(missing));
    }
    d.interface()?;
    let depends_on = ensure_disjoint(&space, components.values().map(|c| &*c.depends_on))?;
    let comps = components.clone();
    let diagram = d.clone();
    let realize = move |view: &OmegaView<'_>| {
        let mut bindings = Bindings::new();
        for (name, c) in &comps {
            bindings.insert(name.clone(), c.realize(view.omega)?);
        }
        Ok(diagram.solve(&bindings)?)
    };
    Ok(RandomDP { label: "composite".into(), space, depends_on: Arc::new(depends_on), realize: Arc::new(realize) })
}

/// Free choice after the outcome is observed: the pointwise union.
pub fn lifted_union_random(components: &[RandomDP]) -> Result<RandomDP, UncertaintyError> {
    let (first, rest) = components.split_first().ok_or_else(|| UncertaintyError::Invalid("no components".into()))?;
    if rest.iter().any(|c| *c.space != *first.space) {
        return Err(UncertaintyError::SpaceMismatch);
    }
    let depends_on: BTreeSet<usize> = components.iter().flat_map(|c| c.depends_on.iter().copied()).collect();
    let comps = components.to_vec();
    let realize = move |view: &OmegaView<'_>| {
        let mut acc = comps[0].realize(view.omega)?;
        for c in &comps[1..] {
            acc = dp::union(&acc, &c.realize(view.omega)?)?;
        }
        Ok(acc)
    };
    Ok(RandomDP {
        label: "union".into(),
        space: first.space.clone(),
        depends_on: Arc::new(depends_on),
        realize: Arc::new(realize),
    })
}

/// Sample count, master seed and worker count of a Monte Carlo run. Results
/// are identical for any worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub n: usize,
    pub seed: u64,
    pub workers: usize,
}

impl MonteCarlo {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// The outcome of sample `i`.
    pub fn omega(&self, space: &SampleSpace, i: usize) -> Result<OmegaPoint, UncertaintyError> {
        sample_omega(space, &self.nature(i))
    }

    /// The stream that generates outcome `i`.
    pub fn nature(&self, i: usize) -> Stream {
        Stream::new(self.seed, &[tag::OMEGA, i as u64])
    }

    /// `f(0..n)` in index order, fanned out over `workers` threads.
    pub fn map<T, E, F>(&self, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        par_map(self.n, self.workers, f)
    }
}

pub(crate) fn par_map<T, E, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    if workers <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}

/// Monte Carlo probability with the half-width of its 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p_hat: f64,
    pub radius95: f64,
    pub n: usize,
}

/// Probability that every `(f, r)` pair is feasible in the realization.
pub fn feasibility_probability(rdp: &RandomDP, pairs: &[(Point, Point)], mc: &MonteCarlo) -> Result<Estimate, UncertaintyError> {
    if mc.n == 0 {
        return Err(UncertaintyError::Invalid("n must be at least 1".into()));
    }
    let hits = mc.map(|i| {
        let dp = rdp.realize(&mc.omega(&rdp.space, i)?)?;
        for (f, r) in pairs {
            if !dp.feasible(f, r)? {
                return Ok::<_, UncertaintyError>(false);
            }
        }
        Ok(true)
    })?;
    let p_hat = hits.iter().filter(|&&h| h).count() as f64 / mc.n as f64;
    Ok(Estimate { p_hat, radius95: stats::binomial_radius95(p_hat, mc.n), n: mc.n })
}

/// Per-sample infimum of resource coordinate `coord` over resources that
/// satisfy every functionality in `fs`; +inf where infeasible.
pub fn min_resource_samples(rdp: &RandomDP, fs: &[Point], coord: usize, mc: &MonteCarlo) -> Result<Vec<f64>, UncertaintyError> {
    mc.map(|i| {
        let dp = rdp.realize(&mc.omega(&rdp.space, i)?)?;
        Ok(dp::min_resource(&dp, fs, coord)?)
    })
}
