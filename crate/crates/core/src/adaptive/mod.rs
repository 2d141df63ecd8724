//! Markov kernels as seeded samplers, staged decision processes, and
//! maximum-a-posteriori decision policies estimated by Monte Carlo.
//!
//! A kernel's randomness comes only from the [`Stream`] it is handed. In a
//! [`StagedProcess`] each decision stage `s` gets the substream
//! `[tag::STAGE, s]` of the sample's stream, while observation stages get
//! the sample's stream itself: the stream that also generates the outcome,
//! so an observation reveals part of the same world every other query sees.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use thiserror::Error;

use crate::dp::DpError;
use crate::uav::UavError;
use crate::uncertainty::{tag, Stream, UncertaintyError};

mod scenario;

pub use scenario::{
    build_scenario, experiment_adaptive, observe_component, run_process, Adaptive, AdaptiveSettings, Level, LevelSummary,
    PairedDiff, PolicyTable, Step,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdaptiveError {
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error(transparent)]
    Uav(#[from] UavError),
    #[error("unknown choice `{0}`")]
    UnknownChoice(String),
    #[error("{0}")]
    Invalid(String),
}

type SampleFn<I, O> = dyn Fn(&I, &mut Stream) -> Result<O, AdaptiveError> + Send + Sync;

/// A stochastic map `I ⇒ O`, given as a sampler.
pub struct Kernel<I, O> {
    label: Arc<str>,
    sample: Arc<SampleFn<I, O>>,
}

impl<I, O> Clone for Kernel<I, O> {
    fn clone(&self) -> Self {
        Self { label: self.label.clone(), sample: self.sample.clone() }
    }
}

impl<I, O> std::fmt::Debug for Kernel<I, O> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kernel({})", self.label)
    }
}

impl<I: 'static, O: 'static> Kernel<I, O> {
    pub fn new<F>(label: impl Into<Arc<str>>, sample: F) -> Self
    where
        F: Fn(&I, &mut Stream) -> Result<O, AdaptiveError> + Send + Sync + 'static,
    {
        Self { label: label.into(), sample: Arc::new(sample) }
    }

    /// The degenerate kernel of a function; ignores the stream.
    pub fn deterministic<F>(label: impl Into<Arc<str>>, f: F) -> Self
    where
        F: Fn(&I) -> Result<O, AdaptiveError> + Send + Sync + 'static,
    {
        Self::new(label, move |x, _| f(x))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sample(&self, x: &I, stream: &mut Stream) -> Result<O, AdaptiveError> {
        (self.sample)(x, stream)
    }

    /// Kleisli composition: `next` continues on the same stream.
    pub fn then<P: 'static>(&self, next: &Kernel<O, P>) -> Kernel<I, P> {
        let (a, b) = (self.clone(), next.clone());
        Kernel::new(format!("{} ; {}", self.label, next.label), move |x, s| {
            let y = a.sample(x, s)?;
            b.sample(&y, s)
        })
    }
}

impl<I: Clone + 'static> Kernel<I, I> {
    pub fn identity() -> Self {
        Self::deterministic("id", |x: &I| Ok(x.clone()))
    }
}

pub fn kleisli_compose<I: 'static, O: 'static, P: 'static>(a: &Kernel<I, O>, b: &Kernel<O, P>) -> Kernel<I, P> {
    a.then(b)
}

/// Pre-composes a design model with a kernel producing its inputs, so the
/// model's parameters may depend on earlier outcomes.
pub fn reparameterize<X: 'static, Y: 'static, D: 'static>(model: &Kernel<X, D>, f: &Kernel<Y, X>) -> Kernel<Y, D> {
    f.then(model)
}

/// Where a stage draws its randomness from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    /// A decision, with its own substream.
    Decide,
    /// A reading of the world, from the sample's stream.
    Observe,
}

/// A type-checked chain of stages.
#[derive(Debug, Clone)]
pub struct StagedProcess<I, O> {
    stages: Vec<(String, StageKind)>,
    run: Kernel<I, O>,
}

impl<I: Clone + 'static> StagedProcess<I, I> {
    pub fn start() -> Self {
        Self { stages: Vec::new(), run: Kernel::identity() }
    }
}

impl<I: 'static, O: 'static> StagedProcess<I, O> {
    pub fn then<P: 'static>(self, kind: StageKind, stage: Kernel<O, P>) -> StagedProcess<I, P> {
        let index = self.stages.len() as u64;
        let mut stages = self.stages;
        stages.push((stage.label().to_string(), kind));
        let prev = self.run;
        let run = Kernel::new(format!("{} ; {}", prev.label(), stage.label()), move |x, s| {
            let y = prev.sample(x, s)?;
            match kind {
                StageKind::Observe => stage.sample(&y, &mut s.clone()),
                StageKind::Decide => stage.sample(&y, &mut s.substream(tag::STAGE).substream(index)),
            }
        });
        StagedProcess { stages, run }
    }

    pub fn decide<P: 'static>(self, stage: Kernel<O, P>) -> StagedProcess<I, P> {
        self.then(StageKind::Decide, stage)
    }

    pub fn observe<P: 'static>(self, stage: Kernel<O, P>) -> StagedProcess<I, P> {
        self.then(StageKind::Observe, stage)
    }

    pub fn stages(&self) -> &[(String, StageKind)] {
        &self.stages
    }

    /// Runs every stage for one sample whose world is generated by `stream`.
    pub fn run(&self, x: &I, stream: &Stream) -> Result<O, AdaptiveError> {
        self.run.sample(x, &mut stream.clone())
    }
}

type DecideFn<O> = dyn Fn(&O) -> Result<usize, AdaptiveError> + Send + Sync;
type WeightsFn<O> = dyn Fn(&O) -> Result<Vec<f64>, AdaptiveError> + Send + Sync;

/// A decision rule from observations to one of finitely many choices.
#[derive(Clone)]
pub enum Policy<O> {
    Deterministic(Arc<DecideFn<O>>),
    /// Choice weights, normalized when sampled.
    Randomized(Arc<WeightsFn<O>>),
}

impl<O: 'static> Policy<O> {
    pub fn deterministic<F>(f: F) -> Self
    where
        F: Fn(&O) -> Result<usize, AdaptiveError> + Send + Sync + 'static,
    {
        Policy::Deterministic(Arc::new(f))
    }

    pub fn constant(choice: usize) -> Self {
        Self::deterministic(move |_| Ok(choice))
    }

    pub fn randomized<F>(f: F) -> Self
    where
        F: Fn(&O) -> Result<Vec<f64>, AdaptiveError> + Send + Sync + 'static,
    {
        Policy::Randomized(Arc::new(f))
    }

    pub fn decide(&self, obs: &O, stream: &mut Stream) -> Result<usize, AdaptiveError> {
        match self {
            Policy::Deterministic(f) => f(obs),
            Policy::Randomized(f) => {
                let w = f(obs)?;
                let d = WeightedIndex::new(&w).map_err(|e| AdaptiveError::Invalid(format!("policy weights {w:?}: {e}")))?;
                Ok(d.sample(stream))
            }
        }
    }

    pub fn into_kernel(self, label: impl Into<Arc<str>>) -> Kernel<O, usize> {
        Kernel::new(label, move |o, s| self.decide(o, s))
    }
}

impl<O> std::fmt::Debug for Policy<O> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Policy::Deterministic(_) => write!(f, "Policy::Deterministic"),
            Policy::Randomized(_) => write!(f, "Policy::Randomized"),
        }
    }
}

/// Monte Carlo evidence for a choice among candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate {
    /// Position in the candidate list.
    pub choice: usize,
    /// Frequency of being strictly first-cheapest, per candidate.
    pub prob: Vec<f64>,
    pub mean_cost: Vec<f64>,
}

/// The candidate most often cheapest over `costs[sample][candidate]`. A
/// sample credits its first minimal candidate, or nobody when every cost is
/// infinite. Ties go to the lower mean cost, then to the earlier candidate.
pub fn map_choice(costs: &[Vec<f64>]) -> Result<MapEstimate, AdaptiveError> {
    let m = costs.first().map(Vec::len).unwrap_or(0);
    if costs.is_empty() || m == 0 || costs.iter().any(|c| c.len() != m) {
        return Err(AdaptiveError::Invalid("map_choice needs a non-empty rectangular cost table".into()));
    }
    let n = costs.len() as f64;
    let mut wins = vec![0usize; m];
    let mut sums = vec![0.0; m];
    for row in costs {
        let (best, arg) = row.iter().enumerate().fold((f64::INFINITY, None), |(b, a), (k, &c)| if c < b { (c, Some(k)) } else { (b, a) });
        if best.is_finite() {
            wins[arg.expect("finite minimum has an index")] += 1;
        }
        for (s, c) in sums.iter_mut().zip(row) {
            *s += c;
        }
    }
    let mean_cost: Vec<f64> = sums.iter().map(|s| s / n).collect();
    let choice = (0..m)
        .min_by(|&a, &b| wins[b].cmp(&wins[a]).then(mean_cost[a].total_cmp(&mean_cost[b])).then(a.cmp(&b)))
        .expect("m > 0");
    Ok(MapEstimate { choice, prob: wins.iter().map(|&w| w as f64 / n).collect(), mean_cost })
}

/// The inner-sample stream `j` of policy estimation under `seed`.
pub fn inner_stream(seed: u64, j: usize) -> Stream {
    Stream::new(seed, &[tag::POLICY, 1, j as u64])
}

/// Deterministic MAP policy: for an observation, draws `inner_n` samples of
/// the remaining uncertainty with `costs(obs, j, stream)` (costs of every
/// candidate under inner sample `j`) and picks the candidate most likely to
/// be cheapest.
pub fn estimate_map_policy<O, F>(candidates: Vec<usize>, costs: F, inner_n: usize, seed: u64) -> Result<Policy<O>, AdaptiveError>
where
    O: 'static,
    F: Fn(&O, usize, &mut Stream) -> Result<Vec<f64>, AdaptiveError> + Send + Sync + 'static,
{
    if inner_n == 0 || candidates.is_empty() {
        return Err(AdaptiveError::Invalid("estimate_map_policy needs candidates and inner_n >= 1".into()));
    }
    if candidates.len() == 1 {
        return Ok(Policy::constant(candidates[0]));
    }
    Ok(Policy::deterministic(move |obs| {
        let table = (0..inner_n).map(|j| costs(obs, j, &mut inner_stream(seed, j))).collect::<Result<Vec<_>, _>>()?;
        Ok(candidates[map_choice(&table)?.choice])
    }))
}

#[cfg(test)]
mod tests;
