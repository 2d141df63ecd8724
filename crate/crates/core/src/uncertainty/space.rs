use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng::Stream;
use super::stats::{sigma_from_calibration, TruncatedNormal};
use super::UncertaintyError;
use crate::interval::Effect;

const MAX_REJECTIONS: usize = 1000;

/// Which factor of the product sample space a parameter belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Task,
    Battery,
    Actuator,
}

/// One scalar of the sample space: a Gaussian centred on `nominal`, with
/// `nominal·(1 ± fraction)` as its central `level` interval, truncated
/// below at `lower_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub unit: String,
    pub nominal: f64,
    pub fraction: f64,
    pub level: f64,
    pub lower_bound: f64,
    pub effect: Effect,
    pub block: Block,
    /// Rounded up to an integer after sampling.
    pub integer: bool,
    /// Whether confidence rectangles bound this parameter; others are held
    /// at their nominal value.
    pub bounded: bool,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, nominal: f64, effect: Effect, block: Block) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            nominal,
            fraction: 0.05,
            level: 0.90,
            lower_bound: 0.0,
            effect,
            block,
            integer: false,
            bounded: true,
        }
    }

    /// A parameter that never varies.
    pub fn fixed(mut self) -> Self {
        self.fraction = 0.0;
        self
    }

    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.fraction = fraction;
        self
    }

    pub fn integer(mut self) -> Self {
        self.integer = true;
        self
    }

    pub fn unbounded(mut self) -> Self {
        self.bounded = false;
        self
    }

    pub fn sigma(&self) -> Result<f64, UncertaintyError> {
        sigma_from_calibration(self.nominal, self.fraction, self.level)
    }

    pub fn marginal(&self) -> Result<TruncatedNormal, UncertaintyError> {
        Ok(TruncatedNormal { mean: self.nominal, sigma: self.sigma()?, lower: self.lower_bound })
    }

    pub fn is_random(&self) -> bool {
        self.fraction > 0.0
    }

    pub(crate) fn finish(&self, x: f64) -> f64 {
        if self.integer {
            x.ceil()
        } else {
            x
        }
    }
}

/// Ordered parameters of a product sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    params: Vec<ParamSpec>,
    sigmas: Vec<f64>,
    index: HashMap<String, usize>,
}

impl SampleSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Arc<Self>, UncertaintyError> {
        let mut index = HashMap::new();
        let mut sigmas = Vec::with_capacity(params.len());
        for (i, p) in params.iter().enumerate() {
            if index.insert(p.name.clone(), i).is_some() {
                return Err(UncertaintyError::DuplicateParam(p.name.clone()));
            }
            if !(p.nominal > 0.0) || !(p.level > 0.0 && p.level < 1.0) {
                return Err(UncertaintyError::Calibration { nominal: p.nominal, fraction: p.fraction, level: p.level });
            }
            sigmas.push(p.sigma()?);
        }
        Ok(Arc::new(Self { params, sigmas, index }))
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, UncertaintyError> {
        self.index.get(name).copied().ok_or_else(|| UncertaintyError::UnknownParam(name.to_string()))
    }

    pub fn indices(&self, names: &[&str]) -> Result<BTreeSet<usize>, UncertaintyError> {
        names.iter().map(|n| self.index_of(n)).collect()
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.sigmas[i]
    }

    pub fn block_indices(&self, block: Block) -> BTreeSet<usize> {
        self.params.iter().enumerate().filter(|(_, p)| p.block == block).map(|(i, _)| i).collect()
    }

    /// Every parameter at its nominal value.
    pub fn nominal(&self) -> OmegaPoint {
        OmegaPoint(self.params.iter().map(|p| p.finish(p.nominal)).collect())
    }

    /// Same space with every parameter's spread replaced.
    pub fn with_fraction(&self, fraction: f64) -> Result<Arc<Self>, UncertaintyError> {
        Self::new(self.params.iter().cloned().map(|p| {
            let f = if p.is_random() { fraction } else { 0.0 };
            p.with_fraction(f)
        }).collect())
    }

    /// Coordinate `i` of the outcome keyed by `stream`.
    pub fn sample_coord(&self, i: usize, stream: &Stream) -> Result<f64, UncertaintyError> {
        self.sample_param(i, &mut stream.substream(i as u64))
    }

    /// Draws one coordinate from its truncated marginal.
    pub fn sample_param(&self, i: usize, stream: &mut Stream) -> Result<f64, UncertaintyError> {
        let p = &self.params[i];
        let sigma = self.sigmas[i];
        if sigma == 0.0 {
            return Ok(p.finish(p.nominal));
        }
        let normal = Normal::new(p.nominal, sigma).expect("finite positive sigma");
        for _ in 0..MAX_REJECTIONS {
            let x = normal.sample(stream);
            if x >= p.lower_bound {
                return Ok(p.finish(x));
            }
        }
        Err(UncertaintyError::Truncation(p.name.clone()))
    }
}

/// One outcome: a value per parameter, in space order.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaPoint(pub(crate) Vec<f64>);

impl OmegaPoint {
    pub fn new(space: &SampleSpace, values: Vec<f64>) -> Result<Self, UncertaintyError> {
        if values.len() != space.len() {
            return Err(UncertaintyError::OmegaShape { expected: space.len(), got: values.len() });
        }
        for (p, &v) in space.params().iter().zip(&values) {
            if !(v >= p.lower_bound) {
                return Err(UncertaintyError::BelowBound { name: p.name.clone(), value: v });
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Copy with coordinate `i` replaced.
    pub fn with(&self, i: usize, v: f64) -> Self {
        let mut out = self.clone();
        out.0[i] = v;
        out
    }
}

/// Coordinate `i` is drawn from `stream.substream(i)`, so any block of the
/// outcome can be re-drawn on its own from the same stream.
pub fn sample_omega(space: &SampleSpace, stream: &Stream) -> Result<OmegaPoint, UncertaintyError> {
    (0..space.len()).map(|i| space.sample_coord(i, stream)).collect::<Result<Vec<_>, _>>().map(OmegaPoint)
}

/// Read access to the declared coordinates of an outcome.
pub struct OmegaView<'a> {
    pub(crate) space: &'a SampleSpace,
    pub(crate) omega: &'a OmegaPoint,
    pub(crate) allowed: &'a BTreeSet<usize>,
}

impl OmegaView<'_> {
    pub fn get(&self, name: &str) -> Result<f64, UncertaintyError> {
        let i = self.space.index_of(name)?;
        if !self.allowed.contains(&i) {
            return Err(UncertaintyError::UndeclaredDependency(name.to_string()));
        }
        Ok(self.omega.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncertainty::stats::{quantile_sorted, sorted};

    fn space(fraction: f64) -> Arc<SampleSpace> {
        SampleSpace::new(vec![
            ParamSpec::new("a", "W", 1.0, Effect::Harmful, Block::Actuator).with_fraction(fraction),
            ParamSpec::new("b", "Wh/kg", 100.0, Effect::Helpful, Block::Battery).with_fraction(fraction),
            ParamSpec::new("n", "", 1000.0, Effect::Harmful, Block::Task).with_fraction(fraction).integer(),
        ])
        .unwrap()
    }

    #[test]
    fn degenerate_sampler_returns_nominals() {
        let s = space(0.0);
        let w = sample_omega(&s, &Stream::new(1, &[])).unwrap();
        assert_eq!(w.values(), &[1.0, 100.0, 1000.0]);
    }

    #[test]
    fn deterministic_per_stream() {
        let s = space(0.05);
        let a = sample_omega(&s, &Stream::new(9, &[3])).unwrap();
        let b = sample_omega(&s, &Stream::new(9, &[3])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(2).fract(), 0.0);
    }

    #[test]
    fn mean_and_percentiles_follow_calibration() {
        let s = space(0.05);
        let mut st = Stream::new(2024, &[]);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample_param(1, &mut st).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 100.0).abs() / 100.0 < 0.002);
        let xs = sorted(&xs);
        assert!((quantile_sorted(&xs, 0.05) - 95.0).abs() / 95.0 < 0.005);
        assert!((quantile_sorted(&xs, 0.95) - 105.0).abs() / 105.0 < 0.005);
    }

    #[test]
    fn truncation_gives_up_eventually() {
        let mut p = ParamSpec::new("x", "", 1.0, Effect::Harmful, Block::Task).with_fraction(0.05);
        p.lower_bound = 10.0;
        let s = SampleSpace::new(vec![p]).unwrap();
        assert!(matches!(s.sample_param(0, &mut Stream::new(0, &[])), Err(UncertaintyError::Truncation(_))));
    }

    #[test]
    fn duplicate_names_rejected() {
        let p = ParamSpec::new("x", "", 1.0, Effect::Harmful, Block::Task);
        assert!(matches!(SampleSpace::new(vec![p.clone(), p]), Err(UncertaintyError::DuplicateParam(_))));
    }

    #[test]
    fn view_enforces_declared_dependencies() {
        let s = space(0.0);
        let w = s.nominal();
        let allowed = s.indices(&["a"]).unwrap();
        let v = OmegaView { space: &s, omega: &w, allowed: &allowed };
        assert_eq!(v.get("a").unwrap(), 1.0);
        assert!(matches!(v.get("b"), Err(UncertaintyError::UndeclaredDependency(_))));
        assert!(matches!(v.get("zz"), Err(UncertaintyError::UnknownParam(_))));
    }
}
