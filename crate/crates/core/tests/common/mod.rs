#![allow(dead_code)]

pub mod algebra;
pub mod oracle;

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// A runner with a fixed seed and no failure files, for `cases` cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

use codesign::interval::Effect;
use codesign::uncertainty::{Block, ParamSpec, SampleSpace, Stream};

/// Nearest-rank 5th and 95th percentiles of `n` draws of a parameter with
/// the default ±5% at 90% calibration.
pub fn calibration_percentiles(nominal: f64, n: usize, seed: u64) -> (f64, f64) {
    let space = SampleSpace::new(vec![ParamSpec::new("x", "1", nominal, Effect::Harmful, Block::Task)]).unwrap();
    let mut xs: Vec<f64> = (0..n).map(|i| space.sample_coord(0, &Stream::new(seed, &[i as u64])).unwrap()).collect();
    xs.sort_by(f64::total_cmp);
    let rank = |q: f64| xs[((q * n as f64).ceil() as usize).clamp(1, n) - 1];
    (rank(0.05), rank(0.95))
}
