mod common;

use codesign::adaptive::observe_component;
use codesign::uav::{Catalog, TaskProfile, UavModel, UavParams};
use codesign::uncertainty::{inner_bound_rect, MonteCarlo, RandomDP};

#[test]
fn five_percent_at_ninety_percent() {
    for (nominal, seed) in [(1.0, 1), (195.0, 2), (0.05, 3)] {
        let (lo, hi) = common::calibration_percentiles(nominal, 100_000, seed);
        assert!((lo / (0.95 * nominal) - 1.0).abs() < 0.005, "{nominal}: {lo}");
        assert!((hi / (1.05 * nominal) - 1.0).abs() < 0.005, "{nominal}: {hi}");
    }
}

#[test]
fn observing_fixed_components_returns_the_table() {
    let params = UavParams { spread: 0.0, ..UavParams::default() };
    let m = UavModel::new(Catalog::builtin(), params, TaskProfile::default()).unwrap();
    let mc = MonteCarlo::new(3, 4);
    let a1 = observe_component(&m, "a1").unwrap();
    let nimh = observe_component(&m, "NiMH").unwrap();
    for i in 0..mc.n {
        assert_eq!(a1.sample(&(), &mut mc.nature(i)).unwrap(), vec![50.0, 50.0, 3.0, 1.0, 2.0]);
        assert_eq!(nimh.sample(&(), &mut mc.nature(i)).unwrap(), vec![100.0, 3.41, 500.0]);
    }
    assert!(observe_component(&m, "a9").is_err());
}

#[test]
fn observed_parameters_follow_their_marginals() {
    let m = UavModel::builtin();
    let a1 = observe_component(&m, "a1").unwrap();
    let mc = MonteCarlo::new(10_000, 5);
    let draws: Vec<Vec<f64>> = (0..mc.n).map(|i| a1.sample(&(), &mut mc.nature(i)).unwrap()).collect();
    let mean_p0 = draws.iter().map(|d| d[3]).sum::<f64>() / mc.n as f64;
    assert!((mean_p0 - 1.0).abs() < 0.002, "{mean_p0}");
    // deterministic coordinates pass through
    assert!(draws.iter().all(|d| d[0] == 50.0 && d[1] == 50.0 && d[2] == 3.0));
}

#[test]
fn observation_agrees_with_the_outcome_it_belongs_to() {
    let m = UavModel::builtin();
    let obs = observe_component(&m, "LCO").unwrap();
    let mc = MonteCarlo::new(50, 6);
    let s = m.space();
    let idx: Vec<usize> = ["LCO.energy_density", "LCO.energy_per_cost", "LCO.cycles"].iter().map(|n| s.index_of(n).unwrap()).collect();
    for i in 0..mc.n {
        let omega = mc.omega(s, i).unwrap();
        let want: Vec<f64> = idx.iter().map(|&k| omega.get(k)).collect();
        assert_eq!(obs.sample(&(), &mut mc.nature(i)).unwrap(), want);
    }
}

#[test]
fn component_bounds_have_one_factor_per_random_scalar() {
    let m = UavModel::builtin();
    let comps = m.components();
    let a1: &RandomDP = &comps["a1"];
    let b = inner_bound_rect(a1, 0.9).unwrap();
    assert_eq!(b.k, 2);
    assert!((b.level - 0.81).abs() < 1e-15);
    let task = inner_bound_rect(&comps["task"], 0.9).unwrap();
    assert_eq!((task.k, task.level), (0, 1.0));
}
