use rand::RngCore;
use rand_distr::{Distribution, Normal};

use super::*;

fn gaussian(mean: f64, sd: f64) -> Kernel<(), f64> {
    Kernel::new("gauss", move |_, s| Ok(Normal::new(mean, sd).unwrap().sample(s)))
}

fn affine(a: f64, b: f64) -> Kernel<f64, f64> {
    Kernel::deterministic("affine", move |x: &f64| Ok(a * x + b))
}

fn noisy() -> Kernel<f64, f64> {
    Kernel::new("noisy", |x: &f64, s| Ok(x + (s.next_u32() % 7) as f64))
}

#[test]
fn identity_composition_changes_nothing() {
    let k = noisy();
    for seed in 0..50 {
        let direct = k.sample(&1.0, &mut Stream::new(seed, &[])).unwrap();
        let left = Kernel::identity().then(&k).sample(&1.0, &mut Stream::new(seed, &[])).unwrap();
        let right = k.then(&Kernel::identity()).sample(&1.0, &mut Stream::new(seed, &[])).unwrap();
        assert_eq!((left, right), (direct, direct));
    }
}

#[test]
fn deterministic_kernels_compose_as_functions() {
    let k = kleisli_compose(&affine(2.0, 1.0), &affine(3.0, -1.0));
    assert_eq!(k.sample(&5.0, &mut Stream::new(0, &[])).unwrap(), 3.0 * 11.0 - 1.0);
}

#[test]
fn pushforward_of_gaussian_through_affine_map() {
    // closed form: 2·N(10, 3²) + 1 has mean 21 and sd 6
    let k = gaussian(10.0, 3.0).then(&affine(2.0, 1.0));
    let n = 20_000;
    let mut s = Stream::new(31, &[tag::KERNEL]);
    let xs: Vec<f64> = (0..n).map(|_| k.sample(&(), &mut s).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    assert!((mean - 21.0).abs() < 3.0 * 6.0 / (n as f64).sqrt(), "mean {mean}");
}

#[test]
fn kleisli_composition_is_associative_per_seed() {
    let (a, b, c) = (noisy(), noisy().then(&affine(0.5, 0.0)), noisy());
    for seed in 0..100 {
        let l = a.then(&b).then(&c).sample(&0.0, &mut Stream::new(seed, &[])).unwrap();
        let r = a.then(&b.then(&c)).sample(&0.0, &mut Stream::new(seed, &[])).unwrap();
        assert_eq!(l, r);
    }
}

#[test]
fn reparameterizing_with_a_constant_fixes_the_input() {
    let model = affine(4.0, 0.0);
    let spec = Kernel::deterministic("spec", |_: &()| Ok(2.5));
    assert_eq!(reparameterize(&model, &spec).sample(&(), &mut Stream::new(1, &[])).unwrap(), 10.0);
    let id = reparameterize(&model, &Kernel::identity());
    assert_eq!(id.sample(&1.0, &mut Stream::new(1, &[])).unwrap(), 4.0);
}

#[test]
fn stage_streams_are_independent_of_each_other() {
    let draw = || Kernel::new("draw", |_: &u64, s: &mut Stream| Ok(s.next_u64()));
    let p = StagedProcess::start().decide(draw()).decide(draw());
    let q = StagedProcess::start().decide(draw()).observe(draw());
    let world = Stream::new(5, &[tag::OMEGA, 0]);
    let x = p.run(&0, &world).unwrap();
    // the second decision stage has its own substream
    assert_eq!(x, world.substream(tag::STAGE).substream(1).next_u64());
    // an observation stage reads the world stream itself
    assert_eq!(q.run(&0, &world).unwrap(), world.clone().next_u64());
    assert_eq!(p.stages().len(), 2);
    assert_eq!(q.stages()[1].1, StageKind::Observe);
}

#[test]
fn map_choice_rules() {
    let dominant = vec![vec![1.0, 2.0, 3.0], vec![0.5, 0.6, 0.7], vec![2.0, 9.0, 2.5]];
    let e = map_choice(&dominant).unwrap();
    assert_eq!(e.choice, 0);
    assert_eq!(e.prob, vec![1.0, 0.0, 0.0]);
    // equal frequencies: lower mean wins
    let tie = vec![vec![1.0, 2.0], vec![5.0, 3.0]];
    assert_eq!(map_choice(&tie).unwrap().choice, 1);
    // all infeasible: nobody credited, catalog order decides
    let none = vec![vec![f64::INFINITY, f64::INFINITY]];
    let e = map_choice(&none).unwrap();
    assert_eq!((e.choice, e.prob.clone()), (0, vec![0.0, 0.0]));
    assert!(map_choice(&[]).is_err());
}

#[test]
fn estimated_policies() {
    let single = estimate_map_policy::<f64, _>(vec![4], |_, _, _| Ok(vec![1.0]), 10, 0).unwrap();
    assert_eq!(single.decide(&0.0, &mut Stream::new(0, &[])).unwrap(), 4);
    // candidate 7 is cheaper in every inner sample once the observation exceeds 1
    let p = estimate_map_policy(
        vec![3, 7],
        |obs: &f64, _, s| {
            let u = (s.next_u32() as f64) / u32::MAX as f64;
            Ok(vec![1.0 + u, 2.0 - obs + u])
        },
        50,
        9,
    )
    .unwrap();
    let mut s = Stream::new(0, &[]);
    assert_eq!(p.decide(&0.0, &mut s).unwrap(), 3);
    assert_eq!(p.decide(&1.5, &mut s).unwrap(), 7);
    assert_eq!(p.decide(&1.5, &mut s).unwrap(), 7);
}

#[test]
fn randomized_policy_follows_weights() {
    let p = Policy::randomized(|_: &()| Ok(vec![1.0, 3.0]));
    let mut s = Stream::new(12, &[]);
    let n = 8000;
    let ones = (0..n).filter(|_| p.decide(&(), &mut s).unwrap() == 1).count() as f64 / n as f64;
    assert!((ones - 0.75).abs() < 3.0 * (0.75f64 * 0.25 / n as f64).sqrt());
    assert!(Policy::randomized(|_: &()| Ok(vec![0.0, 0.0])).decide(&(), &mut s).is_err());
}

#[test]
fn paired_diff_compares_infeasibility_first() {
    let inf = f64::INFINITY;
    let (w, b) = (Level::NonAdaptive, Level::FullyAdaptive);
    let same = PairedDiff::of(0.0, (w, &[1.0, inf, 3.0]), (b, &[1.0, inf, 3.0]));
    assert_eq!((same.mean, same.infeasible_gap, same.finite_mean), (0.0, 0.0, 0.0));
    assert!(same.ordered() && !same.strict());
    // worse is infeasible far more often, though a little cheaper when feasible
    let worse: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { inf } else { 1.0 }).collect();
    let better: Vec<f64> = (0..200).map(|_| 1.5).collect();
    let d = PairedDiff::of(0.0, (w, &worse), (b, &better));
    assert_eq!(d.mean, inf);
    assert_eq!(d.finite_n, 100);
    assert!(d.ordered() && d.strict());
    let r = PairedDiff::of(0.0, (w, &better), (b, &worse));
    assert!(!r.ordered() && !r.strict());
    // no infeasibility: the usual paired test
    let x: Vec<f64> = (0..100).map(|i| 10.0 + (i % 5) as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| v - 0.5).collect();
    let d = PairedDiff::of(0.0, (w, &x), (b, &y));
    assert_eq!((d.infeasible_gap, d.infeasible_radius95), (0.0, 0.0));
    assert!(d.strict() && (d.finite_mean - 0.5).abs() < 1e-12);
    assert!(!PairedDiff::of(0.0, (w, &y), (b, &x)).ordered());
}
