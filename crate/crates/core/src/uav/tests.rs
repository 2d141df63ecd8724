use super::*;
use crate::poset::Point;
use crate::pt;

fn a1() -> ActuatorModel {
    Catalog::builtin().actuator("a1").unwrap().clone()
}

fn only(dp: &crate::dp::DesignProblem, f: Point) -> Vec<f64> {
    let r = dp.eval(&f).unwrap();
    assert_eq!(r.len(), 1);
    r.points()[0].coords().to_vec()
}

#[test]
fn builtin_catalog_matches_table() {
    let c = Catalog::builtin();
    assert_eq!(c.actuators.len(), 3);
    assert_eq!(c.batteries.len(), 8);
    let a3 = c.actuator("a3").unwrap();
    assert_eq!((a3.mass, a3.cost, a3.v_max, a3.p0, a3.p1), (150.0, 150.0, 3.0, 3.0, 1.5));
    let nih2 = c.battery("NiH2").unwrap();
    assert_eq!((nih2.energy_density, nih2.energy_per_cost, nih2.cycles), (45.0, 10.5, 20000.0));
    assert!(matches!(c.battery("NaIon"), Err(UavError::UnknownComponent(_))));
}

#[test]
fn catalog_rejects_bad_entries() {
    let bad = "[[actuator]]\nid='x'\nmass=-1.0\ncost=1.0\nv_max=1.0\np0=1.0\np1=1.0\n[[battery]]\nid='b'\nenergy_density=1.0\nenergy_per_cost=1.0\ncycles=1.0\n";
    assert!(matches!(Catalog::from_toml(bad), Err(UavError::Catalog(_))));
    let unknown = "[[actuator]]\nid='x'\nmass=1.0\ncost=1.0\nv_max=1.0\np0=1.0\np1=1.0\ncolor='red'\n";
    assert!(matches!(Catalog::from_toml(unknown), Err(UavError::Catalog(_))));
}

#[test]
fn actuator_examples() {
    let dp = actuator_dp(&a1());
    assert_eq!(only(&dp, pt![3.0, 10.0]), vec![201.0, 50.0, 50.0]);
    assert!(dp.eval(&pt![3.5, 0.0]).unwrap().is_empty());
    assert_eq!(only(&dp, pt![1.0, 0.0])[0], 1.0);
}

#[test]
fn battery_examples() {
    let nimh = Catalog::builtin().battery("NiMH").unwrap().clone();
    let dp = battery_dp(&nimh);
    let r = only(&dp, pt![100.0, 500.0]);
    assert!((r[0] - 1000.0).abs() < 1e-9);
    assert!((r[1] - 100.0 / 3.41).abs() < 1e-9);
    assert_eq!(only(&dp, pt![100.0, 0.0])[1], 0.0);
    assert!((only(&dp, pt![100.0, 501.0])[1] - 2.0 * 100.0 / 3.41).abs() < 1e-9);
}

#[test]
fn perception_and_task_examples() {
    let p = perception_dp(5.0, 2.0);
    assert_eq!(only(&p, pt![0.0]), vec![5.0]);
    assert_eq!(only(&p, pt![3.0]), vec![11.0]);
    let t = task_management_dp(3.0);
    let r = only(&t, pt![1000.0, 1000.0]);
    assert_eq!(r[0], 1000.0);
    assert!((r[1] - 333.333_333_333).abs() < 1e-6);
    assert_eq!(only(&t, pt![7.0, 0.0]), vec![7.0, 0.0, 3.0]);
}

#[test]
fn component_dps_are_monotone() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let c = Catalog::builtin();
    let dps = [
        actuator_dp(&c.actuators[1]),
        battery_dp(&c.batteries[3]),
        perception_dp(5.0, 2.0),
        task_management_dp(2.5),
        lift_dp(9.81),
        energy_dp(),
        totals_dp(10.0),
    ];
    for dp in &dps {
        for _ in 0..300 {
            let lo: Vec<f64> = (0..dp.fun().dim()).map(|_| rng.random_range(0.0..3.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|x| x + rng.random_range(0.0..1.0)).collect();
            let (rl, rh) = (dp.eval(&Point::new(lo).unwrap()).unwrap(), dp.eval(&Point::new(hi).unwrap()).unwrap());
            for q in rh.points() {
                assert!(rl.dominates(q).unwrap(), "{}", dp.label());
            }
        }
    }
}

#[test]
fn sample_space_has_thirty_bounded_scalars() {
    let m = UavModel::builtin();
    let bounded = m.space().params().iter().filter(|p| p.is_random() && p.bounded).count();
    assert_eq!(bounded, 30);
    assert_eq!(m.space().len(), 1 + 3 * 5 + 8 * 3);
    let k: usize = m.component_inner_bounds(0.9).unwrap().values().map(|b| b.k).sum();
    assert_eq!(k, 30);
}

#[test]
fn perturbation_moves_against_feasibility() {
    let m = UavModel::builtin();
    let (pess, opt) = m.perturbed(0.05).unwrap();
    let s = m.space();
    let i = s.index_of("a1.p1").unwrap();
    assert!((pess.get(i) - 2.1).abs() < 1e-12 && (opt.get(i) - 1.9).abs() < 1e-12);
    let i = s.index_of("LCO.energy_density").unwrap();
    assert!((pess.get(i) - 185.25).abs() < 1e-9 && (opt.get(i) - 204.75).abs() < 1e-9);
    let i = s.index_of("a2.v_max").unwrap();
    assert!((pess.get(i) - 2.85).abs() < 1e-12);
    let i = s.index_of("N").unwrap();
    assert_eq!((pess.get(i), opt.get(i)), (1000.0, 1000.0));
}

#[test]
fn interval_envelope_orders_and_degenerates() {
    let m = UavModel::builtin();
    let payloads = [0.0, 1500.0, 3000.0];
    let c = experiment_interval(&m, &payloads, 0.05).unwrap();
    for j in 0..payloads.len() {
        assert!(c.optimistic.rows[j].min_cost <= c.nominal.rows[j].min_cost);
        assert!(c.nominal.rows[j].min_cost <= c.pessimistic.rows[j].min_cost);
    }
    let z = experiment_interval(&m, &payloads, 0.0).unwrap();
    assert_eq!(z.optimistic, Curve { label: "optimistic".into(), ..z.nominal.clone() });
    assert_eq!(z.pessimistic.rows, z.nominal.rows);
}

#[test]
fn velocity_above_every_actuator_is_infeasible() {
    let params = UavParams { cruise_velocity: 3.5, ..UavParams::default() };
    let m = UavModel::new(Catalog::builtin(), params, TaskProfile::default()).unwrap();
    let c = experiment_deterministic(&m, &[0.0]).unwrap();
    assert_eq!(c.rows[0].min_cost, f64::INFINITY);
    assert_eq!(c.rows[0].choice, None);
}
