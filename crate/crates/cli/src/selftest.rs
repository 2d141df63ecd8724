//! Quick invariant checks against the configured model.

use std::sync::Arc;

use codesign::adaptive::{build_scenario, run_process, AdaptiveSettings, Level, PolicyTable};
use codesign::dp;
use codesign::poset::Point;
use codesign::uav::{experiment_deterministic, experiment_distributional, experiment_interval, UavModel};
use codesign::uncertainty::{compose_inner_bounds, MonteCarlo, ParamSpec, SampleSpace, Stream};

use crate::output::Table;
use crate::{numerical, CliError, RunConfig};

type Check = Result<(bool, String), CliError>;

fn envelope(config: &RunConfig, m: &UavModel) -> Check {
    let c = experiment_interval(m, &config.payloads, config.frac).map_err(numerical)?;
    let bad = (0..config.payloads.len()).find(|&j| {
        let (o, n, p) = (c.optimistic.rows[j].min_cost, c.nominal.rows[j].min_cost, c.pessimistic.rows[j].min_cost);
        !(o <= n && n <= p)
    });
    Ok((bad.is_none(), bad.map(|j| format!("payload {}", config.payloads[j])).unwrap_or_default()))
}

fn collapse(config: &RunConfig) -> Check {
    let flat = RunConfig { spread: 0.0, ..config.clone() }.model()?;
    let nominal = experiment_deterministic(&flat, &config.payloads).map_err(numerical)?;
    let d = experiment_distributional(&flat, &config.payloads, &MonteCarlo::new(10, config.seed), config.rho).map_err(numerical)?;
    let ok = nominal.rows.iter().zip(&d.samples).all(|(r, xs)| xs.iter().all(|&c| c == r.min_cost));
    Ok((ok, String::new()))
}

fn monotone(config: &RunConfig, m: &UavModel) -> Check {
    let mc = MonteCarlo::new(config.n.min(100), config.seed).with_workers(config.workers);
    let d = experiment_distributional(m, &config.payloads, &mc, config.rho).map_err(numerical)?;
    let bad = (0..mc.n).filter(|&i| (1..config.payloads.len()).any(|j| d.samples[j - 1][i] > d.samples[j][i])).count();
    Ok((bad == 0, format!("{bad} of {} samples decrease", mc.n)))
}

fn union_is_min(config: &RunConfig, m: &UavModel) -> Check {
    let system = m.system_random().map_err(numerical)?;
    let mc = MonteCarlo::new(20, config.seed);
    for i in 0..mc.n {
        let omega = mc.omega(m.space(), i).map_err(numerical)?;
        let dp = system.realize(&omega).map_err(numerical)?;
        let costs = m.combo_costs(&omega, &config.payloads).map_err(numerical)?;
        for (j, &p) in config.payloads.iter().enumerate() {
            let f = Point::new([p]).map_err(numerical)?;
            let got = dp::min_resource(&dp, &[f], 0).map_err(numerical)?;
            let want = costs[j].iter().copied().fold(f64::INFINITY, f64::min);
            if got != want {
                return Ok((false, format!("sample {i} payload {p}: {got} vs {want}")));
            }
        }
    }
    Ok((true, String::new()))
}

fn bound_level(config: &RunConfig, m: &UavModel) -> Check {
    let b = compose_inner_bounds(&m.component_inner_bounds(config.rho).map_err(numerical)?, m.system_diagram()).map_err(numerical)?;
    let k = m.space().params().iter().filter(|p| p.is_random() && p.bounded).count();
    let want = config.rho.powi(k as i32);
    Ok((b.k == k && (b.level - want).abs() <= 1e-12 * want.max(1e-300), format!("K = {}, level = {}", b.k, b.level)))
}

fn calibration(config: &RunConfig) -> Check {
    let spec = ParamSpec::new("x", "1", 1.0, codesign::interval::Effect::Harmful, codesign::uncertainty::Block::Task)
        .with_fraction(0.05);
    let space = SampleSpace::new(vec![ParamSpec { level: 0.9, ..spec }]).map_err(numerical)?;
    let n = 20_000;
    let mut xs = (0..n)
        .map(|i| space.sample_coord(0, &Stream::new(config.seed, &[i as u64])))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(numerical)?;
    xs.sort_by(f64::total_cmp);
    let (lo, hi) = (xs[n / 20], xs[n - n / 20]);
    let ok = (lo / 0.95 - 1.0).abs() < 0.005 && (hi / 1.05 - 1.0).abs() < 0.005;
    Ok((ok, format!("5% {lo:.5}, 95% {hi:.5}")))
}

fn workers(config: &RunConfig, m: &UavModel) -> Check {
    let run = |w| experiment_distributional(m, &config.payloads, &MonteCarlo::new(40, config.seed).with_workers(w), config.rho);
    let (a, b) = (run(1).map_err(numerical)?, run(4).map_err(numerical)?);
    Ok((a == b, String::new()))
}

fn residuals(config: &RunConfig, m: &UavModel) -> Check {
    let omega = m.nominal();
    let mut worst: f64 = 0.0;
    for k in 0..m.combos().len() {
        for &p in &config.payloads {
            let out = m.combo_fixpoint(&omega, k, p).map_err(numerical)?;
            if out.converged {
                worst = worst.max(out.residual);
            }
        }
    }
    Ok((worst <= m.params().trace_tol, format!("largest final step {worst:e}")))
}

fn fully_adaptive(config: &RunConfig, m: &Arc<UavModel>) -> Check {
    let settings = AdaptiveSettings { policy_n: 20, inner_n: 5 };
    let mc = MonteCarlo::new(20, config.seed);
    let table = PolicyTable::fit(m, &config.payloads, &settings, mc.seed, 1).map_err(numerical)?;
    let p = build_scenario(Level::FullyAdaptive, m, &table, &settings, mc.seed).map_err(numerical)?;
    let fully = run_process(&p, &config.payloads, &mc).map_err(numerical)?;
    let bench = experiment_distributional(m, &config.payloads, &mc, config.rho).map_err(numerical)?;
    Ok((fully == bench.samples, String::new()))
}

pub(crate) fn run(config: &RunConfig, model: &Arc<UavModel>) -> Result<Table, CliError> {
    let checks: Vec<(&str, Check)> = vec![
        ("envelope_order", envelope(config, model)),
        ("zero_spread_collapse", collapse(config)),
        ("payload_monotone", monotone(config, model)),
        ("union_is_min", union_is_min(config, model)),
        ("bound_level", bound_level(config, model)),
        ("calibration", calibration(config)),
        ("worker_independence", workers(config, model)),
        ("loop_residual", residuals(config, model)),
        ("fully_adaptive_is_free_choice", fully_adaptive(config, model)),
    ];
    let mut t = Table::new("codesign.selftest.v1", "selftest", &[("check", ""), ("passed", ""), ("detail", "")]);
    for (name, result) in checks {
        let (ok, detail) = result?;
        t.push(vec![name.into(), ok.to_string().into(), detail.into()]);
    }
    Ok(t)
}
