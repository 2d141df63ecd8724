//! Runs the UAV experiments from a configuration and writes result tables.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

use codesign::adaptive::experiment_adaptive;
use codesign::uav::{experiment_deterministic, experiment_distributional, experiment_interval, Curve, UavModel};
use codesign::uncertainty::MonteCarlo;

pub mod config;
pub mod output;
mod selftest;
mod svg;

pub use config::{load_config, Experiment, Format, RunConfig};
pub use output::{Cell, Stamp, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

pub const VERSION: &str = match option_env!("CODESIGN_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

/// Result tables of a run, plus whether every self-test check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub passed: bool,
}

fn tradeoff(model: &UavModel, curves: &[&Curve]) -> Table {
    let mut t = Table::new(
        "codesign.tradeoff.v1",
        "tradeoff",
        &[("curve", ""), ("payload", "g"), ("min_cost", "$"), ("actuator", ""), ("battery", "")],
    );
    for c in curves {
        for r in &c.rows {
            let (a, b) = r.choice.map(|k| model.combo_ids(k)).unwrap_or(("none", "none"));
            t.push(vec![c.label.as_str().into(), r.payload.into(), r.min_cost.into(), a.into(), b.into()]);
        }
    }
    t
}

/// Computes the tables of the configured experiment without touching disk.
pub fn compute(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let model = Arc::new(config.model()?);
    let payloads = &config.payloads;
    let mc = MonteCarlo::new(config.n, config.seed).with_workers(config.workers);
    let tables = match config.experiment {
        Experiment::Deterministic => {
            let c = experiment_deterministic(&model, payloads).map_err(numerical)?;
            vec![tradeoff(&model, &[&c])]
        }
        Experiment::Interval => {
            let c = experiment_interval(&model, payloads, config.frac).map_err(numerical)?;
            vec![tradeoff(&model, &[&c.optimistic, &c.nominal, &c.pessimistic])]
        }
        Experiment::Distributional => {
            let d = experiment_distributional(&model, payloads, &mc, config.rho).map_err(numerical)?;
            let mut violin = Table::new("codesign.violin.v1", "violin", &[("payload", "g"), ("sample_idx", ""), ("cost", "$")]);
            for (j, &p) in payloads.iter().enumerate() {
                for (i, &c) in d.samples[j].iter().enumerate() {
                    violin.push(vec![p.into(), i.into(), c.into()]);
                }
            }
            let mut bounds = Table::new(
                "codesign.bounds.v1",
                "bounds",
                &[("payload", "g"), ("lower_cost", "$"), ("upper_cost", "$"), ("level", "1"), ("out_of_bound_frac", "1")],
            );
            for b in &d.bounds {
                bounds.push(vec![b.payload.into(), b.lower_cost.into(), b.upper_cost.into(), b.level.into(), b.out_of_bound_frac.into()]);
            }
            let mut choices =
                Table::new("codesign.choices.v1", "choices", &[("payload", "g"), ("actuator", ""), ("battery", ""), ("optimality_prob", "1")]);
            for (j, &p) in payloads.iter().enumerate() {
                for (k, &prob) in d.choice_probs[j].iter().enumerate() {
                    let (a, b) = model.combo_ids(k);
                    choices.push(vec![p.into(), a.into(), b.into(), prob.into()]);
                }
                choices.push(vec![p.into(), "none".into(), "none".into(), d.infeasible[j].into()]);
            }
            vec![violin, bounds, choices]
        }
        Experiment::Adaptive => {
            let r = experiment_adaptive(&model, payloads, &mc, &config.adaptive_settings()).map_err(numerical)?;
            let mut samples =
                Table::new("codesign.adaptive.v1", "adaptive", &[("level", ""), ("payload", "g"), ("sample_idx", ""), ("cost", "$")]);
            for (level, per_payload) in &r.samples {
                for (j, xs) in per_payload.iter().enumerate() {
                    for (i, &c) in xs.iter().enumerate() {
                        samples.push(vec![level.name().into(), payloads[j].into(), i.into(), c.into()]);
                    }
                }
            }
            let mut summary = Table::new(
                "codesign.adaptive_summary.v1",
                "adaptive_summary",
                &[
                    ("level", ""),
                    ("payload", "g"),
                    ("mean", "$"),
                    ("se", "$"),
                    ("q05", "$"),
                    ("q50", "$"),
                    ("q95", "$"),
                    ("infeasible_frac", "1"),
                ],
            );
            for s in &r.summaries {
                summary.push(vec![
                    s.level.name().into(),
                    s.payload.into(),
                    s.mean.into(),
                    s.se.into(),
                    s.q05.into(),
                    s.q50.into(),
                    s.q95.into(),
                    s.infeasible_frac.into(),
                ]);
            }
            let mut diffs = Table::new(
                "codesign.adaptive_diffs.v1",
                "adaptive_diffs",
                &[
                    ("payload", "g"),
                    ("worse", ""),
                    ("better", ""),
                    ("mean_diff", "$"),
                    ("infeasible_gap", "1"),
                    ("infeasible_radius95", "1"),
                    ("finite_mean_diff", "$"),
                    ("finite_radius95", "$"),
                    ("ordered", ""),
                    ("strict", ""),
                ],
            );
            for d in &r.diffs {
                diffs.push(vec![
                    d.payload.into(),
                    d.worse.name().into(),
                    d.better.name().into(),
                    d.mean.into(),
                    d.infeasible_gap.into(),
                    d.infeasible_radius95.into(),
                    d.finite_mean.into(),
                    d.finite_radius95.into(),
                    d.ordered().to_string().into(),
                    d.strict().to_string().into(),
                ]);
            }
            vec![samples, summary, diffs]
        }
        Experiment::Selftest => {
            let t = selftest::run(config, &model)?;
            let passed = t.rows.iter().all(|r| r[1] == Cell::from("true"));
            return Ok(Outcome { tables: vec![t], passed });
        }
    };
    Ok(Outcome { tables, passed: true })
}

fn render_svg(t: &Table) -> Option<String> {
    match t.file {
        "tradeoff" => svg::chart(t, "payload", "min_cost", Some("curve"), true),
        "violin" => svg::chart(t, "payload", "cost", None, false),
        "bounds" => svg::chart(t, "payload", "upper_cost", None, true),
        "choices" => svg::chart(t, "payload", "optimality_prob", Some("battery"), true),
        "adaptive_summary" => svg::chart(t, "payload", "mean", Some("level"), true),
        _ => None,
    }
}

/// What a run wrote.
#[derive(Debug, Clone)]
pub struct Report {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub passed: bool,
}

/// Computes the experiment and writes its tables and `manifest.json`.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let stamp = Stamp { seed: config.seed, config_hash: config.hash()? };
    let outcome = compute(config)?;
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let write = |files: &mut Vec<PathBuf>, name: String, bytes: &[u8]| -> Result<(), CliError> {
        let path = dir.join(name);
        std::fs::write(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    for t in &outcome.tables {
        for f in &config.formats {
            match f {
                Format::Csv => write(&mut files, format!("{}.csv", t.file), &t.to_csv(&stamp)?)?,
                Format::Json => write(&mut files, format!("{}.json", t.file), &t.to_json(&stamp)?)?,
                Format::Svg => {
                    if let Some(s) = render_svg(t) {
                        write(&mut files, format!("{}.svg", t.file), s.as_bytes())?
                    }
                }
            }
        }
    }
    let manifest = json!({
        "version": VERSION,
        "experiment": config.experiment,
        "seed": config.seed,
        "config_hash": stamp.config_hash,
        "config": config,
        "workers": config.workers,
        "schemas": outcome.tables.iter().map(|t| t.schema).collect::<Vec<_>>(),
        "files": files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "passed": outcome.passed,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    write(&mut files, "manifest.json".into(), &bytes)?;
    Ok(Report { dir, files, passed: outcome.passed })
}
