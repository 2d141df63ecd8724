use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use codesign_cli::{load_config, run, CliError, Experiment, Format, RunConfig};

/// Runs the UAV co-design experiments and writes result tables.
#[derive(Debug, Parser)]
#[command(name = "codesign", version = codesign_cli::VERSION)]
struct Args {
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// Flat TOML file; see docs/config.md.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Output directory [default: $CODESIGN_OUT, else ./out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated output formats.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    #[arg(long)]
    workers: Option<usize>,
}

fn configure(args: Args) -> Result<RunConfig, CliError> {
    let mut c = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(e) = args.experiment {
        c.experiment = e;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(n) = args.n {
        c.n = n;
    }
    if let Some(o) = args.out {
        c.out = Some(o);
    }
    if let Some(f) = args.format {
        c.formats = f;
    }
    if let Some(w) = args.workers {
        c.workers = w;
    }
    c.validate()?;
    Ok(c)
}

fn fail(e: &CliError) -> ExitCode {
    let msg = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{msg}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match configure(args) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match run(&config) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                fail(&CliError::Numerical("self-test failed; see selftest.csv".into()))
            }
        }
        Err(e) => fail(&e),
    }
}
