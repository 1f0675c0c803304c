//! `relflow`: run particle, fluid, validation and quantum-density scenarios
//! from JSON configs.
//!
//! Exit codes: 0 all tolerances met, 1 a tolerance exceeded, 2 bad
//! configuration, 3 runtime or numerical failure.

mod config;
mod output;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use crate::config::{parse_config, Scenario};
use crate::output::{Staging, Summary};

const THREADS_VAR: &str = "RELFLOW_THREADS";
const DEFAULT_OUT: &str = "relflow-out";

#[derive(Debug, Parser)]
#[command(name = "relflow", version, about = "Relativistic charged-fluid scenarios from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write CSV artifacts plus summary.json.
    Run {
        config: PathBuf,
        /// Output directory (default: output.dir from the config, else relflow-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Set a config value before validation, e.g. grid.n=128.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Parse and validate a config, then print it with defaults filled in.
    Validate {
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the named initial-condition presets.
    Presets,
}

#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

fn load(path: &Path, overrides: &[String]) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Config)?;
    parse_config(&text, overrides)
        .with_context(|| format!("invalid config {}", path.display()))
        .map_err(Failure::Config)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(anyhow!("{THREADS_VAR} must be a positive integer (got {raw:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(anyhow!("thread pool: {e}")))
}

fn run(config: &Path, out: Option<PathBuf>, overrides: &[String]) -> Result<bool, Failure> {
    let scenario = load(config, overrides)?;
    configure_threads()?;
    let dir = out
        .or_else(|| scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut staging = Staging::new(&dir).map_err(Failure::Runtime)?;
    match run::run_scenario(&scenario, &mut staging) {
        Ok(mut summary) => {
            summary.artifacts = staging.names();
            staging.commit().map_err(Failure::Runtime)?;
            summary.write(&dir).map_err(Failure::Runtime)?;
            report(&summary, &dir);
            Ok(summary.pass)
        }
        Err(e) => {
            let dir = staging.dir().to_path_buf();
            drop(staging);
            let mut summary = Summary::new(scenario.kind);
            summary.pass = false;
            summary.partial = true;
            summary.error = Some(format!("{e:#}"));
            // Best effort: the original error is what gets reported.
            let _ = summary.write(&dir);
            Err(Failure::Runtime(e.context(format!("{} scenario failed", scenario.kind.name()))))
        }
    }
}

fn report(summary: &Summary, dir: &Path) {
    for (key, value) in &summary.norms {
        println!("{key:>20} = {value:.6e}");
    }
    for (key, value) in &summary.orders {
        println!("{:>20} = {value:.4}", format!("order {key}"));
    }
    for (key, t) in &summary.tolerances {
        let verdict = if t.pass { "PASS" } else { "FAIL" };
        let observed = t.observed.map_or("missing".to_string(), |v| format!("{v:.6e}"));
        println!("{verdict} {key}: {observed} ({} {:e})", t.bound, t.limit);
    }
    if let Some(e) = &summary.error {
        println!("FAIL {e}");
    }
    println!("summary: {}", dir.join("summary.json").display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, overrides } => run(&config, out, &overrides),
        Command::Validate { config, overrides } => load(&config, &overrides).and_then(|s| {
            let text = serde_json::to_string_pretty(&s).map_err(|e| Failure::Runtime(e.into()))?;
            println!("{text}");
            Ok(true)
        }),
        Command::Presets => {
            for (name, about) in relflow_core::presets::preset_catalog() {
                println!("{name:<20} {about}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let code = f.code();
            let (Failure::Config(e) | Failure::Runtime(e)) = f;
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
