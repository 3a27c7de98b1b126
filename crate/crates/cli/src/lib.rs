//! Configuration-driven runs of the `bscount` experiments.
//!
//! A run reads one TOML document, executes a command and writes
//! `<name>.csv` plus `<name>.summary.json`.

pub mod commands;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use commands::{execute, RunError};
pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use report::{Check, Report, Table};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PARSE_ERROR: i32 = 2;
    pub const IO_ERROR: i32 = 3;
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{source}")]
    Parse { path: String, source: ConfigError },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Run(#[from] RunError),
    #[error("check failed: {name} ({detail})")]
    Check { name: String, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => exit::PARSE_ERROR,
            CliError::Io(_) => exit::IO_ERROR,
            CliError::Run(RunError::Input(_)) => exit::PARSE_ERROR,
            CliError::Run(_) | CliError::Check { .. } => exit::CHECK_FAILED,
        }
    }
}

/// Reads, runs and writes. Files are written whenever the pipeline produced
/// a report, including when a check fails.
pub fn run_file(config_path: &Path, overrides: &Overrides) -> Result<report::Written, CliError> {
    let src = std::fs::read_to_string(config_path)?;
    let mut cfg = parse_config(&src).map_err(|source| CliError::Parse {
        path: config_path.display().to_string(),
        source,
    })?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let out = overrides
        .out
        .clone()
        .or_else(|| cfg.output_path.as_ref().map(|p| base.join(p)))
        .unwrap_or_else(|| PathBuf::from("."));

    let start = Instant::now();
    let report = execute(&cfg, base)?;
    let seconds = start.elapsed().as_secs_f64();
    let echo = serde_json::to_value(&cfg).map_err(std::io::Error::other)?;
    let summary = report::summary_json(&echo, cfg.seed, &report, seconds);
    let written = report::write_outputs(&out, &cfg.output_name(), &report, &summary)?;
    for c in &report.checks {
        log::info!("{}: {} ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    if let Some(c) = report.first_failure() {
        return Err(CliError::Check {
            name: c.name.clone(),
            detail: c.detail.clone(),
        });
    }
    Ok(written)
}
