//! Batch driver for the simulation core: scenario configs in, reports and
//! CSV tables out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use commands::Command;
pub use config::ScenarioConfig;
pub use error::LabError;
pub use report::{emit_table, RunReport};

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Files written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub report: PathBuf,
    pub tables: Vec<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Parse(format!("reading {}: {e}", path.display())))?;
    ScenarioConfig::parse(&text)
}

/// Runs `command` on `config` in memory.
pub fn execute(command: Command, config: ScenarioConfig) -> Result<RunReport, LabError> {
    let start = Instant::now();
    let results = command.execute(&config)?;
    let report = RunReport { command: command.name().into(), config, results, wall_clock: start.elapsed().as_secs_f64() };
    report.check_finite()?;
    Ok(report)
}

/// Loads, runs and writes the report plus any tables the config asks for.
pub fn run(command: Command, config_path: &Path, overrides: &Overrides) -> Result<(RunReport, Written), LabError> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(out) = &overrides.out {
        config.output.dir = out.display().to_string();
    }
    // tables are rendered before anything is written, so a bad selector leaves no partial output
    let report = execute(command, config)?;
    let dir = PathBuf::from(&report.config.output.dir);
    let tables = report
        .config
        .output
        .tables
        .iter()
        .map(|sel| emit_table(&report, sel).map(|t| (dir.join(format!("{sel}.csv")), t)))
        .collect::<Result<Vec<_>, _>>()?;
    let report_path = dir.join(&report.config.output.report);
    report::write_atomic(&report_path, &report.render())?;
    let mut written = Written { report: report_path, tables: Vec::new() };
    for (path, body) in tables {
        report::write_atomic(&path, &body)?;
        written.tables.push(path);
    }
    Ok((report, written))
}
