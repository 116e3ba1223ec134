//! Scenario configuration, the four topologies, and whole-run driving.

mod build;
mod config;
mod world;

use std::io::Write;

pub use build::{build_scenario, load_ladder, Simulation};
pub use config::{parse_config, ScenarioConfig, ScenarioKind, StaMobility, CONFIG_KEYS};
pub use world::{ClientApp, NodeState, Role, World};

use crate::metrics::{write_csv, MetricsError, Report};
use crate::stream::ProtoError;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("{key}: {reason}")]
    Key { key: String, reason: String },
    #[error("seed is required")]
    MissingSeed,
    #[error("unsupported scenario {0:?}")]
    Unsupported(String),
    #[error(transparent)]
    Proto(#[from] ProtoError),
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("writing summary: {0}")]
    Summary(#[from] std::io::Error),
}

/// Builds and runs `cfg`, writes the CSV files into `cfg.out_dir`, and
/// prints the per-flow summary to `summary`.
pub fn run_scenario(cfg: &ScenarioConfig, summary: &mut impl Write) -> Result<Report, RunError> {
    let mut sim = build_scenario(cfg)?;
    let events = sim.run();
    let report = sim.into_report();
    write_csv(&report, &cfg.out_dir)?;
    writeln!(
        summary,
        "scenario {} seed {} horizon {}s: {} events",
        cfg.scenario.as_str(),
        cfg.seed()?,
        cfg.horizon_s,
        events
    )?;
    summary.write_all(report.summary().as_bytes())?;
    Ok(report)
}
