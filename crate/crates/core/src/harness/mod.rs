//! Suites, configuration files, evaluation, sweeps, ablations and the
//! tables they emit.

mod eval;
mod report;
mod suite;
mod transcript;

use std::path::Path;

use thiserror::Error;

pub use eval::{
    ablate_replanning, ablation_table, compare_losses, errors_table, evaluate, loss_table, sweep, sweep_table,
    trial_table, LossComparison, SweepPoint, SWEEP_RATES,
};
pub use report::{fmt3, success_table, EvalReport, Table};
pub use transcript::{bathroom_transcript, SCRIPTED_PLAN};
pub use suite::{default_suite, gen_suite, SuiteEntry, SuiteKind, SuiteSpec, OOD_BASE, SEEN_BASE, STUCK_BASE};

use crate::planner::{HttpTransport, PlannerBackend, WireClient};
use crate::trainer::{BackendKind, TrainerConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("suite error: {0}")]
    Suite(String),
    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn load_config(path: &Path) -> Result<TrainerConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    let cfg: TrainerConfig = toml::from_str(&text)?;
    cfg.validate().map_err(HarnessError::Config)?;
    Ok(cfg)
}

/// Builds the planner backend named in the configuration.
pub fn make_backend(config: &TrainerConfig) -> Result<PlannerBackend, crate::Error> {
    Ok(match config.backend {
        BackendKind::Oracle => PlannerBackend::Oracle,
        BackendKind::Wire => {
            let transport = HttpTransport::from_env(std::time::Duration::from_secs(config.wire.timeout_secs))?;
            PlannerBackend::Wire(std::sync::Arc::new(WireClient::new(Box::new(transport), config.wire.clone())))
        }
    })
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}
