//! Library surface of the `translator` command-line harness.
//!
//! The harness layers configuration handling, named experiments and report
//! artifacts over `translator-core`. Everything is deterministic given a
//! config: reports carry a SHA-256 of the canonical config so any output
//! file can be traced to (and re-run from) the exact configuration that
//! produced it.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::Path;

pub use config::{validate_config, ConfigError, ExperimentConfig};
pub use report::{CheckRecord, ExperimentReport};

/// Process exit codes: the contract every subcommand follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// All checks passed.
    Pass = 0,
    /// At least one check failed.
    CheckFail = 1,
    /// Configuration error (syntax or validation).
    ConfigError = 2,
    /// Runtime or numerical error inside an operation.
    RuntimeError = 3,
}

/// Run an experiment and write its report and artifacts under `out_dir`.
pub fn run_to_dir(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentReport, translator_core::Error> {
    let (report, artifacts) = experiments::run(cfg)?;
    std::fs::create_dir_all(out_dir).map_err(translator_core::Error::Io)?;
    for (name, contents) in &artifacts {
        std::fs::write(out_dir.join(name), contents).map_err(translator_core::Error::Io)?;
    }
    std::fs::write(out_dir.join("report.json"), report.to_json_string())
        .map_err(translator_core::Error::Io)?;
    Ok(report)
}
