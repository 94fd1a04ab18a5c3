//! Report artifacts: per-check records and the self-contained experiment
//! report written next to the data files.
//!
//! Reports carry no timestamps or host information, so a re-run from the
//! embedded config echo reproduces the report byte for byte in
//! single-threaded mode.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

/// One pass/fail check with the measured value and the frozen threshold.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    /// How `measured` relates to `threshold` for a pass: "<=", ">=" or "==".
    pub comparator: String,
}

impl CheckRecord {
    pub fn le(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: measured <= threshold,
            measured,
            threshold,
            comparator: "<=".to_string(),
        }
    }

    pub fn ge(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: measured >= threshold,
            measured,
            threshold,
            comparator: ">=".to_string(),
        }
    }

    /// Boolean check recorded as 1/0 against 1.
    pub fn flag(name: &str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            pass,
            measured: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            comparator: "==".to_string(),
        }
    }
}

/// Self-contained experiment report: the config echo plus its hash suffice
/// to reproduce every measured value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub convention: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    /// Experiment-specific measured quantities.
    pub summary: serde_json::Value,
    /// Files written alongside this report, relative to the output directory.
    pub manifest: Vec<String>,
}

impl ExperimentReport {
    pub fn new(
        cfg: &ExperimentConfig,
        checks: Vec<CheckRecord>,
        summary: serde_json::Value,
        manifest: Vec<String>,
    ) -> Self {
        Self {
            experiment: cfg.experiment.clone(),
            convention: translator_core::field::CONVENTION_VERSION.to_string(),
            config_hash: cfg.hash(),
            config: cfg.clone(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            summary,
            manifest,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
