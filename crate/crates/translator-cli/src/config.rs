//! Configuration parsing, validation and provenance hashing.
//!
//! Configs are JSON. Validation reports *all* violations, not just the
//! first, and suggests the nearest known key for typos. Every report embeds
//! the SHA-256 of the canonicalized config so outputs are traceable to the
//! exact configuration that produced them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Named experiments bundling the verification chain.
pub const EXPERIMENTS: &[&str] = &[
    "growth-lemma",
    "perturbation-robustness",
    "comparison-bounds",
    "residual-convergence",
    "bowl-end",
    "axis-machinery",
    "decay-schedule",
    "entropy-gap",
    "catenoid-multiplicity",
];

/// Operation subcommands that accept the same config schema.
pub const OPS: &[&str] = &[
    "bowl-profile",
    "ode-asymptotics",
    "residual",
    "fourier-split",
    "decay-fit",
    "axis-fit",
    "symmetry-check",
    "cylindricality-check",
    "rescale",
    "density",
    "entropy",
    "decay-schedule",
];

const TOP_KEYS: &[&str] = &[
    "experiment",
    "out_dir",
    "format",
    "threads",
    "seed",
    "surface",
    "params",
];

/// Allowed `params` keys with defaults for a context (experiment or
/// subcommand name).
pub fn param_spec(context: &str) -> Option<&'static [(&'static str, f64)]> {
    Some(match context {
        "growth-lemma" | "ode-asymptotics" => &[
            ("s0", 10.0),
            ("phi0", 9.9),
            ("s_end", 200.0),
            ("tol", 1e-12),
            ("gamma_amp", 0.0),
            ("gamma_exp", 9.0),
            ("delta_amp", 0.0),
            ("delta_exp", 9.0),
            ("osc_freq", 0.0),
            ("lambda_tol", 1e-2),
            ("mu_tol", 0.2),
            ("remainder_exp_max", -2.7),
        ],
        "perturbation-robustness" => &[
            ("s0", 10.0),
            ("phi0", 9.9),
            ("s_end", 200.0),
            ("tol", 1e-12),
            ("amp_high", 1.0),
            ("exp_high", 9.0),
            ("amp_low", 0.1),
            ("exp_low", 3.0),
            ("osc_freq", 0.0),
            ("lambda_tol", 1e-2),
            ("mu_tol", 0.2),
            ("remainder_exp_max", -2.7),
        ],
        "comparison-bounds" => &[
            ("s0", 10.0),
            ("s_end", 200.0),
            ("tol", 1e-10),
            ("launches", 100.0),
            ("margin", 0.1),
            ("spread", 0.5),
        ],
        "residual-convergence" | "residual" => &[
            ("z_lo", 20.0),
            ("z_hi", 60.0),
            ("n_z", 81.0),
            ("n_theta", 8.0),
            ("tol", 1e-12),
            ("order_min", 1.9),
            ("rho_in", 0.5),
            ("rho_out", 2.5),
            ("n_s", 201.0),
            ("vert_tol_factor", 5.0),
            ("max_residual", 1e-3),
        ],
        "bowl-end" => &[
            ("s_min", 20.0),
            ("s_max", 100.0),
            ("tol", 1e-11),
            ("remainder_max", 1.0),
        ],
        "axis-machinery" | "axis-fit" => &[
            ("radius", std::f64::consts::SQRT_2),
            ("x0", 0.1),
            ("y0", 0.0),
            ("n_theta", 16384.0),
            ("recover_tol", 1e-6),
            ("decay_c", 3.0),
            ("decay_p", 7.0),
            ("fit_rel_tol", 0.02),
            ("drift_factor", 2.0),
        ],
        "decay-schedule" => &[
            ("L", 1.0),
            ("eps1", 0.01),
            ("Lambda", 10.0),
            ("q", 400.0),
            ("j_max", 20.0),
            ("q_sweep_max", 400.0),
        ],
        "entropy-gap" | "density" | "entropy" => &[
            ("rho", 1.0),
            ("sphere_radius", 2.0),
            ("cyl_radius", std::f64::consts::SQRT_2),
            ("tol_plane", 1e-6),
            ("tol_curved", 1e-3),
            ("scale_min", 0.5),
            ("scale_max", 2.0),
            ("n_scales", 7.0),
        ],
        "catenoid-multiplicity" => &[
            ("neck_r", 2.0),
            ("length", 400.0),
            ("bowl_length", 4000.0),
            ("tol", 1e-10),
        ],
        "bowl-profile" => &[
            ("s0", 5.0),
            ("phi0", 4.8),
            ("s_end", 120.0),
            ("tol", 1e-12),
            ("z_at_s0", 12.0),
        ],
        "fourier-split" => &[
            ("z_lo", 8.0),
            ("z_hi", 64.0),
            ("n_z", 257.0),
            ("n_theta", 32.0),
            ("planted_amp", 1.0),
            ("planted_mode", 1.0),
            ("planted_exp", 5.0),
        ],
        "decay-fit" => &[
            ("z_lo", 8.0),
            ("z_hi", 128.0),
            ("n", 500.0),
            ("c", 3.0),
            ("p", 7.0),
            ("modulation", 0.0),
            ("fit_rel_tol", 0.02),
        ],
        "symmetry-check" => &[
            ("radius", std::f64::consts::SQRT_2),
            ("amp", 0.0),
            ("eps", 1e-3),
            ("z_center", 0.0),
            ("z_lo", -250.0),
            ("z_hi", 50.0),
            ("n_z", 301.0),
            ("n_theta", 32.0),
        ],
        "cylindricality-check" => &[("z_center", 0.0), ("eps", 0.1)],
        "rescale" => &[
            ("radius", 3.0),
            ("lambda", std::f64::consts::SQRT_2 / 3.0),
            ("z_lo", 0.0),
            ("z_hi", 10.0),
            ("n_z", 21.0),
            ("n_theta", 16.0),
        ],
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub out_dir: String,
    pub format: String,
    pub threads: usize,
    pub seed: u64,
    pub surface: Option<String>,
    /// Sorted so serialization (and the config hash) is canonical.
    pub params: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    /// Fully-defaulted config for a context.
    pub fn defaults(context: &str) -> Option<Self> {
        let spec = param_spec(context)?;
        Some(Self {
            experiment: context.to_string(),
            out_dir: "out".to_string(),
            format: "json".to_string(),
            threads: 1,
            seed: 42,
            surface: None,
            params: spec.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        })
    }

    pub fn param(&self, key: &str) -> f64 {
        *self
            .params
            .get(key)
            .unwrap_or_else(|| panic!("param {key} missing after validation"))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        format!("{:x}", h.finalize())
    }
}

/// All violations found in a config, with key paths.
#[derive(Debug)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem(s)):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i];
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            cur.push((prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost));
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Closest key from `known`, if it is close enough to be a plausible typo.
pub fn nearest_key<'a>(key: &str, known: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    known
        .into_iter()
        .map(|k| (levenshtein(key, k), k))
        .min()
        .filter(|&(d, k)| d <= (k.len() / 2).max(2))
        .map(|(_, k)| k)
}

fn suggest(key: &str, known: &[&'static str]) -> String {
    match nearest_key(key, known.iter().copied()) {
        Some(s) => format!("unknown key \"{key}\" (did you mean \"{s}\"?)"),
        None => format!("unknown key \"{key}\""),
    }
}

/// Parse and validate a raw config against the schema for `context`
/// (an experiment or subcommand name). Missing fields take defaults;
/// every violation found is reported.
pub fn validate_config(raw: &str, context: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(raw).map_err(|e| ConfigError {
        violations: vec![format!(
            "syntax error at line {}, column {}: {e}",
            e.line(),
            e.column()
        )],
    })?;
    let mut violations = Vec::new();
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            return Err(ConfigError {
                violations: vec!["top level must be a JSON object".into()],
            })
        }
    };

    let mut cfg = match ExperimentConfig::defaults(context) {
        Some(c) => c,
        None => {
            let mut msg = format!("unknown experiment \"{context}\"");
            if let Some(s) = nearest_key(context, EXPERIMENTS.iter().copied()) {
                msg.push_str(&format!(" (did you mean \"{s}\"?)"));
            }
            return Err(ConfigError {
                violations: vec![msg],
            });
        }
    };
    let spec = param_spec(context).unwrap();
    let known_params: Vec<&'static str> = spec.iter().map(|&(k, _)| k).collect();

    for (key, v) in obj {
        match key.as_str() {
            "experiment" => match v.as_str() {
                Some(name) => {
                    if name != context {
                        violations.push(format!(
                            "experiment: config says \"{name}\" but the requested context is \"{context}\""
                        ));
                    }
                }
                None => violations.push("experiment: must be a string".into()),
            },
            "out_dir" => match v.as_str() {
                Some(s) => cfg.out_dir = s.to_string(),
                None => violations.push("out_dir: must be a string".into()),
            },
            "format" => match v.as_str() {
                Some(s) if s == "csv" || s == "json" => cfg.format = s.to_string(),
                Some(s) => violations.push(format!("format: must be \"csv\" or \"json\", got \"{s}\"")),
                None => violations.push("format: must be a string".into()),
            },
            "threads" => match v.as_u64() {
                Some(n) => cfg.threads = n as usize,
                None => violations.push("threads: must be a non-negative integer".into()),
            },
            "seed" => match v.as_u64() {
                Some(n) => cfg.seed = n,
                None => violations.push("seed: must be a non-negative integer".into()),
            },
            "surface" => match v.as_str() {
                Some(s) => cfg.surface = Some(s.to_string()),
                None => violations.push("surface: must be a string".into()),
            },
            "params" => match v.as_object() {
                Some(p) => {
                    for (pk, pv) in p {
                        if !known_params.contains(&pk.as_str()) {
                            let hint = match nearest_key(pk, known_params.iter().copied()) {
                                Some(s) => format!(" (did you mean \"{s}\"?)"),
                                None => String::new(),
                            };
                            violations.push(format!("params.{pk}: unknown key{hint}"));
                            continue;
                        }
                        match pv.as_f64() {
                            Some(x) => {
                                cfg.params.insert(pk.clone(), x);
                            }
                            None => violations.push(format!("params.{pk}: must be a number")),
                        }
                    }
                }
                None => violations.push("params: must be an object".into()),
            },
            other => violations.push(suggest(other, TOP_KEYS)),
        }
    }

    semantic_checks(&cfg, &mut violations);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { violations })
    }
}

fn semantic_checks(cfg: &ExperimentConfig, violations: &mut Vec<String>) {
    for (k, &v) in &cfg.params {
        if !v.is_finite() {
            violations.push(format!("params.{k}: must be finite, got {v}"));
            continue;
        }
        let lower = k.to_ascii_lowercase();
        if (lower.ends_with("tol") || lower.starts_with("eps") || lower == "rho") && !(v > 0.0) {
            violations.push(format!("params.{k}: must be > 0, got {v}"));
        }
        if (k == "n_z" || k == "n_theta" || k == "n_s" || k == "n" || k == "launches" || k == "j_max")
            && (v < 0.0 || v.fract() != 0.0)
        {
            violations.push(format!("params.{k}: must be a non-negative integer, got {v}"));
        }
    }
    if let Some(&q) = cfg.params.get("q") {
        if !(q >= 2.0 && q.fract() == 0.0) {
            violations.push(format!("params.q: must be an integer >= 2, got {q}"));
        }
    }
    if let (Some(&a), Some(&b)) = (cfg.params.get("s0"), cfg.params.get("s_end")) {
        if !(b > a && a > 0.0) {
            violations.push(format!("params.s_end: need s_end > s0 > 0, got s0 = {a}, s_end = {b}"));
        }
    }
    if let (Some(&a), Some(&b)) = (cfg.params.get("z_lo"), cfg.params.get("z_hi")) {
        if !(b > a) {
            violations.push(format!("params.z_hi: need z_hi > z_lo, got [{a}, {b}]"));
        }
    }
    if let (Some(&a), Some(&b)) = (cfg.params.get("s_min"), cfg.params.get("s_max")) {
        if !(b > a && a > 0.0) {
            violations.push(format!(
                "params.s_max: need s_max > s_min > 0, got [{a}, {b}]"
            ));
        }
    }
    if let (Some(&a), Some(&b)) = (cfg.params.get("scale_min"), cfg.params.get("scale_max")) {
        if !(b >= a && a > 0.0) {
            violations.push(format!(
                "params.scale_max: need scale_max >= scale_min > 0, got [{a}, {b}]"
            ));
        }
    }
    if let Some(&l) = cfg.params.get("launches") {
        if l < 1.0 {
            violations.push(format!("params.launches: must be >= 1, got {l}"));
        }
    }
}
