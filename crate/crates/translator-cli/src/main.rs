//! `translator` — command-line harness for the translating-soliton
//! verification toolkit.
//!
//! Exit codes: 0 all checks pass, 1 at least one check fails, 2 config
//! error, 3 runtime/numerical error. The `TRANSLATOR_OUT_DIR` environment
//! variable overrides the output directory from both config and flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use translator_cli::config::{validate_config, ExperimentConfig};
use translator_cli::{run_to_dir, Exit};

/// Env var overriding the output directory.
const OUT_DIR_ENV: &str = "TRANSLATOR_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "translator",
    about = "Numerical verification toolkit for translating solitons of mean curvature flow",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; omitted fields take per-context defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overridden by the TRANSLATOR_OUT_DIR env var).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format for data files.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Rayon worker threads for internal sweeps; 0 keeps the library default.
    #[arg(long)]
    threads: Option<usize>,
    /// RNG seed for sweep sampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the bowl profile ODE and emit the profile curve.
    BowlProfile(Common),
    /// Tail asymptotics of the phi-form ODE under a perturbation envelope.
    OdeAsymptotics(Common),
    /// Translator PDE residual of the revolved bowl on a cylindrical grid.
    Residual(Common),
    /// Split a field into axisymmetric profile plus Fourier remainder.
    FourierSplit(Common),
    /// Fit a power-law decay exponent over dyadic bands.
    DecayFit(Common),
    /// Recover a symmetry axis from a rotation-function band.
    AxisFit(Common),
    /// Quantitative vertical-symmetry check with axis witness.
    SymmetryCheck(Common),
    /// Quantitative closeness check to the shrinking-cylinder family.
    CylindricalityCheck(Common),
    /// Parabolic rescaling of a cylindrical window.
    Rescale(Common),
    /// Gaussian density values of the model surfaces.
    Density(Common),
    /// Entropy lower bound by a density sweep over scales.
    Entropy(Common),
    /// Dyadic symmetry-improvement schedule and its contraction constant.
    DecaySchedule(Common),
    /// Run a named experiment bundling a verification chain.
    Run {
        /// Experiment name; defaults to the config's `experiment` field.
        experiment: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Validate a config file and print its normalized form and hash.
    Validate {
        /// Context (experiment or subcommand name) to validate against.
        experiment: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::BowlProfile(c) => run_op("bowl-profile", &c),
        Command::OdeAsymptotics(c) => run_op("ode-asymptotics", &c),
        Command::Residual(c) => run_op("residual", &c),
        Command::FourierSplit(c) => run_op("fourier-split", &c),
        Command::DecayFit(c) => run_op("decay-fit", &c),
        Command::AxisFit(c) => run_op("axis-fit", &c),
        Command::SymmetryCheck(c) => run_op("symmetry-check", &c),
        Command::CylindricalityCheck(c) => run_op("cylindricality-check", &c),
        Command::Rescale(c) => run_op("rescale", &c),
        Command::Density(c) => run_op("density", &c),
        Command::Entropy(c) => run_op("entropy", &c),
        Command::DecaySchedule(c) => run_op("decay-schedule", &c),
        Command::Run { experiment, common } => run_named(experiment.as_deref(), &common),
        Command::Validate { experiment, common } => validate_only(experiment.as_deref(), &common),
    };
    ExitCode::from(code as u8)
}

/// Read the config file (or "{}" when absent) and validate for `context`.
fn load_config(context: &str, common: &Common) -> Result<ExperimentConfig, Exit> {
    let raw = match &common.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return Err(Exit::ConfigError);
            }
        },
        None => "{}".to_string(),
    };
    let mut cfg = match validate_config(&raw, context) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return Err(Exit::ConfigError);
        }
    };
    // flag overrides; the env var wins over both
    if let Some(out) = &common.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        if !dir.is_empty() {
            cfg.out_dir = dir;
        }
    }
    if let Some(f) = &common.format {
        cfg.format = f.clone();
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig) -> Exit {
    let out_dir = PathBuf::from(&cfg.out_dir);
    let run = || match run_to_dir(cfg, &out_dir) {
        Ok(report) => {
            for check in &report.checks {
                println!(
                    "[{}] {} = {:e} {} {:e}",
                    if check.pass { "pass" } else { "FAIL" },
                    check.name,
                    check.measured,
                    check.comparator,
                    check.threshold
                );
            }
            println!(
                "{}: {} (config {}) -> {}/report.json",
                cfg.experiment,
                if report.pass { "PASS" } else { "FAIL" },
                &report.config_hash[..12],
                out_dir.display()
            );
            if report.pass {
                Exit::Pass
            } else {
                Exit::CheckFail
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", cfg.experiment);
            Exit::RuntimeError
        }
    };
    if cfg.threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: thread pool: {e}");
                Exit::RuntimeError
            }
        }
    } else {
        run()
    }
}

fn run_op(name: &str, common: &Common) -> Exit {
    match load_config(name, common) {
        Ok(cfg) => execute(&cfg),
        Err(code) => code,
    }
}

/// `run` resolves the experiment from the positional argument or, failing
/// that, from the config file's own `experiment` field.
fn run_named(experiment: Option<&str>, common: &Common) -> Exit {
    let context = match experiment {
        Some(name) => name.to_string(),
        None => match peek_experiment(common) {
            Ok(name) => name,
            Err(code) => return code,
        },
    };
    match load_config(&context, common) {
        Ok(cfg) => execute(&cfg),
        Err(code) => code,
    }
}

fn validate_only(experiment: Option<&str>, common: &Common) -> Exit {
    let context = match experiment {
        Some(name) => name.to_string(),
        None => match peek_experiment(common) {
            Ok(name) => name,
            Err(code) => return code,
        },
    };
    match load_config(&context, common) {
        Ok(cfg) => {
            let normalized = serde_json::to_string_pretty(&cfg).expect("config serializes");
            println!("{normalized}");
            println!("config_hash: {}", cfg.hash());
            Exit::Pass
        }
        Err(code) => code,
    }
}

/// Extract the `experiment` field from the raw config without validating.
fn peek_experiment(common: &Common) -> Result<String, Exit> {
    let Some(path) = &common.config else {
        eprintln!("error: no experiment given and no --config to read one from");
        return Err(Exit::ConfigError);
    };
    let raw = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", path.display());
            return Err(Exit::ConfigError);
        }
    };
    let value: serde_json::Value = match serde_json::from_str(&raw) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: config syntax: {e}");
            return Err(Exit::ConfigError);
        }
    };
    match value.get("experiment").and_then(|v| v.as_str()) {
        Some(name) => Ok(name.to_string()),
        None => {
            eprintln!("error: config has no \"experiment\" field and none was given");
            Err(Exit::ConfigError)
        }
    }
}
