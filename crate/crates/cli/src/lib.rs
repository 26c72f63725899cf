//! Experiment suites for the semiclass laboratory: each suite runs one group
//! of checks, writes its artifacts under `<out>/<suite>/`, and returns a
//! [`RunReport`].

pub mod config;
pub mod error;
pub mod reference;
pub mod render;
pub mod report;
mod suites;

use rayon::prelude::*;

pub use config::{ConfigError, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use render::render_grid_pgm;
pub use report::{Check, RunReport};

pub const SUITES: [&str; 7] = [
    "egorov",
    "qe-catmap",
    "scar-construction",
    "entropy-sweep",
    "billiard-circle",
    "billiard-stadium",
    "ergodic-orbit",
];

/// Runs the suite named in `config.experiment`.
pub fn run_experiment(config: &ExperimentConfig) -> CliResult<RunReport> {
    let name = config
        .experiment
        .as_deref()
        .ok_or_else(|| CliError::UnknownExperiment(String::new()))?;
    run_suite(name, config)
}

pub fn run_suite(name: &str, config: &ExperimentConfig) -> CliResult<RunReport> {
    if !SUITES.contains(&name) {
        return Err(CliError::UnknownExperiment(name.to_string()));
    }
    config.validate()?;
    config.validate_for(name)?;
    let mut rb = report::ReportBuilder::new(name, config.seed, &config.out.join(name))?;
    match name {
        "egorov" => suites::egorov::run(config, &mut rb)?,
        "qe-catmap" => suites::qe_catmap::run(config, &mut rb)?,
        "scar-construction" => suites::scar::run(config, &mut rb)?,
        "entropy-sweep" => suites::entropy::run(config, &mut rb)?,
        "billiard-circle" => suites::billiard_circle::run(config, &mut rb)?,
        "billiard-stadium" => suites::billiard_stadium::run(config, &mut rb)?,
        "ergodic-orbit" => suites::ergodic::run(config, &mut rb)?,
        _ => unreachable!(),
    }
    rb.finish()
}

/// Every suite in turn, or as concurrent tasks when `parallel` is set. Each
/// suite writes to its own directory.
pub fn run_all(config: &ExperimentConfig, parallel: bool) -> Vec<(String, CliResult<RunReport>)> {
    let run = |name: &&str| (name.to_string(), run_suite(name, config));
    if parallel {
        SUITES.par_iter().map(run).collect()
    } else {
        SUITES.iter().map(run).collect()
    }
}
