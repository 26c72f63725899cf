use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// One named pass/fail check with the number it was decided on.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Invariant or acceptance criterion the check stands for.
    pub traces_to: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    /// Distance to the threshold, positive when passing.
    pub margin: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `measured < threshold`.
    pub fn below(name: &str, traces_to: &str, measured: f64, threshold: f64) -> Self {
        Check::new(name, traces_to, measured < threshold, measured, threshold, threshold - measured)
    }

    /// Passes when `measured > threshold`.
    pub fn above(name: &str, traces_to: &str, measured: f64, threshold: f64) -> Self {
        Check::new(name, traces_to, measured > threshold, measured, threshold, measured - threshold)
    }

    /// Passes when `lo <= measured <= hi`; the threshold field holds the
    /// nearer end.
    pub fn within(name: &str, traces_to: &str, measured: f64, lo: f64, hi: f64) -> Self {
        let margin = (measured - lo).min(hi - measured);
        let nearer = if measured - lo < hi - measured { lo } else { hi };
        Check::new(name, traces_to, margin >= 0.0, measured, nearer, margin)
    }

    pub fn new(name: &str, traces_to: &str, pass: bool, measured: f64, threshold: f64, margin: f64) -> Self {
        Check {
            name: name.to_string(),
            traces_to: traces_to.to_string(),
            pass,
            measured,
            threshold,
            margin,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "[{}] {}/{}: measured {:.6e}, threshold {:.6e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                self.experiment,
                c.name,
                c.measured,
                c.threshold
            ));
        }
        s
    }
}

/// Accumulates checks and artifacts while a suite runs.
pub struct ReportBuilder {
    experiment: String,
    seed: u64,
    dir: PathBuf,
    start: Instant,
    checks: Vec<Check>,
    artifacts: Vec<String>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, seed: u64, dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(ReportBuilder {
            experiment: experiment.to_string(),
            seed,
            dir: dir.to_path_buf(),
            start: Instant::now(),
            checks: Vec::new(),
            artifacts: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Names are unique within a report; a repeated name is a bug in the
    /// suite.
    pub fn push(&mut self, check: Check) {
        assert!(
            self.checks.iter().all(|c| c.name != check.name),
            "duplicate check name {}",
            check.name
        );
        self.checks.push(check);
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.artifacts.push(name.to_string());
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        self.write(name, text.as_bytes())
    }

    /// Registers a file written by other means.
    pub fn record(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    pub fn finish(mut self) -> CliResult<RunReport> {
        self.artifacts.push("report.json".into());
        let report = RunReport {
            experiment: self.experiment,
            seed: self.seed,
            passed: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            artifacts: self.artifacts,
        };
        let path = self.dir.join("report.json");
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Report(e.to_string()))?;
        std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
        Ok(report)
    }
}
