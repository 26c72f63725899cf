#![allow(dead_code)]

use std::path::Path;

use semiclass_cli::{run_suite, ExperimentConfig, RunReport};

pub fn config(out: &Path, sets: &[(&str, &str)]) -> ExperimentConfig {
    let mut overrides: Vec<(String, String)> = vec![("out".into(), out.display().to_string())];
    overrides.extend(sets.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    ExperimentConfig::load(None, &overrides).unwrap()
}

pub fn run(suite: &str, out: &Path, sets: &[(&str, &str)]) -> RunReport {
    run_suite(suite, &config(out, sets)).unwrap()
}

/// Every CSV artifact of a run, by file name.
pub fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}
