mod common;

use std::process::Command;

use semiclass_cli::config::{ConfigError, ExperimentConfig};
use semiclass_cli::render::{grid_pgm_bytes, husimi_rows};
use semiclass_cli::{render_grid_pgm, run_suite, CliError};
use semiclass_core::classical::TorusPoint;
use semiclass_core::measures::husimi;
use semiclass_core::torus::{coherent_state, TorusHilbert};

const BIN: &str = env!("CARGO_BIN_EXE_semiclass-lab");

#[test]
fn pgm_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.pgm");
    render_grid_pgm(&[vec![0.0, 1.0], vec![1.0, 0.0]], &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes, b"P5\n2 2\n255\n\x00\xff\xff\x00");
    render_grid_pgm(&vec![vec![0.0; 4]; 3], &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..11], b"P5\n4 3\n255\n");
    assert!(bytes[11..].iter().all(|&b| b == 0));
}

#[test]
fn pgm_write_error_names_the_path() {
    let err = render_grid_pgm(&[vec![1.0]], std::path::Path::new("/nonexistent/dir/x.pgm")).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/dir/x.pgm"));
}

#[test]
fn coherent_husimi_peaks_at_the_centre() {
    let h = TorusHilbert::new(64).unwrap();
    let grid = husimi(&coherent_state(h, TorusPoint::new(0.5, 0.5)), 64).unwrap();
    let bytes = grid_pgm_bytes(&husimi_rows(&grid)).unwrap();
    let header = b"P5\n64 64\n255\n".len();
    let pixels = &bytes[header..];
    let k = (0..pixels.len()).max_by_key(|&k| pixels[k]).unwrap();
    let (row, col) = (k / 64, k % 64);
    // ξ = 1/2 is row 31 counting from the top, x = 1/2 is column 32
    assert_eq!((row, col), (31, 32));
    assert_eq!(pixels[k], 255);
}

#[test]
fn flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# test\nN = 128\nseed = 3\n").unwrap();
    let cfg = ExperimentConfig::load(Some(&path), &[("N".into(), "64".into())]).unwrap();
    assert_eq!(cfg.n, 64);
    assert_eq!(cfg.seed, 3);
}

#[test]
fn unknown_key_and_bad_type_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "Nn = 5\n").unwrap();
    assert!(matches!(ExperimentConfig::load(Some(&path), &[]), Err(ConfigError::UnknownKey { .. })));
    std::fs::write(&path, "h = small\n").unwrap();
    let err = ExperimentConfig::load(Some(&path), &[]).unwrap_err();
    assert!(err.to_string().contains('h'));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::config(dir.path(), &[]);
    assert!(matches!(run_suite("nope", &cfg), Err(CliError::UnknownExperiment(_))));
}

#[test]
fn report_lists_every_check_once() {
    let dir = tempfile::tempdir().unwrap();
    let r = common::run("ergodic-orbit", dir.path(), &[("bounces", "20000")]);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("ergodic-orbit/report.json")).unwrap()).unwrap();
    let names: Vec<&str> = json["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut unique = names.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(names.len(), unique.len());
    assert_eq!(names.len(), r.checks.len());
    assert!(json["checks"].as_array().unwrap().iter().all(|c| !c["traces_to"].as_str().unwrap().is_empty()));
    for a in &r.artifacts {
        assert!(dir.path().join("ergodic-orbit").join(a).exists(), "{a}");
    }
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 1\nbounces = 20000\n").unwrap();
    let ok = Command::new(BIN)
        .args(["--experiment", "ergodic-orbit", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .env("SEMICLASS_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("ergodic-orbit/report.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 9);

    let bad = Command::new(BIN).args(["--experiment", "nope"]).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let invalid = Command::new(BIN).args(["--experiment", "egorov", "--set", "N=0"]).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("N must be at least 1"));

    // a check failing on purpose: coverage with too few bounces
    let failing = Command::new(BIN)
        .args(["--experiment", "ergodic-orbit", "--set", "bounces=10"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(failing.status.code(), Some(1));

    let list = Command::new(BIN).args(["--experiment", "list"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&list.stdout).lines().count(), 7);
}

#[test]
fn dump_state_writes_containers() {
    let dir = tempfile::tempdir().unwrap();
    common::run("scar-construction", dir.path(), &[("N_list", "56"), ("dump_state", "true")]);
    let c = semiclass_core::io::read_container(&dir.path().join("scar-construction/scar_N56.bin")).unwrap();
    let semiclass_core::io::Container::State(v) = c else { panic!("expected a state") };
    assert_eq!(v.len(), 56);
    let u = semiclass_core::io::read_container(&dir.path().join("scar-construction/propagator_N56.bin")).unwrap();
    assert!(matches!(u, semiclass_core::io::Container::Operator { n: 56, .. }));
}
