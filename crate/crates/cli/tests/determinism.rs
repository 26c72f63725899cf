mod common;

#[test]
fn seeded_runs_write_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sets = [("seed", "5"), ("bounces", "50000")];
    common::run("ergodic-orbit", a.path(), &sets);
    common::run("ergodic-orbit", b.path(), &sets);
    let fa = common::csv_files(&a.path().join("ergodic-orbit"));
    assert!(!fa.is_empty());
    assert_eq!(fa, common::csv_files(&b.path().join("ergodic-orbit")));
}

#[test]
fn different_seeds_move_the_orbit() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    common::run("ergodic-orbit", a.path(), &[("seed", "1"), ("bounces", "1000")]);
    common::run("ergodic-orbit", b.path(), &[("seed", "2"), ("bounces", "1000")]);
    assert_ne!(
        std::fs::read(a.path().join("ergodic-orbit/orbit.csv")).unwrap(),
        std::fs::read(b.path().join("ergodic-orbit/orbit.csv")).unwrap()
    );
}

#[test]
fn parallel_runs_match_sequential() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = |dir: &std::path::Path| {
        common::config(
            dir,
            &[
                ("N_list", "56"),
                ("samples", "5000"),
                ("centers", "20"),
                ("N", "32"),
                ("h", "0.025"),
                ("windows", "8"),
                ("window_halfwidth", "1.5"),
                ("bounces", "20000"),
                ("t_max", "1"),
            ],
        )
    };
    let seq = semiclass_cli::run_all(&cfg(a.path()), false);
    let par = semiclass_cli::run_all(&cfg(b.path()), true);
    for ((name, r1), (_, r2)) in seq.iter().zip(&par) {
        assert!(r1.is_ok() && r2.is_ok(), "{name}: {:?} {:?}", r1.as_ref().err(), r2.as_ref().err());
        assert_eq!(common::csv_files(&a.path().join(name)), common::csv_files(&b.path().join(name)), "{name}");
    }
}
