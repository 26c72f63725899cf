use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiclass_core::billiard_quantum::{build_laplacian, mode_pgm, BilliardMode, ModeRecord, Solver, SolverOptions, RESIDUAL_LIMIT};
use semiclass_core::classical::{circle_angular_momentum, BilliardState, Bounces, StadiumDomain};
use semiclass_core::io::fmt_num;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, Context};
use crate::reference::bessel_first_zero;
use crate::report::{Check, ReportBuilder};

const CIRCLE_BOUNCES: usize = 100_000;

fn lowest(solver: &Solver, target: f64, count: usize) -> CliResult<Vec<BilliardMode>> {
    solver.near(target, count).context(format!("circle modes near k = {target:.4}"))
}

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let r = config.stadium_r;
    let disc = StadiumDomain::circle(r);
    let j0 = bessel_first_zero(0) / r;
    let j1 = bessel_first_zero(1) / r;
    let opts = SolverOptions { seed: config.seed ^ 0x5eed, ..SolverOptions::default() };

    let lap = build_laplacian(&disc, config.h).context("circle Laplacian")?;
    let solver = Solver::new(&lap, opts.clone()).context("solver")?;
    let first = lowest(&solver, j0, 1)?;
    let second = lowest(&solver, j1, 2)?;
    let k1 = first[0].k;
    rb.push(Check::below("k1_relative_error", "acceptance 7: k1 within 1% of j_{0,1}", (k1 / j0 - 1.0).abs(), 0.01));
    let k2_err = second.iter().map(|m| (m.k / j1 - 1.0).abs()).fold(0.0, f64::max);
    rb.push(Check::below("k2_relative_error", "billiard: doubly degenerate k2 within 1% of j_{1,1}", k2_err, 0.01));
    let worst_res = first.iter().chain(&second).map(|m| m.residual).fold(0.0, f64::max);
    rb.push(Check::below("mode_residual", "billiard: eigen-residual", worst_res, RESIDUAL_LIMIT));

    let coarse = build_laplacian(&disc, 2.0 * config.h).context("coarse circle Laplacian")?;
    let coarse_solver = Solver::new(&coarse, opts).context("solver")?;
    let k1_coarse = lowest(&coarse_solver, j0, 1)?[0].k;
    let e_fine = (k1 * k1 - j0 * j0).abs();
    let e_coarse = (k1_coarse * k1_coarse - j0 * j0).abs();
    let order = (e_coarse / e_fine).log2();
    rb.push(Check::within("convergence_order", "acceptance 7: FD order in [1.7, 2.3]", order, 1.7, 2.3));
    rb.write_text(
        "convergence.csv",
        &format!(
            "h,k1,eigenvalue_error\n{},{},{}\n{},{},{}\n",
            fmt_num(2.0 * config.h),
            fmt_num(k1_coarse),
            fmt_num(e_coarse),
            fmt_num(config.h),
            fmt_num(k1),
            fmt_num(e_fine)
        ),
    )?;

    let mut jsonl = String::new();
    for (i, m) in first.iter().chain(&second).enumerate() {
        let rec = ModeRecord::new(&lap.domain, i, m, config.tube_w);
        jsonl.push_str(&serde_json::to_string(&rec).map_err(|e| CliError::Report(e.to_string()))?);
        jsonl.push('\n');
    }
    rb.write_text("modes.jsonl", &jsonl)?;
    rb.write("ground_state.pgm", &mode_pgm(&lap.domain, &first[0]).context("mode raster")?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rho = r * 0.9 * rng.random::<f64>();
    let angle = std::f64::consts::TAU * rng.random::<f64>();
    let start = BilliardState { position: [rho, 0.0], direction: [angle.cos(), angle.sin()] };
    let l0 = circle_angular_momentum(&start);
    let mut drift = 0.0f64;
    for step in Bounces::new(&disc, start).take(CIRCLE_BOUNCES) {
        let (s, _) = step.context("circle orbit")?;
        drift = drift.max((circle_angular_momentum(&s) - l0).abs());
    }
    rb.push(
        Check::below("angular_momentum_drift", "acceptance 7: angular momentum over 1e5 bounces", drift, 1e-9)
            .with_detail(format!("L0 = {l0:.6}")),
    );
    Ok(())
}
