use semiclass_core::billiard_quantum::{
    bouncing_ball_score, build_laplacian, gram_defect, median, mode_pgm, qe_spatial_variance, quantile, scar_score,
    weyl_estimate, BilliardMode, ModeRecord, RegionObservable, Solver, SolverOptions, MAX_KH, RESIDUAL_LIMIT,
};
use semiclass_core::classical::Region;
use semiclass_core::io::fmt_num;

use super::label;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult, Context};
use crate::report::{Check, ReportBuilder};

const WEYL_K: [f64; 3] = [15.0, 30.0, 39.0];
const WEYL_TOL: f64 = 0.15;
const MEDIAN_BAND: (f64, f64) = (0.8, 1.2);
const BB_MIN: f64 = 1.5;

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let stadium = config.stadium()?;
    let lap = build_laplacian(&stadium, config.h).context("stadium Laplacian")?;
    let solver = Solver::new(&lap, SolverOptions { seed: config.seed ^ 0x5eed, ..SolverOptions::default() }).context("solver")?;
    let domain = &lap.domain;

    let mut weyl = String::from("k,count,weyl,ratio\n");
    let mut worst_weyl = 0.0f64;
    for k in WEYL_K.into_iter().filter(|k| k * config.h < MAX_KH) {
        let count = solver.counting_function(k).context("counting function")? as f64;
        let w = weyl_estimate(stadium.area(), k);
        worst_weyl = worst_weyl.max((count / w - 1.0).abs());
        weyl.push_str(&format!("{},{count},{},{}\n", fmt_num(k), fmt_num(w), fmt_num(count / w)));
    }
    rb.write_text("weyl.csv", &weyl)?;
    rb.push(Check::below("weyl_counting", "billiard: counting function follows Weyl", worst_weyl, WEYL_TOL));

    // the right cap; the left half is degenerate on a grid symmetric in x
    let cap = RegionObservable::Indicator(Region::Rect {
        x0: stadium.half_length,
        x1: stadium.half_length + 2.0 * stadium.radius,
        y0: -2.0 * stadium.radius,
        y1: 2.0 * stadium.radius,
    });
    let mut variances = Vec::new();
    let mut windows = config.windows.clone();
    windows.sort_by(f64::total_cmp);
    for &k in &windows {
        let modes = solver
            .window(k - config.window_halfwidth, k + config.window_halfwidth)
            .context(format!("stadium window at k = {k}"))?;
        window_checks(config, rb, &lap.domain, k, &modes)?;
        if let Ok(v) = qe_spatial_variance(domain, &modes, &cap) {
            variances.push((k, v));
        }
    }
    let mut csv = String::from("k,cap_variance\n");
    for (k, v) in &variances {
        csv.push_str(&format!("{},{}\n", fmt_num(*k), fmt_num(*v)));
    }
    rb.write_text("qe_cap_variance.csv", &csv)?;
    if let (Some(first), Some(last)) = (variances.first(), variances.last()) {
        if variances.len() > 1 {
            rb.push(
                Check::below("cap_variance_decreases", "billiard: QE variance decays with k", last.1, first.1)
                    .with_detail(format!("k = {} against k = {}", last.0, first.0)),
            );
        }
    }
    Ok(())
}

fn window_checks(
    config: &ExperimentConfig,
    rb: &mut ReportBuilder,
    domain: &semiclass_core::billiard_quantum::DiscreteDomain,
    k: f64,
    modes: &[BilliardMode],
) -> CliResult<()> {
    let tag = format!("k{}", label(k));
    if modes.is_empty() {
        rb.push(Check::new(&format!("{tag}_modes"), "acceptance 8: nonempty window", false, 0.0, 1.0, -1.0));
        return Ok(());
    }
    let mut scar = Vec::with_capacity(modes.len());
    let mut bb = Vec::with_capacity(modes.len());
    let mut jsonl = String::new();
    let mut csv = String::from("index,k,eigenvalue,residual,scar_score,bouncing_ball_score\n");
    for (i, m) in modes.iter().enumerate() {
        let s = scar_score(domain, m, config.tube_w).context("scar score")?.ratio;
        let b = bouncing_ball_score(domain, m).context("bouncing-ball score")?.ratio;
        scar.push(s);
        bb.push(b);
        let rec = ModeRecord::new(domain, i, m, config.tube_w);
        jsonl.push_str(&serde_json::to_string(&rec).map_err(|e| CliError::Report(e.to_string()))?);
        jsonl.push('\n');
        csv.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            fmt_num(m.k),
            fmt_num(m.eigenvalue),
            fmt_num(m.residual),
            fmt_num(s),
            fmt_num(b)
        ));
    }
    rb.write_text(&format!("modes_{tag}.jsonl"), &jsonl)?;
    rb.write_text(&format!("scores_{tag}.csv"), &csv)?;

    let argmax = |v: &[f64]| (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    let (ib, is) = (argmax(&bb), argmax(&scar));
    rb.write(&format!("bouncing_ball_{tag}.pgm"), &mode_pgm(domain, &modes[ib]).context("mode raster")?)?;
    rb.write(&format!("scar_{tag}.pgm"), &mode_pgm(domain, &modes[is]).context("mode raster")?)?;

    let detail = format!("{} modes in k = {k} +- {}", modes.len(), config.window_halfwidth);
    rb.push(Check::above(&format!("{tag}_bouncing_ball_max"), "acceptance 8: some mode has bouncing-ball score > 1.5", bb[ib], BB_MIN).with_detail(detail.clone()));
    rb.push(Check::above(&format!("{tag}_scar_max_above_p90"), "acceptance 8: some scar score above the window's 90th percentile", scar[is], quantile(&scar, 0.9)));
    rb.push(Check::within(&format!("{tag}_bouncing_ball_median"), "acceptance 8: median score in [0.8, 1.2]", median(&bb), MEDIAN_BAND.0, MEDIAN_BAND.1));
    rb.push(Check::within(&format!("{tag}_scar_median"), "acceptance 8: median score in [0.8, 1.2]", median(&scar), MEDIAN_BAND.0, MEDIAN_BAND.1));
    let res = modes.iter().map(|m| m.residual).fold(0.0, f64::max);
    rb.push(Check::below(&format!("{tag}_residual"), "billiard: eigen-residual", res, RESIDUAL_LIMIT));
    rb.push(Check::below(&format!("{tag}_orthonormality"), "billiard: modes orthonormal", gram_defect(modes, config.h), 1e-8));
    Ok(())
}
