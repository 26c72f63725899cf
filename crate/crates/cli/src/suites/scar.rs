use semiclass_core::classical::{cat_lyapunov, TorusPoint};
use semiclass_core::io::fmt_num;
use semiclass_core::measures::{ball_mass, default_grid_size, husimi, weak_star_distance, wigner_coefficients, ModelMeasure};
use semiclass_core::spectral::{diagonalize, project_degenerate, quantum_period, scarred_state_with, DEFAULT_DEGENERACY_TOL};
use semiclass_core::torus::{cat_propagator, TorusHilbert};

use super::n_list;
use crate::config::ExperimentConfig;
use crate::error::{CliResult, Context};
use crate::render::{grid_pgm_bytes, husimi_rows};
use crate::report::{Check, ReportBuilder};

/// Dimensions up to 1024 whose quantum period for the default map is even
/// and at most 3 log N / λ₊.
const DEFAULT_N: [usize; 7] = [56, 195, 209, 260, 390, 418, 780];
const MASS_BAND: (f64, f64) = (0.35, 0.60);
const MIN_QUALIFYING: usize = 3;

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let map = config.cat_map()?;
    let lambda = cat_lyapunov(&map).lambda_plus;
    let mixture = ModelMeasure::half_scar();
    let mut csv = String::from("N,P,t_half,theta,mass,d_mixture,d_delta,d_lebesgue,overlap,residual,short_period,pass\n");
    let mut passing = Vec::new();
    for n in n_list(config, &DEFAULT_N) {
        let h = TorusHilbert::new(n).context("Hilbert space")?;
        let u = cat_propagator(h, &map).context(format!("propagator at N = {n}"))?;
        let period = quantum_period(h, &u, &map, 6 * n as u64).context(format!("quantum period at N = {n}"))?;
        let Some(qp) = period else {
            csv.push_str(&format!("{n},,,,,,,,,,false,false\n"));
            continue;
        };
        let short = qp.p as f64 <= 3.0 * (n as f64).ln() / lambda;
        let t_half = (qp.p as usize / 2).max(1);
        let scar = scarred_state_with(h, &u, Some(qp), t_half).context(format!("scarred state at N = {n}"))?;
        let grid = husimi(&scar.state, default_grid_size(n)).context("Husimi")?;
        let mass = ball_mass(&grid, TorusPoint::ORIGIN, config.eps).context("ball mass")?;
        let w = wigner_coefficients(&scar.state, config.cutoff).context("Wigner coefficients")?;
        let k = config.cutoff;
        let d_mix = weak_star_distance(&w, &mixture, k).context("weak-* distance")?;
        let d_delta = weak_star_distance(&w, &ModelMeasure::origin(), k).context("weak-* distance")?;
        let d_leb = weak_star_distance(&w, &ModelMeasure::Lebesgue, k).context("weak-* distance")?;
        let dec = diagonalize(&u).context(format!("diagonalization at N = {n}"))?;
        let overlap = project_degenerate(&dec, &scar.state.amplitudes, DEFAULT_DEGENERACY_TOL)
            .context("eigenspace projection")?
            .overlap;
        let pass = short && (MASS_BAND.0..=MASS_BAND.1).contains(&mass) && d_mix < d_delta.min(d_leb);
        if pass {
            passing.push(n);
        }
        csv.push_str(&format!(
            "{n},{},{t_half},{},{},{},{},{},{},{},{short},{pass}\n",
            qp.p,
            fmt_num(scar.theta),
            fmt_num(mass),
            fmt_num(d_mix),
            fmt_num(d_delta),
            fmt_num(d_leb),
            fmt_num(overlap),
            fmt_num(scar.residual)
        ));
        rb.write(&format!("husimi_N{n}.pgm"), &grid_pgm_bytes(&husimi_rows(&grid))?)?;
        if config.dump_state {
            rb.write(&format!("scar_N{n}.bin"), &scar.state.to_bytes())?;
            rb.write(&format!("propagator_N{n}.bin"), &u.to_bytes())?;
        }
    }
    rb.write_text("scar_construction.csv", &csv)?;
    let count = passing.len();
    rb.push(
        Check::new(
            "qualifying_dimensions",
            "acceptance 4: half-scar mass and weak-* ordering along short-period N",
            count >= MIN_QUALIFYING,
            count as f64,
            MIN_QUALIFYING as f64,
            count as f64 - MIN_QUALIFYING as f64,
        )
        .with_detail(format!("passing N: {passing:?}")),
    );
    Ok(())
}
