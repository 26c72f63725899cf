use semiclass_core::io::fmt_num;
use semiclass_core::linalg::op_norm;
use semiclass_core::measures::{eigenbasis_matrix_elements, qe_variance};
use semiclass_core::spectral::{degeneracy_clusters, diagonalize, eigenphase_csv, DEFAULT_DEGENERACY_TOL};
use semiclass_core::torus::{cat_propagator, TorusHilbert, TrigObservable};

use super::n_list;
use crate::config::ExperimentConfig;
use crate::error::{CliResult, Context};
use crate::report::{Check, ReportBuilder};

const DEFAULT_N: [usize; 2] = [64, 512];

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let map = config.cat_map()?;
    let probe = TrigObservable::cos_mode((1, 0), 2.0);
    let shifted = TrigObservable::cos_mode((1, 1), 1.0)
        .add(&TrigObservable::sin_mode((0, 2), 0.5))
        .add(&TrigObservable::constant(0.3));
    let mut variances = Vec::new();
    let (mut worst_avg, mut worst_recon, mut count_errors) = (0.0f64, 0.0f64, 0usize);
    // invariant under the half shift (x, xi) -> (x + 1/2, xi + 1/2), which
    // commutes with U when 8 | N and forces the probe's matrix elements to 0
    let even_probe = TrigObservable::cos_mode((1, 1), 2.0);
    let mut even_variances = Vec::new();
    let mut csv = String::from("N,variance,even_probe_variance,max_multiplicity\n");
    for n in n_list(config, &DEFAULT_N) {
        let h = TorusHilbert::new(n).context("Hilbert space")?;
        let u = cat_propagator(h, &map).context(format!("propagator at N = {n}"))?;
        let dec = diagonalize(&u).context(format!("diagonalization at N = {n}"))?;
        if dec.phases.len() != n {
            count_errors += 1;
        }
        worst_recon = worst_recon.max(op_norm((dec.reconstruct() - u.matrix()).as_ref()).context("reconstruction")?);
        for a in [&probe, &shifted] {
            let values = eigenbasis_matrix_elements(&dec, a).context("matrix elements")?;
            let avg = values.iter().sum::<f64>() / n as f64;
            worst_avg = worst_avg.max((avg - a.mean()).abs());
        }
        let v = qe_variance(&dec, &probe).context("QE variance")?;
        let ve = qe_variance(&dec, &even_probe).context("QE variance")?;
        let clusters = degeneracy_clusters(&dec.phases, DEFAULT_DEGENERACY_TOL).context("clusters")?;
        rb.write_text(&format!("eigenphases_N{n}.csv"), &eigenphase_csv(&dec, &clusters))?;
        csv.push_str(&format!("{n},{},{},{}\n", fmt_num(v), fmt_num(ve), clusters.largest_multiplicity()));
        variances.push((n, v));
        even_variances.push((n, ve));
    }
    rb.write_text("qe_variance.csv", &csv)?;
    rb.push(Check::below("basis_average_identity", "acceptance 3: eigenbasis average equals the mean", worst_avg, 1e-10));
    rb.push(Check::below("reconstruction", "spectral: V diag(e^{i phase}) V* = U", worst_recon, 1e-10));
    rb.push(Check::new("eigenphase_count", "spectral: N eigenphases", count_errors == 0, count_errors as f64, 0.0, -(count_errors as f64)));
    decrease_check(rb, "qe_variance_decreases", "acceptance 3: QE variance of 2cos(2 pi x) decreases with N", &variances);
    decrease_check(rb, "qe_variance_decreases_even_probe", "quantum ergodicity: variance of 2cos(2 pi (x + xi)) decreases with N", &even_variances);
    Ok(())
}

/// Compares the largest N against the smallest.
fn decrease_check(rb: &mut ReportBuilder, name: &str, traces_to: &str, values: &[(usize, f64)]) {
    let lo = values.iter().min_by_key(|(n, _)| *n).copied();
    let hi = values.iter().max_by_key(|(n, _)| *n).copied();
    if let (Some((n_lo, v_lo)), Some((n_hi, v_hi))) = (lo, hi) {
        if n_lo != n_hi {
            rb.push(Check::below(name, traces_to, v_hi, v_lo).with_detail(format!("N = {n_hi} against N = {n_lo}")));
        }
    }
}
