use semiclass_core::classical::CatMap;
use semiclass_core::io::fmt_num;
use semiclass_core::linalg::{identity, unitarity_defect};
use semiclass_core::torus::{cat_propagator, egorov_defect_powered, intertwining_defect, TorusHilbert, TrigObservable};

use super::n_list;
use crate::config::ExperimentConfig;
use crate::error::{CliResult, Context};
use crate::report::{Check, ReportBuilder};

const DEFAULT_N: [usize; 4] = [64, 128, 256, 512];
const MAX_MODE: i64 = 3;

/// cos and sin modes with 0 < max(|m1|,|m2|) <= 3, one of each ±m pair.
fn modes() -> Vec<(String, TrigObservable)> {
    let mut out = Vec::new();
    for m1 in 0..=MAX_MODE {
        for m2 in -MAX_MODE..=MAX_MODE {
            if m1 == 0 && m2 <= 0 {
                continue;
            }
            out.push((format!("cos({m1};{m2})"), TrigObservable::cos_mode((m1, m2), 1.0)));
            out.push((format!("sin({m1};{m2})"), TrigObservable::sin_mode((m1, m2), 1.0)));
        }
    }
    out
}

pub fn run(config: &ExperimentConfig, rb: &mut ReportBuilder) -> CliResult<()> {
    let map: CatMap = config.cat_map()?;
    let observables = modes();
    let probes = [(1, 0), (0, 1), (1, 1), (2, -1), (3, 2)];
    let mut csv = String::from("N,t,mode,defect\n");
    let (mut worst_egorov, mut worst_unitary, mut worst_inter) = (0.0f64, 0.0f64, 0.0f64);
    for n in n_list(config, &DEFAULT_N) {
        let h = TorusHilbert::new(n).context("Hilbert space")?;
        let u = cat_propagator(h, &map).context(format!("propagator at N = {n}"))?;
        worst_unitary = worst_unitary.max(unitarity_defect(u.matrix()).context("unitarity")?);
        worst_inter = worst_inter.max(intertwining_defect(h, &u, &map, &probes).context("intertwining")?);
        let mut ut = identity(n);
        for t in 1..=config.t_max {
            ut = u.matrix() * &ut;
            let mt = map.power(t as i64).context("map power")?;
            for (name, a) in &observables {
                let d = egorov_defect_powered(h, ut.as_ref(), &mt, a).context(format!("Egorov defect N = {n}, t = {t}"))?;
                worst_egorov = worst_egorov.max(d);
                csv.push_str(&format!("{n},{t},{name},{}\n", fmt_num(d)));
            }
        }
    }
    rb.write_text("egorov_defects.csv", &csv)?;
    rb.push(Check::below("egorov_max_defect", "acceptance 1: exact Egorov", worst_egorov, 1e-9));
    rb.push(Check::below("unitarity_max_defect", "acceptance 2: propagator unitarity", worst_unitary, 1e-10));
    rb.push(Check::below("intertwining_max_defect", "acceptance 2: U T(n) U* = T(Mn)", worst_inter, 1e-10));
    Ok(())
}
