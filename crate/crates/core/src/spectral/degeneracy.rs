use std::f64::consts::TAU;

use faer::c64;
use serde::Serialize;

use super::{circular_distance, EigenDecomposition};
use crate::error::{Error, Result};
use crate::io::fmt_num;
use crate::torus::TorusState;

/// 2π·1e−8
pub const DEFAULT_DEGENERACY_TOL: f64 = TAU * 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub mean_phase: f64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub clusters: Vec<Cluster>,
    pub tolerance: f64,
}

impl DegeneracyReport {
    /// Cluster index of every eigenphase.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for (c, cl) in self.clusters.iter().enumerate() {
            for &i in &cl.members {
                out[i] = c;
            }
        }
        out
    }

    pub fn largest_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).max().unwrap_or(0)
    }
}

/// Single-linkage clustering of phases on the circle: neighbours closer than
/// `tol` share a cluster. Halving `tol` can only split clusters.
pub fn degeneracy_clusters(phases: &[f64], tol: f64) -> Result<DegeneracyReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("degeneracy tolerance must be positive".into()));
    }
    let n = phases.len();
    if n == 0 {
        return Ok(DegeneracyReport { clusters: vec![], tolerance: tol });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].rem_euclid(TAU).total_cmp(&phases[b].rem_euclid(TAU)));
    let p = |i: usize| phases[order[i]].rem_euclid(TAU);
    let mut groups: Vec<Vec<usize>> = vec![vec![order[0]]];
    for i in 1..n {
        if p(i) - p(i - 1) <= tol {
            groups.last_mut().unwrap().push(order[i]);
        } else {
            groups.push(vec![order[i]]);
        }
    }
    if groups.len() > 1 && p(0) + TAU - p(n - 1) <= tol {
        let last = groups.pop().unwrap();
        groups[0].splice(0..0, last);
    }
    let clusters = groups
        .into_iter()
        .map(|members| {
            let z: c64 = members.iter().map(|&i| c64::cis(phases[i])).sum();
            Cluster { mean_phase: z.arg().rem_euclid(TAU), members }
        })
        .collect();
    Ok(DegeneracyReport { clusters, tolerance: tol })
}

/// index,phase,cluster_id
pub fn eigenphase_csv(dec: &EigenDecomposition, report: &DegeneracyReport) -> String {
    let labels = report.labels(dec.dim());
    let mut out = String::from("index,phase,cluster_id\n");
    for (i, p) in dec.phases.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_num(*p), labels[i]));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Projection {
    /// Normalized projection, absent when it vanishes.
    pub state: Option<TorusState>,
    /// Squared norm of the projection relative to ‖ψ‖².
    pub overlap: f64,
    pub phase: f64,
    pub members: Vec<usize>,
    /// Set when the overlap is below one half.
    pub weak: bool,
}

/// Project onto the eigenvectors whose phase lies within `tol` of `phase`.
pub fn project_onto_phase(dec: &EigenDecomposition, psi: &[c64], phase: f64, tol: f64) -> Projection {
    let members: Vec<usize> = (0..dec.dim())
        .filter(|&i| circular_distance(dec.phases[i], phase) <= tol)
        .collect();
    project_members(dec, psi, phase, members)
}

fn project_members(dec: &EigenDecomposition, psi: &[c64], phase: f64, members: Vec<usize>) -> Projection {
    let n = dec.dim();
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let mut proj = vec![c64::new(0.0, 0.0); n];
    let mut weight = 0.0;
    for &k in &members {
        let col = dec.vectors.col(k);
        let c: c64 = (0..n).map(|i| col[i].conj() * psi[i]).sum();
        weight += c.norm_sqr();
        for (i, p) in proj.iter_mut().enumerate() {
            *p += c * col[i];
        }
    }
    let overlap = if total > 0.0 { weight / total } else { 0.0 };
    let state = TorusState::normalized(proj).ok();
    Projection { state, overlap, phase, members, weak: overlap < 0.5 }
}

/// Project ψ onto the degeneracy cluster that carries most of its weight.
pub fn project_degenerate(dec: &EigenDecomposition, psi: &[c64], tol: f64) -> Result<Projection> {
    let report = degeneracy_clusters(&dec.phases, tol)?;
    let n = dec.dim();
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            let col = dec.vectors.col(k);
            (0..n).map(|i| col[i].conj() * psi[i]).sum::<c64>().norm_sqr()
        })
        .collect();
    let best = report
        .clusters
        .iter()
        .max_by(|a, b| {
            let wa: f64 = a.members.iter().map(|&i| coeffs[i]).sum();
            let wb: f64 = b.members.iter().map(|&i| coeffs[i]).sum();
            wa.total_cmp(&wb)
        })
        .ok_or_else(|| Error::InvalidArgument("empty decomposition".into()))?;
    Ok(project_members(dec, psi, best.mean_phase, best.members.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_around_zero() {
        let r = degeneracy_clusters(&[0.0, TAU - 1e-9, 1.0, 1.0 + 1e-9, 3.0], 1e-8).unwrap();
        assert_eq!(r.clusters.len(), 3);
        let labels = r.labels(5);
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[2], labels[3]);
        assert_ne!(labels[0], labels[4]);
    }

    #[test]
    fn partition_covers_all() {
        let phases: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37) % TAU).collect();
        let r = degeneracy_clusters(&phases, 0.05).unwrap();
        let mut all: Vec<usize> = r.clusters.iter().flat_map(|c| c.members.clone()).collect();
        all.sort();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }
}
