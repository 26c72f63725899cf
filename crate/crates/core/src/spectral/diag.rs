use std::f64::consts::TAU;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::linalg::identity;
use crate::torus::{TorusState, UnitaryOperator};

/// Eigenphases in [0, 2π), ascending, with orthonormal eigenvectors as the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub phases: Vec<f64>,
    pub vectors: Mat<c64>,
}

const RESIDUAL_TOL: f64 = 1e-10;

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn vector(&self, i: usize) -> Vec<c64> {
        self.vectors.col(i).iter().copied().collect()
    }

    pub fn state(&self, i: usize) -> TorusState {
        TorusState::new(self.vector(i))
    }

    /// Σ e^{iφ} v v†
    pub fn reconstruct(&self) -> Mat<c64> {
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, j| self.vectors[(i, j)] * c64::cis(self.phases[j]));
        scaled * self.vectors.adjoint()
    }

    /// Largest ‖U v − e^{iφ} v‖ over the basis.
    pub fn max_residual(&self, u: &UnitaryOperator) -> f64 {
        let uv = u.matrix() * &self.vectors;
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            let e = c64::cis(self.phases[j]);
            let r: f64 = (0..self.dim())
                .map(|i| (uv[(i, j)] - e * self.vectors[(i, j)]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// Largest entry of |V†V − I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        (g - identity(self.dim())).norm_max()
    }
}

/// Diagonalize a unitary through the Cayley transform of a rotated copy:
/// with the widest eigenphase gap turned to face −1, C = i(I − W)(I + W)⁻¹
/// is Hermitian and shares the eigenvectors of U, so degenerate clusters come
/// out orthonormal.
pub fn diagonalize(u: &UnitaryOperator) -> Result<EigenDecomposition> {
    let n = u.dim();
    let ev = u
        .matrix()
        .eigenvalues()
        .map_err(|_| Error::numerical("unitary eigenvalues", f64::NAN))?;
    let mut angles: Vec<f64> = ev.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let mut best = (angles[0] + TAU - angles[n - 1], n - 1);
    for i in 0..n - 1 {
        let g = angles[i + 1] - angles[i];
        if g > best.0 {
            best = (g, i);
        }
    }
    let center = angles[best.1] + best.0 / 2.0;
    let shift = c64::cis(-(center - std::f64::consts::PI));
    let w = Mat::from_fn(n, n, |i, j| u.matrix()[(i, j)] * shift);
    let id = identity(n);
    let plus = &id + &w;
    let minus = &id - &w;
    let x = plus.partial_piv_lu().solve(&minus);
    let c = Mat::from_fn(n, n, |i, j| {
        let a = c64::new(0.0, 1.0) * x[(i, j)];
        let b = (c64::new(0.0, 1.0) * x[(j, i)]).conj();
        (a + b) * 0.5
    });
    let eig = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::numerical("Hermitian eigensolver", f64::NAN))?;
    let v = eig.U();
    let uv = u.matrix() * v;
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let rq: c64 = (0..n).map(|i| v[(i, j)].conj() * uv[(i, j)]).sum();
            (rq.arg().rem_euclid(TAU), j)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phases: Vec<f64> = order.iter().map(|&(p, _)| if p >= TAU { 0.0 } else { p }).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j].1)]);
    let dec = EigenDecomposition { phases, vectors };
    let res = dec.max_residual(u);
    if !(res < RESIDUAL_TOL) {
        return Err(Error::numerical("unitary eigendecomposition residual", res));
    }
    let orth = dec.orthogonality_defect();
    if !(orth < RESIDUAL_TOL) {
        return Err(Error::numerical("unitary eigenvector orthogonality", orth));
    }
    Ok(dec)
}
