//! Small dense helpers on top of faer.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

/// Largest singular value.
pub fn op_norm(a: MatRef<'_, c64>) -> Result<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0.0);
    }
    let s = a
        .singular_values()
        .map_err(|_| Error::numerical("singular values", f64::NAN))?;
    Ok(s.into_iter().fold(0.0, f64::max))
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

/// ‖U†U − I‖ in operator norm.
pub fn unitarity_defect(u: MatRef<'_, c64>) -> Result<f64> {
    let g = u.adjoint() * u;
    op_norm((g - identity(u.nrows())).as_ref())
}

/// Largest entry of |A − A†|.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A^p by repeated squaring.
pub fn mat_pow(a: MatRef<'_, c64>, p: u64) -> Mat<c64> {
    let mut result = identity(a.nrows());
    let mut base = a.to_owned();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn vec_norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨u, v⟩, antilinear in the first slot.
pub fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn matvec(a: MatRef<'_, c64>, v: &[c64]) -> Vec<c64> {
    let mut out = vec![c64::new(0.0, 0.0); a.nrows()];
    for j in 0..a.ncols() {
        let x = v[j];
        if x == c64::new(0.0, 0.0) {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * x;
        }
    }
    out
}

/// Table of e^{iπk/N} for k = 0..2N, so that integer phase exponents can be
/// reduced exactly before any floating point enters.
#[derive(Debug, Clone)]
pub(crate) struct PhaseTable {
    n2: i64,
    table: Vec<c64>,
}

impl PhaseTable {
    pub(crate) fn new(n: usize) -> Self {
        let n2 = 2 * n as i64;
        let table = (0..n2)
            .map(|k| c64::cis(std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        PhaseTable { n2, table }
    }

    /// e^{iπk/N}
    #[inline]
    pub(crate) fn get(&self, k: i64) -> c64 {
        self.table[k.rem_euclid(self.n2) as usize]
    }

    #[inline]
    pub(crate) fn get_i128(&self, k: i128) -> c64 {
        self.table[k.rem_euclid(self.n2 as i128) as usize]
    }
}
