use faer::{c64, Mat};

use super::TorusHilbert;
use crate::linalg::PhaseTable;

/// Phase-space translation by n/N:
/// (T(n)ψ)_j = e^{−iπ n₁n₂/N} e^{2πi n₂ j/N} ψ_{(j−n₁) mod N}.
///
/// These satisfy T(n)† = T(−n) and T(m)T(n) = e^{−iπσ(m,n)/N} T(m+n)
/// with σ(m,n) = m₁n₂ − m₂n₁.
pub fn translation_op(h: TorusHilbert, n: (i64, i64)) -> Mat<c64> {
    TranslationTable::new(h).matrix(n)
}

pub fn apply_translation(h: TorusHilbert, n: (i64, i64), psi: &[c64]) -> Vec<c64> {
    let t = TranslationTable::new(h);
    let mut out = vec![c64::new(0.0, 0.0); h.n];
    t.apply_add(n, c64::new(1.0, 0.0), psi, &mut out);
    out
}

/// Precomputed phases for repeated translation work at a fixed N.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    n: usize,
    phases: PhaseTable,
}

impl TranslationTable {
    pub fn new(h: TorusHilbert) -> Self {
        TranslationTable { n: h.n, phases: PhaseTable::new(h.n) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn reduce(&self, n: (i64, i64)) -> (i64, i64) {
        let m = 2 * self.n as i64;
        (n.0.rem_euclid(m), n.1.rem_euclid(m))
    }

    /// out += c · T(n) ψ
    pub fn apply_add(&self, n: (i64, i64), c: c64, psi: &[c64], out: &mut [c64]) {
        let nn = self.n as i64;
        let (n1, n2) = self.reduce(n);
        let base = -n1 * n2;
        for (j, o) in out.iter_mut().enumerate() {
            let src = (j as i64 - n1).rem_euclid(nn) as usize;
            let k = base + 2 * n2 * j as i64;
            *o += c * self.phases.get(k) * psi[src];
        }
    }

    /// ⟨ψ, T(n) ψ⟩
    pub fn expectation(&self, n: (i64, i64), psi: &[c64]) -> c64 {
        let nn = self.n as i64;
        let (n1, n2) = self.reduce(n);
        let base = -n1 * n2;
        let mut acc = c64::new(0.0, 0.0);
        for (j, pj) in psi.iter().enumerate() {
            let src = (j as i64 - n1).rem_euclid(nn) as usize;
            acc += pj.conj() * self.phases.get(base + 2 * n2 * j as i64) * psi[src];
        }
        acc
    }

    /// Add c·T(n) into a dense matrix.
    pub fn add_to_matrix(&self, n: (i64, i64), c: c64, m: &mut Mat<c64>) {
        let nn = self.n as i64;
        let (n1, n2) = self.reduce(n);
        let base = -n1 * n2;
        for j in 0..self.n {
            let row = (j as i64 + n1).rem_euclid(nn);
            m[(row as usize, j)] += c * self.phases.get(base + 2 * n2 * row);
        }
    }

    pub fn matrix(&self, n: (i64, i64)) -> Mat<c64> {
        let mut m = Mat::zeros(self.n, self.n);
        self.add_to_matrix(n, c64::new(1.0, 0.0), &mut m);
        m
    }

    /// T(n)·X for a dense X, row permutation plus phases.
    pub fn left_apply(&self, n: (i64, i64), x: &Mat<c64>) -> Mat<c64> {
        let nn = self.n as i64;
        let (n1, n2) = self.reduce(n);
        let base = -n1 * n2;
        let mut out = Mat::zeros(self.n, x.ncols());
        for row in 0..self.n {
            let src = (row as i64 - n1).rem_euclid(nn) as usize;
            let ph = self.phases.get(base + 2 * n2 * row as i64);
            for col in 0..x.ncols() {
                out[(row, col)] = ph * x[(src, col)];
            }
        }
        out
    }
}
