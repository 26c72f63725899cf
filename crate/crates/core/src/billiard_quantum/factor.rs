use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, supernodal, LdltRef, SymbolicCholesky, SymbolicCholeskyRaw,
    SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

use super::domain::Laplacian;
use crate::error::{Error, Result};

/// Fill-reducing symbolic analysis of a Laplacian, shared by every shift.
pub struct SymbolicFactor {
    sym: SymbolicCholesky<usize>,
    diag_pos: Vec<usize>,
}

impl SymbolicFactor {
    pub fn new(lap: &Laplacian) -> Result<Self> {
        let n = lap.dim();
        let pattern = SymbolicSparseColMatRef::new_checked(n, n, &lap.row_ptr, None, &lap.col_idx);
        let sym = factorize_symbolic_cholesky(pattern, Side::Lower, SymmetricOrdering::Amd, Default::default())
            .map_err(|e| Error::numerical(format!("symbolic factorization: {e:?}"), f64::NAN))?;
        let diag_pos = (0..n)
            .map(|r| {
                (lap.row_ptr[r]..lap.row_ptr[r + 1])
                    .find(|&k| lap.col_idx[k] == r)
                    .expect("stencil always has a diagonal entry")
            })
            .collect();
        Ok(SymbolicFactor { sym, diag_pos })
    }
}

/// LDLᵀ factorization of A − σI. The number of negative pivots is the
/// number of eigenvalues below σ (Sylvester's law of inertia).
pub struct ShiftedFactor<'a> {
    symbolic: &'a SymbolicFactor,
    vals: Vec<f64>,
    pub sigma: f64,
    pub negatives: usize,
    n: usize,
}

fn par() -> Par {
    if rayon::current_num_threads() > 1 {
        Par::rayon(rayon::current_num_threads())
    } else {
        Par::Seq
    }
}

impl<'a> ShiftedFactor<'a> {
    pub fn new(lap: &Laplacian, symbolic: &'a SymbolicFactor, sigma: f64) -> Result<Self> {
        let n = lap.dim();
        let mut shifted = lap.values.clone();
        for &p in &symbolic.diag_pos {
            shifted[p] -= sigma;
        }
        let pattern = SymbolicSparseColMatRef::new_checked(n, n, &lap.row_ptr, None, &lap.col_idx);
        let a = SparseColMatRef::new(pattern, &shifted);
        let sym = &symbolic.sym;
        let mut vals = vec![0.0f64; sym.len_val()];
        let mut mem = MemBuffer::new(sym.factorize_numeric_ldlt_scratch::<f64>(par(), Default::default()));
        sym.factorize_numeric_ldlt(
            &mut vals,
            a,
            Side::Lower,
            LdltRegularization::default(),
            par(),
            MemStack::new(&mut mem),
            Default::default(),
        )
        .map_err(|e| Error::numerical(format!("LDLT factorization at shift {sigma}: {e:?}"), f64::NAN))?;
        let negatives = count_negative_pivots(sym, &vals);
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical(format!("LDLT at shift {sigma} is singular"), f64::INFINITY));
        }
        Ok(ShiftedFactor { symbolic, vals, sigma, negatives, n })
    }

    /// x ← (A − σI)⁻¹ x
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let sym = &self.symbolic.sym;
        let l = LdltRef::new(sym, &self.vals);
        let mut mem = MemBuffer::new(sym.solve_in_place_scratch::<f64>(1, par()));
        let rhs = MatMut::from_column_major_slice_mut(x, self.n, 1);
        l.solve_in_place_with_conj(Conj::No, rhs, par(), MemStack::new(&mut mem));
    }
}

fn count_negative_pivots(sym: &SymbolicCholesky<usize>, vals: &[f64]) -> usize {
    let mut neg = 0;
    match sym.raw() {
        SymbolicCholeskyRaw::Simplicial(s) => {
            let cp = s.col_ptr();
            for j in 0..s.ncols() {
                if vals[cp[j]] < 0.0 {
                    neg += 1;
                }
            }
        }
        SymbolicCholeskyRaw::Supernodal(s) => {
            let r = supernodal::SupernodalLdltRef::new(s, vals);
            for k in 0..s.n_supernodes() {
                let m = r.supernode(k).val();
                for j in 0..m.ncols() {
                    if m[(j, j)] < 0.0 {
                        neg += 1;
                    }
                }
            }
        }
    }
    neg
}

/// Number of eigenvalues of −Δ_h below λ.
pub fn eigenvalue_count(lap: &Laplacian, symbolic: &SymbolicFactor, lambda: f64) -> Result<usize> {
    Ok(ShiftedFactor::new(lap, symbolic, lambda)?.negatives)
}

impl ShiftedFactor<'_> {
    /// Normwise backward error of one solve with a fixed right-hand side,
    /// ‖(A − σI)y − x‖ / (‖A − σI‖₁ ‖y‖ + ‖x‖). Large values flag pivot
    /// growth in the unpivoted factorization.
    pub fn backward_error(&self, lap: &Laplacian) -> f64 {
        let n = self.n;
        let x: Vec<f64> = (0..n).map(|i| (((i * 7919) % 101) as f64 - 50.0) / 50.0).collect();
        let mut y = x.clone();
        self.solve_in_place(&mut y);
        let mut ay = vec![0.0; n];
        lap.apply(&y, &mut ay);
        let mut r2 = 0.0;
        let mut y2 = 0.0;
        let mut x2 = 0.0;
        for i in 0..n {
            let r = ay[i] - self.sigma * y[i] - x[i];
            r2 += r * r;
            y2 += y[i] * y[i];
            x2 += x[i] * x[i];
        }
        let mut anorm = 0.0f64;
        for r in 0..n {
            let s: f64 = (lap.row_ptr[r]..lap.row_ptr[r + 1])
                .map(|k| if lap.col_idx[k] == r { (lap.values[k] - self.sigma).abs() } else { lap.values[k].abs() })
                .sum();
            anorm = anorm.max(s);
        }
        r2.sqrt() / (anorm * y2.sqrt() + x2.sqrt())
    }
}
