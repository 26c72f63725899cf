use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::domain::Laplacian;
use super::factor::{ShiftedFactor, SymbolicFactor};
use crate::error::{Error, Result};

/// Discrete Dirichlet eigenpair, −Δ_h ψ = k² ψ.
#[derive(Debug, Clone, Serialize)]
pub struct BilliardMode {
    pub eigenvalue: f64,
    pub k: f64,
    pub hbar: f64,
    /// Values on the interior cells, normalized so that Σ ψ² h² = 1.
    pub wavefunction: Vec<f64>,
    /// ‖Δ_h ψ + k²ψ‖ / ‖ψ‖
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Required eigen-residual.
    pub tol: f64,
    /// Target number of eigenvalues per shift.
    pub slice_size: usize,
    /// Fresh Lanczos starts allowed per slice.
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 5e-9, slice_size: 20, max_restarts: 12, seed: 0x5eed }
    }
}

pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Solves less accurate than this indicate pivot growth at the shift.
const MAX_BACKWARD_ERROR: f64 = 1e-14;

/// Largest k·h for which the five-point scheme is trusted.
pub const MAX_KH: f64 = 0.5;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(x: &mut [f64], s: f64) {
    x.iter_mut().for_each(|v| *v *= s);
}

/// Two passes of classical Gram–Schmidt against an orthonormal set.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    if basis.is_empty() {
        return;
    }
    for _ in 0..2 {
        let c: Vec<f64> = basis.par_iter().map(|v| dot(v, w)).collect();
        for (v, ci) in basis.iter().zip(c) {
            axpy(-ci, v, w);
        }
    }
}

/// Ascending eigenpairs of a small dense symmetric matrix.
fn small_eigen(h: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::numerical("projected eigenproblem", f64::NAN))?;
    let s = eig.S().column_vector();
    let vals = (0..h.nrows()).map(|i| s[i]).collect();
    Ok((vals, eig.U().to_owned()))
}

/// Shift-invert Lanczos eigensolver over a fixed Laplacian. The symbolic
/// factorization is computed once and reused for every shift.
pub struct Solver<'a> {
    lap: &'a Laplacian,
    symbolic: SymbolicFactor,
    opts: SolverOptions,
}

struct Pair {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
}

impl<'a> Solver<'a> {
    pub fn new(lap: &'a Laplacian, opts: SolverOptions) -> Result<Self> {
        Ok(Solver { lap, symbolic: SymbolicFactor::new(lap)?, opts })
    }

    pub fn laplacian(&self) -> &Laplacian {
        self.lap
    }

    fn factor(&self, sigma: f64) -> Result<ShiftedFactor<'_>> {
        let mut last = None;
        for attempt in 0..4 {
            let s = sigma * (1.0 + 1e-9 * attempt as f64);
            match ShiftedFactor::new(self.lap, &self.symbolic, s) {
                Ok(f) => return Ok(f),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// Factorization at a shift inside [a, b]. The midpoint is tried first;
    /// shifts whose unpivoted LDLᵀ shows pivot growth are skipped.
    fn slice_factor(&self, a: f64, b: f64) -> Result<ShiftedFactor<'_>> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut best: Option<(f64, ShiftedFactor<'_>)> = None;
        for off in [0.0, 0.11, -0.13, 0.23, -0.27, 0.37, -0.41] {
            let f = self.factor(mid + off * half)?;
            let err = f.backward_error(self.lap);
            if err < MAX_BACKWARD_ERROR {
                return Ok(f);
            }
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, f));
            }
        }
        Ok(best.expect("several shifts tried").1)
    }

    /// Number of discrete eigenvalues below `lambda`.
    pub fn count_below(&self, lambda: f64) -> Result<usize> {
        Ok(self.factor(lambda)?.negatives)
    }

    /// Discrete counting function N(k) = #{k_n < k}.
    pub fn counting_function(&self, k: f64) -> Result<usize> {
        self.count_below(k * k)
    }

    fn check_kh(&self, k: f64) -> Result<()> {
        let kh = k * self.lap.domain.h;
        if !(kh < MAX_KH) {
            return Err(Error::InvalidArgument(format!(
                "k·h = {kh:.3} exceeds {MAX_KH}; refine the grid"
            )));
        }
        Ok(())
    }

    /// All modes with k_lo ≤ k ≤ k_hi, ascending.
    pub fn window(&self, k_lo: f64, k_hi: f64) -> Result<Vec<BilliardMode>> {
        if !(k_lo >= 0.0 && k_hi > k_lo) {
            return Err(Error::InvalidArgument(format!("empty window [{k_lo}, {k_hi}]")));
        }
        self.check_kh(k_hi)?;
        self.interval(k_lo * k_lo, k_hi * k_hi)
    }

    /// The `count` modes whose frequencies are nearest `target_k`, sorted by
    /// |k − target_k|.
    pub fn near(&self, target_k: f64, count: usize) -> Result<Vec<BilliardMode>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if !(target_k > 0.0) {
            return Err(Error::InvalidArgument(format!("target frequency must be positive, got {target_k}")));
        }
        let area = self.lap.domain.geometry.area();
        let density = area / (4.0 * std::f64::consts::PI);
        // grow a k-interval around the target until it holds enough modes
        let mut dk = (count as f64 / (2.0 * density * target_k)).max(0.05) * 1.5;
        let (lo, hi) = loop {
            let lo = (target_k - dk).max(0.0);
            let hi = target_k + dk;
            self.check_kh(hi)?;
            let c = self.count_below(hi * hi)? - self.count_below(lo * lo)?;
            if c >= count && (lo > 0.0 || self.count_below(hi * hi)? >= count) {
                break (lo, hi);
            }
            dk *= 2.0;
            if dk > 10.0 * target_k + 10.0 {
                return Err(Error::numerical(
                    format!("could not bracket {count} modes near k = {target_k}"),
                    f64::NAN,
                ));
            }
        };
        let mut modes = self.interval(lo * lo, hi * hi)?;
        modes.sort_by(|a, b| (a.k - target_k).abs().total_cmp(&(b.k - target_k).abs()));
        modes.truncate(count);
        Ok(modes)
    }

    /// All eigenpairs with eigenvalue in [lo, hi], ascending.
    pub fn interval(&self, lo: f64, hi: f64) -> Result<Vec<BilliardMode>> {
        let c_lo = self.count_below(lo)?;
        let c_hi = self.count_below(hi)?;
        if c_hi < c_lo {
            return Err(Error::numerical("inertia counts are not monotone", (c_lo - c_hi) as f64));
        }
        let total = c_hi - c_lo;
        if total == 0 {
            return Ok(Vec::new());
        }
        let slices = self.slices(lo, hi, c_lo, c_hi)?;
        let parts: Vec<Vec<Vec<f64>>> = slices
            .par_iter()
            .enumerate()
            .map(|(i, &(a, b, expected))| self.solve_slice(a, b, expected, i as u64))
            .collect::<Result<_>>()?;
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(total);
        for v in parts.into_iter().flatten() {
            basis.push(v);
        }
        let pairs = self.rayleigh_ritz(basis)?;
        let pairs: Vec<Pair> = pairs.into_iter().filter(|p| p.value >= lo && p.value <= hi).collect();
        if pairs.len() != total {
            return Err(Error::numerical(
                format!("found {} eigenpairs in [{lo}, {hi}], inertia says {total}", pairs.len()),
                f64::NAN,
            ));
        }
        let worst = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        if !(worst < RESIDUAL_LIMIT) {
            return Err(Error::numerical(format!("eigen-residual in [{lo}, {hi}]"), worst));
        }
        Ok(pairs.into_iter().map(|p| self.to_mode(p)).collect())
    }

    fn to_mode(&self, p: Pair) -> BilliardMode {
        let h = self.lap.domain.h;
        let mut psi = p.vector;
        let nrm = norm(&psi) * h;
        let big = psi.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        scale(&mut psi, big.signum() / nrm);
        let k = p.value.sqrt();
        BilliardMode { eigenvalue: p.value, k, hbar: 1.0 / k, wavefunction: psi, residual: p.residual }
    }

    /// Splits [lo, hi] into pieces holding at most about `slice_size`
    /// eigenvalues each, using inertia counts at the cut points.
    fn slices(&self, lo: f64, hi: f64, c_lo: usize, c_hi: usize) -> Result<Vec<(f64, f64, usize)>> {
        let total = c_hi - c_lo;
        let size = self.opts.slice_size.max(1);
        if total <= size {
            return Ok(vec![(lo, hi, total)]);
        }
        let pieces = total.div_ceil(size);
        let mut cuts = vec![(lo, c_lo)];
        for i in 1..pieces {
            let x = lo + (hi - lo) * i as f64 / pieces as f64;
            cuts.push((x, self.count_below(x)?));
        }
        cuts.push((hi, c_hi));
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (a, ca) = w[0];
            let (b, cb) = w[1];
            if cb - ca > 2 * size && b - a > 1e-9 * b.abs() {
                out.extend(self.slices(a, b, ca, cb)?);
            } else if cb > ca {
                out.push((a, b, cb - ca));
            }
        }
        Ok(out)
    }

    /// Finds the `expected` eigenvectors with eigenvalues in [a, b] using a
    /// shift at the midpoint, restarting from fresh random vectors deflated
    /// against the converged ones until the inertia count is met.
    fn solve_slice(&self, a: f64, b: f64, expected: usize, salt: u64) -> Result<Vec<Vec<f64>>> {
        let fac = self.slice_factor(a, b)?;
        let mid = fac.sigma;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut locked: Vec<Pair> = Vec::new();
        let mut restarts = 0;
        while locked.len() < expected {
            if restarts > self.opts.max_restarts {
                let worst = locked.iter().map(|p| p.residual).fold(0.0, f64::max);
                return Err(Error::numerical(
                    format!(
                        "Lanczos at shift {mid:.6}: {} of {expected} eigenpairs in [{a:.6}, {b:.6}] after {restarts} starts",
                        locked.len()
                    ),
                    worst,
                ));
            }
            restarts += 1;
            let basis: Vec<Vec<f64>> = locked.iter().map(|p| p.vector.clone()).collect();
            let cand = self.lanczos(&fac, a, b, &basis, expected - locked.len(), &mut rng)?;
            if cand.is_empty() {
                continue;
            }
            locked = self.polish(&fac, a, b, locked, cand)?;
        }
        if locked.len() > expected {
            return Err(Error::numerical(
                format!("{} eigenpairs in [{a}, {b}] but inertia counts {expected}", locked.len()),
                f64::NAN,
            ));
        }
        Ok(locked.into_iter().map(|p| p.vector).collect())
    }

    /// One Lanczos run on (A − σI)⁻¹ with full reorthogonalization, kept
    /// orthogonal to `deflate`. Returns Ritz vectors whose values fall in
    /// [a, b] and look converged.
    fn lanczos(
        &self,
        fac: &ShiftedFactor<'_>,
        a: f64,
        b: f64,
        deflate: &[Vec<f64>],
        need: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec<f64>>> {
        let n = self.lap.dim();
        let room = n.saturating_sub(deflate.len());
        if room == 0 {
            return Ok(Vec::new());
        }
        let m_max = (3 * need + 60).min(room);
        let sigma = fac.sigma;
        let tol = self.opts.tol;
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut v, deflate);
        let nv = norm(&v);
        if nv == 0.0 {
            return Ok(Vec::new());
        }
        scale(&mut v, 1.0 / nv);
        let mut basis = vec![v];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let accept = |theta: f64| {
            let lam = sigma + 1.0 / theta;
            lam >= a && lam <= b
        };
        loop {
            let j = basis.len() - 1;
            let mut w = basis[j].clone();
            fac.solve_in_place(&mut w);
            orthogonalize(&mut w, deflate);
            let al = dot(&w, &basis[j]);
            axpy(-al, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, &basis);
            let be = norm(&w);
            alpha.push(al);
            let m = alpha.len();
            let exhausted = be <= 1e-12 * al.abs().max(1e-300) || m >= m_max;
            if exhausted || (m >= need && m % 5 == 0) {
                let t = Mat::<f64>::from_fn(m, m, |r, c| {
                    if r == c {
                        alpha[r]
                    } else if r == c + 1 {
                        beta[c]
                    } else if c == r + 1 {
                        beta[r]
                    } else {
                        0.0
                    }
                });
                let (theta, s) = small_eigen(&t)?;
                // ‖(A − λ)x‖ ≈ |β s_m| / θ² for a Ritz pair of the inverse
                let est = |i: usize| (be * s[(m - 1, i)]).abs() / (theta[i] * theta[i]);
                let conv: Vec<usize> = (0..m).filter(|&i| accept(theta[i]) && est(i) <= tol).collect();
                if exhausted || conv.len() >= need {
                    let picks: Vec<usize> = (0..m)
                        .filter(|&i| accept(theta[i]) && est(i) <= 1e-3 * (1.0 + sigma.abs()))
                        .collect();
                    return Ok(picks
                        .into_par_iter()
                        .map(|i| {
                            let mut x = vec![0.0; n];
                            for (r, q) in basis.iter().enumerate().take(m) {
                                axpy(s[(r, i)], q, &mut x);
                            }
                            x
                        })
                        .collect());
                }
            }
            beta.push(be);
            scale(&mut w, 1.0 / be);
            basis.push(w);
        }
    }

    /// Inverse iteration on the candidates followed by Rayleigh–Ritz over the
    /// locked and candidate vectors together. Keeps pairs in [a, b] that meet
    /// the residual tolerance.
    fn polish(&self, fac: &ShiftedFactor<'_>, a: f64, b: f64, locked: Vec<Pair>, cand: Vec<Vec<f64>>) -> Result<Vec<Pair>> {
        let mut vecs: Vec<Vec<f64>> = locked.into_iter().map(|p| p.vector).collect();
        vecs.extend(cand);
        let mut pairs = Vec::new();
        for _ in 0..3 {
            let iterated: Vec<Vec<f64>> = vecs
                .into_par_iter()
                .map(|mut x| {
                    fac.solve_in_place(&mut x);
                    x
                })
                .collect();
            pairs = self.rayleigh_ritz(iterated)?;
            pairs.retain(|p| p.value >= a && p.value <= b);
            if pairs.iter().all(|p| p.residual < self.opts.tol) {
                return Ok(pairs);
            }
            vecs = pairs.iter().map(|p| p.vector.clone()).collect();
        }
        pairs.retain(|p| p.residual < self.opts.tol);
        Ok(pairs)
    }

    /// Orthonormalizes `vecs` (dropping dependent ones) and diagonalizes A
    /// in their span. Ritz vectors come back unit-norm in the plain l² sense.
    fn rayleigh_ritz(&self, vecs: Vec<Vec<f64>>) -> Result<Vec<Pair>> {
        let n = self.lap.dim();
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(vecs.len());
        for mut v in vecs {
            let before = norm(&v);
            orthogonalize(&mut v, &q);
            let after = norm(&v);
            if after > 1e-8 * before && after > 0.0 {
                scale(&mut v, 1.0 / after);
                q.push(v);
            }
        }
        let m = q.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let aq: Vec<Vec<f64>> = q
            .par_iter()
            .map(|v| {
                let mut y = vec![0.0; n];
                self.lap.apply(v, &mut y);
                y
            })
            .collect();
        let mut hm = Mat::<f64>::zeros(m, m);
        for r in 0..m {
            for c in 0..=r {
                let x = 0.5 * (dot(&q[r], &aq[c]) + dot(&q[c], &aq[r]));
                hm[(r, c)] = x;
                hm[(c, r)] = x;
            }
        }
        let (vals, z) = small_eigen(&hm)?;
        Ok((0..m)
            .into_par_iter()
            .map(|i| {
                let mut x = vec![0.0; n];
                let mut ax = vec![0.0; n];
                for r in 0..m {
                    axpy(z[(r, i)], &q[r], &mut x);
                    axpy(z[(r, i)], &aq[r], &mut ax);
                }
                axpy(-vals[i], &x, &mut ax);
                let residual = norm(&ax) / norm(&x);
                Pair { value: vals[i], vector: x, residual }
            })
            .collect())
    }
}

/// Modes nearest `target_k` with default solver settings.
pub fn eigenmodes_near(lap: &Laplacian, target_k: f64, count: usize) -> Result<Vec<BilliardMode>> {
    Solver::new(lap, SolverOptions::default())?.near(target_k, count)
}

/// All modes with k in [k_lo, k_hi] with default solver settings.
pub fn solve_window(lap: &Laplacian, k_lo: f64, k_hi: f64) -> Result<Vec<BilliardMode>> {
    Solver::new(lap, SolverOptions::default())?.window(k_lo, k_hi)
}

/// Largest |⟨ψ_i, ψ_j⟩_h − δ_ij| over a set of modes on one grid.
pub fn gram_defect(modes: &[BilliardMode], h: f64) -> f64 {
    let h2 = h * h;
    let mut worst = 0.0f64;
    for i in 0..modes.len() {
        for j in 0..=i {
            let g = dot(&modes[i].wavefunction, &modes[j].wavefunction) * h2;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Leading Weyl term Area·k²/4π.
pub fn weyl_estimate(area: f64, k: f64) -> f64 {
    area * k * k / (4.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard_quantum::{build_laplacian, build_laplacian_on, Geometry, Rectangle};
    use crate::classical::StadiumDomain;

    #[test]
    fn unit_square_low_modes() {
        let n = 39;
        let h = 1.0 / (n + 1) as f64;
        let lap = build_laplacian_on(Geometry::Rectangle(Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }), h).unwrap();
        assert_eq!(lap.dim(), n * n);
        let solver = Solver::new(&lap, SolverOptions::default()).unwrap();
        let modes = solver.interval(1.0, 200.0).unwrap();
        let mut exact: Vec<f64> = Vec::new();
        for p in 1..=n {
            for q in 1..=n {
                let pi = std::f64::consts::PI;
                let l = (2.0 / (h * h)) * (2.0 - (pi * p as f64 * h).cos() - (pi * q as f64 * h).cos());
                if l <= 200.0 {
                    exact.push(l);
                }
            }
        }
        exact.sort_by(f64::total_cmp);
        assert_eq!(modes.len(), exact.len());
        for (m, e) in modes.iter().zip(&exact) {
            assert!((m.eigenvalue - e).abs() < 1e-9 * e, "{} vs {}", m.eigenvalue, e);
            assert!(m.residual < RESIDUAL_LIMIT);
        }
        assert!(gram_defect(&modes, h) < 1e-8);
    }

    #[test]
    fn circle_ground_state() {
        let lap = build_laplacian(&StadiumDomain::circle(1.0), 0.02).unwrap();
        let modes = eigenmodes_near(&lap, 2.4, 1).unwrap();
        assert_eq!(modes.len(), 1);
        assert!((modes[0].k - 2.404825557695773).abs() < 0.01);
        let h2 = 0.02 * 0.02;
        let mass: f64 = modes[0].wavefunction.iter().map(|v| v * v * h2).sum();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_under_resolved_targets() {
        let lap = build_laplacian(&StadiumDomain::circle(1.0), 0.02).unwrap();
        assert!(matches!(eigenmodes_near(&lap, 30.0, 1), Err(Error::InvalidArgument(_))));
    }
}
