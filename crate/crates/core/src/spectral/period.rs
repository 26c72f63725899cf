use std::f64::consts::TAU;

use faer::c64;
use serde::Serialize;

use crate::classical::CatMap;
use crate::error::{Error, Result};
use crate::linalg::identity;
use crate::torus::{TorusHilbert, UnitaryOperator};

/// U^P = e^{i·global_phase} I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumPeriod {
    pub p: u64,
    pub global_phase: f64,
    /// Frobenius norm of U^P − e^{i·global_phase} I, an upper bound for the
    /// operator-norm defect.
    pub defect: f64,
}

impl QuantumPeriod {
    /// The P allowed eigenphases (global_phase + 2πk)/P mod 2π.
    pub fn allowed_phases(&self) -> Vec<f64> {
        (0..self.p)
            .map(|k| ((self.global_phase + TAU * k as f64) / self.p as f64).rem_euclid(TAU))
            .collect()
    }

    /// Allowed phase nearest to `phase` on the circle.
    pub fn nearest_phase(&self, phase: f64) -> f64 {
        self.allowed_phases()
            .into_iter()
            .min_by(|a, b| circular_distance(*a, phase).total_cmp(&circular_distance(*b, phase)))
            .expect("P >= 1")
    }
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Multiplicative order of M modulo `modulus`, if at most `p_max`.
pub fn order_mod(map: &CatMap, modulus: u64, p_max: u64) -> Option<u64> {
    let q = modulus as i128;
    let m = [[map.a as i128, map.b as i128], [map.c as i128, map.d as i128]];
    let mut w = [[1i128, 0], [0, 1]];
    for p in 1..=p_max {
        w = mul_mod(&m, &w, q);
        if w == [[1 % q, 0], [0, 1 % q]] {
            return Some(p);
        }
    }
    None
}

fn mul_mod(x: &[[i128; 2]; 2], y: &[[i128; 2]; 2], q: i128) -> [[i128; 2]; 2] {
    let e = |i: usize, j: usize| (x[i][0] * y[0][j] + x[i][1] * y[1][j]).rem_euclid(q);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Smallest P ≤ p_max with U^P ∝ I, from integer arithmetic alone.
///
/// U^P T(n) U^{−P} = T(M^P n), and T(n + Nk) = (−1)^{n₁k₂ + k₁n₂ + Nk₁k₂} T(n),
/// so U^P is scalar exactly when M^P ≡ I (mod N) and that sign is +1 on both
/// basis vectors. Only M^P mod 2N is needed.
pub fn integer_period(map: &CatMap, n: usize, p_max: u64) -> Option<u64> {
    let nn = n as i128;
    let q = 2 * nn;
    let m = [[map.a as i128, map.b as i128], [map.c as i128, map.d as i128]];
    let mut w = [[1i128, 0], [0, 1]];
    for p in 1..=p_max {
        w = mul_mod(&m, &w, q);
        let dev = [[w[0][0] - 1, w[0][1]], [w[1][0], w[1][1] - 1]];
        if dev.iter().flatten().any(|&x| x.rem_euclid(nn) != 0) {
            continue;
        }
        // k = (M^P e_i − e_i)/N mod 2
        let k = |i: usize, j: usize| (dev[i][j].rem_euclid(q) / nn) as i128;
        let (k1, k2) = (k(0, 0), k(1, 0));
        let s1 = k2 + nn * k1 * k2;
        let (k1, k2) = (k(0, 1), k(1, 1));
        let s2 = k1 + nn * k1 * k2;
        if s1 % 2 == 0 && s2 % 2 == 0 {
            return Some(p);
        }
    }
    None
}

/// Tolerance on ‖U^P − e^{iφ} I‖ when certifying a period.
pub const PERIOD_TOL: f64 = 1e-8;

/// Quantum period of the propagator, certified on the operator itself.
pub fn quantum_period(h: TorusHilbert, u: &UnitaryOperator, map: &CatMap, p_max: u64) -> Result<Option<QuantumPeriod>> {
    if p_max == 0 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let Some(p) = integer_period(map, h.n, p_max) else {
        return Ok(None);
    };
    let up = u.pow(p);
    let tr: c64 = (0..h.n).map(|i| up[(i, i)]).sum();
    let global_phase = tr.arg().rem_euclid(TAU);
    let scalar = identity(h.n) * faer::Scale(c64::cis(global_phase));
    let defect = (up - scalar).norm_l2();
    if !(defect < PERIOD_TOL) {
        return Err(Error::numerical(format!("U^{p} is not scalar"), defect));
    }
    Ok(Some(QuantumPeriod { p, global_phase, defect }))
}
