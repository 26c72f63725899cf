use faer::c64;

use super::{quantum_period, QuantumPeriod};
use crate::classical::{CatMap, TorusPoint};
use crate::error::{Error, Result};
use crate::linalg::{inner, matvec, vec_norm};
use crate::torus::{cat_propagator, coherent_state, TorusHilbert, TorusState, UnitaryOperator};

#[derive(Debug, Clone)]
pub struct ScarredState {
    pub state: TorusState,
    pub theta: f64,
    pub t_half: usize,
    pub period: Option<QuantumPeriod>,
    /// ‖(U − e^{iθ}) ψ‖
    pub residual: f64,
}

/// Periods are searched up to this multiple of N; the order of M modulo 2N
/// never exceeds it.
const PERIOD_SEARCH_FACTOR: u64 = 6;

/// Time-averaged coherent state at the origin,
/// ψ ∝ Σ_{t=0}^{T_half−1} e^{−iθt} U^t φ₀.
pub fn scarred_state(h: TorusHilbert, map: &CatMap, t_half: usize) -> Result<ScarredState> {
    let u = cat_propagator(h, map)?;
    let period = quantum_period(h, &u, map, PERIOD_SEARCH_FACTOR * h.n as u64)?;
    scarred_state_with(h, &u, period, t_half)
}

/// As [`scarred_state`] with the propagator and period supplied. θ is the
/// allowed eigenphase nearest to the phase of ⟨φ₀, U φ₀⟩ when a period is
/// known, and 0 otherwise.
pub fn scarred_state_with(h: TorusHilbert, u: &UnitaryOperator, period: Option<QuantumPeriod>, t_half: usize) -> Result<ScarredState> {
    let theta = match &period {
        Some(qp) => {
            let phi0 = coherent_state(h, TorusPoint::ORIGIN);
            let rq = inner(&phi0.amplitudes, &matvec(u.matrix(), &phi0.amplitudes));
            qp.nearest_phase(rq.arg())
        }
        None => 0.0,
    };
    scarred_state_at(h, u, theta, t_half).map(|(state, residual)| ScarredState { state, theta, t_half, period, residual })
}

/// Forward average with an explicit θ; returns the state and its residual.
pub fn scarred_state_at(h: TorusHilbert, u: &UnitaryOperator, theta: f64, t_half: usize) -> Result<(TorusState, f64)> {
    if t_half == 0 {
        return Err(Error::InvalidArgument("T_half must be at least 1".into()));
    }
    let phi0 = coherent_state(h, TorusPoint::ORIGIN);
    let mut term = phi0.amplitudes.clone();
    let mut acc = vec![c64::new(0.0, 0.0); h.n];
    for t in 0..t_half {
        let w = c64::cis(-theta * t as f64);
        for (a, x) in acc.iter_mut().zip(&term) {
            *a += w * x;
        }
        if t + 1 < t_half {
            term = matvec(u.matrix(), &term);
        }
    }
    let norm = vec_norm(&acc);
    if norm < 1e-8 {
        return Err(Error::DegenerateConstruction(format!(
            "time average at theta = {theta} cancelled to norm {norm:.3e}"
        )));
    }
    let state = TorusState::normalized(acc)?;
    let uv = matvec(u.matrix(), &state.amplitudes);
    let e = c64::cis(theta);
    let residual = uv
        .iter()
        .zip(&state.amplitudes)
        .map(|(a, b)| (a - e * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((state, residual))
}
