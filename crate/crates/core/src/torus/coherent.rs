use faer::c64;

use super::{TorusHilbert, TorusState};
use crate::classical::TorusPoint;

/// Gaussian terms below e^{−37} ≈ 1e−16 are dropped.
const TAIL: f64 = 37.0;

/// Periodized Gaussian centred at (x₀, ξ₀):
/// ψ_j ∝ Σ_m exp(−πN (j/N − x₀ − m)²) exp(2πi N ξ₀ (j/N − m)).
pub fn coherent_state(h: TorusHilbert, center: TorusPoint) -> TorusState {
    let n = h.n as f64;
    let reach = (TAIL / (std::f64::consts::PI * n)).sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    let mut amps = Vec::with_capacity(h.n);
    for j in 0..h.n {
        let u = j as f64 / n - center.x;
        let lo = (u - reach).ceil() as i64;
        let hi = (u + reach).floor() as i64;
        let mut acc = c64::new(0.0, 0.0);
        for m in lo..=hi {
            let d = u - m as f64;
            let g = (-std::f64::consts::PI * n * d * d).exp();
            // N ξ₀ (j/N − m) reduced mod 1 before forming the phase
            let ph = (center.xi * (j as f64 - n * m as f64)).rem_euclid(1.0);
            acc += c64::cis(tau * ph) * g;
        }
        amps.push(acc);
    }
    TorusState::normalized(amps).expect("Gaussian sum always has positive norm")
}
