//! Quantum mechanics on the torus at ħ_N = 1/(2πN): translations, Weyl
//! quantization of trigonometric observables, coherent states, and the
//! quantized cat map.

mod coherent;
mod observable;
mod propagator;
mod translation;

pub use coherent::coherent_state;
pub use observable::{apply_weyl, weyl_quantize, TrigObservable};
pub use propagator::{
    cat_propagator, egorov_defect, egorov_defect_powered, intertwining_defect, quantize_generator,
    theta_factorization, Generator, UnitaryOperator,
};
pub use translation::{apply_translation, translation_op, TranslationTable};

use faer::c64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::vec_norm;

/// N-dimensional Hilbert space; ħ is derived from N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorusHilbert {
    pub n: usize,
}

impl TorusHilbert {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Hilbert space dimension N must be positive".into()));
        }
        Ok(TorusHilbert { n })
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.n as f64)
    }
}

/// Amplitudes in the position basis j/N, j = 0..N−1.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusState {
    pub amplitudes: Vec<c64>,
}

impl TorusState {
    pub fn new(amplitudes: Vec<c64>) -> Self {
        TorusState { amplitudes }
    }

    /// Normalize; fails on a (numerically) zero vector.
    pub fn normalized(amplitudes: Vec<c64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::DegenerateConstruction(format!("state norm {norm:.3e}")));
        }
        Ok(TorusState { amplitudes: amplitudes.into_iter().map(|z| z / norm).collect() })
    }

    pub fn position(h: TorusHilbert, j: usize) -> Self {
        let mut a = vec![c64::new(0.0, 0.0); h.n];
        a[j % h.n] = c64::new(1.0, 0.0);
        TorusState { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        crate::io::encode_state(&self.amplitudes)
    }
}
