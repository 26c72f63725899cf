use std::collections::BTreeMap;

use faer::{c64, Mat};

use super::{TorusHilbert, TranslationTable};
use crate::classical::Mat2;
use crate::error::{Error, Result};

/// A(x, ξ) = Σ_m c_m e^{2πi(m₁x + m₂ξ)} with c_{−m} = conj(c_m).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigObservable {
    coefficients: BTreeMap<(i64, i64), c64>,
}

const REALITY_TOL: f64 = 1e-12;

impl TrigObservable {
    /// Validates the reality condition.
    pub fn new(coefficients: BTreeMap<(i64, i64), c64>) -> Result<Self> {
        let zero = c64::new(0.0, 0.0);
        for (&(m1, m2), &c) in &coefficients {
            let partner = coefficients.get(&(-m1, -m2)).copied().unwrap_or(zero);
            if (partner - c.conj()).norm() > REALITY_TOL * c.norm().max(1.0) {
                return Err(Error::InvalidObservable(format!(
                    "coefficient at ({m1},{m2}) is {c} but at ({},{}) is {partner}",
                    -m1, -m2
                )));
            }
        }
        Ok(TrigObservable { coefficients })
    }

    pub fn constant(c: f64) -> Self {
        let mut m = BTreeMap::new();
        m.insert((0, 0), c64::new(c, 0.0));
        TrigObservable { coefficients: m }
    }

    /// amp·cos(2π m·v)
    pub fn cos_mode(m: (i64, i64), amp: f64) -> Self {
        let mut out = TrigObservable::default();
        if m == (0, 0) {
            return TrigObservable::constant(amp);
        }
        *out.coefficients.entry(m).or_default() += c64::new(amp / 2.0, 0.0);
        *out.coefficients.entry((-m.0, -m.1)).or_default() += c64::new(amp / 2.0, 0.0);
        out
    }

    /// amp·sin(2π m·v)
    pub fn sin_mode(m: (i64, i64), amp: f64) -> Self {
        let mut out = TrigObservable::default();
        if m == (0, 0) {
            return out;
        }
        *out.coefficients.entry(m).or_default() += c64::new(0.0, -amp / 2.0);
        *out.coefficients.entry((-m.0, -m.1)).or_default() += c64::new(0.0, amp / 2.0);
        out
    }

    pub fn coefficients(&self) -> &BTreeMap<(i64, i64), c64> {
        &self.coefficients
    }

    pub fn coefficient(&self, m: (i64, i64)) -> c64 {
        self.coefficients.get(&m).copied().unwrap_or_default()
    }

    /// Phase-space average, the zero mode.
    pub fn mean(&self) -> f64 {
        self.coefficient((0, 0)).re
    }

    pub fn max_frequency(&self) -> i64 {
        self.coefficients.keys().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: f64, xi: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        self.coefficients
            .iter()
            .map(|(&(m1, m2), c)| (c * c64::cis(tau * (m1 as f64 * x + m2 as f64 * xi))).re)
            .sum()
    }

    pub fn add(&self, other: &TrigObservable) -> TrigObservable {
        let mut out = self.clone();
        for (&m, &c) in &other.coefficients {
            *out.coefficients.entry(m).or_default() += c;
        }
        out
    }

    pub fn scale(&self, s: f64) -> TrigObservable {
        TrigObservable {
            coefficients: self.coefficients.iter().map(|(&m, &c)| (m, c * s)).collect(),
        }
    }

    /// A ∘ M for a linear map: coefficient c_m moves to frequency Mᵀm.
    pub fn compose_linear(&self, m: &Mat2) -> TrigObservable {
        let mut out = TrigObservable::default();
        for (&(m1, m2), &c) in &self.coefficients {
            let k = (m[0][0] * m1 + m[1][0] * m2, m[0][1] * m1 + m[1][1] * m2);
            *out.coefficients.entry(k).or_default() += c;
        }
        out
    }
}

/// Translation index quantizing the Fourier mode e^{2πi m·v}: the mode with
/// frequency (m₁, m₂) is the translation by (−m₂, m₁)/N.
pub fn frequency_to_translation(m: (i64, i64)) -> (i64, i64) {
    (-m.1, m.0)
}

/// Op_N(A) = Σ_m c_m T(J m) as a dense Hermitian matrix.
pub fn weyl_quantize(h: TorusHilbert, a: &TrigObservable) -> Result<Mat<c64>> {
    let a = TrigObservable::new(a.coefficients.clone())?;
    let table = TranslationTable::new(h);
    let mut out = Mat::zeros(h.n, h.n);
    for (&m, &c) in a.coefficients() {
        table.add_to_matrix(frequency_to_translation(m), c, &mut out);
    }
    Ok(out)
}

/// Op_N(A)ψ without forming the matrix.
pub fn apply_weyl(table: &TranslationTable, a: &TrigObservable, psi: &[c64]) -> Vec<c64> {
    let mut out = vec![c64::new(0.0, 0.0); table.dim()];
    for (&m, &c) in a.coefficients() {
        table.apply_add(frequency_to_translation(m), c, psi, &mut out);
    }
    out
}
