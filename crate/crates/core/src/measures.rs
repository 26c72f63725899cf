//! Phase-space measures of torus states: Wigner (Fourier) coefficients,
//! Husimi densities, model invariant measures and distances between them.

use std::f64::consts::TAU;

use faer::c64;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{torus_distance, CatMap, TorusPoint};
use crate::error::{Error, Result};
use crate::io::{fmt_num, pgm_bytes};
use crate::spectral::EigenDecomposition;
use crate::torus::{apply_weyl, coherent_state, TorusHilbert, TorusState, TranslationTable, TrigObservable};

/// μ_ψ(A) = ⟨ψ, Op_N(A) ψ⟩.
pub fn matrix_element(psi: &TorusState, a: &TrigObservable) -> Result<f64> {
    let a = TrigObservable::new(a.coefficients().clone())?;
    let h = TorusHilbert::new(psi.dim())?;
    let table = TranslationTable::new(h);
    Ok(matrix_element_with(&table, &psi.amplitudes, &a).re)
}

fn matrix_element_with(table: &TranslationTable, psi: &[c64], a: &TrigObservable) -> c64 {
    let op_psi = apply_weyl(table, a, psi);
    psi.iter().zip(&op_psi).map(|(x, y)| x.conj() * y).sum()
}

/// w(m) = μ_ψ(e^{2πi m·v}) for max(|m₁|, |m₂|) ≤ K.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerCoefficients {
    pub cutoff: usize,
    values: Vec<c64>,
}

impl WignerCoefficients {
    fn index(&self, m: (i64, i64)) -> Option<usize> {
        let k = self.cutoff as i64;
        if m.0.abs() > k || m.1.abs() > k {
            return None;
        }
        Some(((m.0 + k) * (2 * k + 1) + (m.1 + k)) as usize)
    }

    pub fn get(&self, m: (i64, i64)) -> Option<c64> {
        self.index(m).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), c64)> + '_ {
        let k = self.cutoff as i64;
        (-k..=k).flat_map(move |m1| (-k..=k).map(move |m2| ((m1, m2), self.get((m1, m2)).unwrap())))
    }

    /// m1,m2,re,im
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m1,m2,re,im\n");
        for ((m1, m2), z) in self.iter() {
            out.push_str(&format!("{m1},{m2},{},{}\n", fmt_num(z.re), fmt_num(z.im)));
        }
        out
    }
}

pub fn wigner_coefficients(psi: &TorusState, cutoff: usize) -> Result<WignerCoefficients> {
    let n = psi.dim();
    if 2 * cutoff >= n {
        return Err(Error::Aliasing { cutoff, n });
    }
    let table = TranslationTable::new(TorusHilbert::new(n)?);
    let k = cutoff as i64;
    let values = (-k..=k)
        .flat_map(|m1| (-k..=k).map(move |m2| (m1, m2)))
        .map(|(m1, m2)| table.expectation((-m2, m1), &psi.amplitudes))
        .collect();
    Ok(WignerCoefficients { cutoff, values })
}

/// Husimi density on the G×G grid of points (i/G, j/G), i indexing x and j
/// indexing ξ, normalized to total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub g: usize,
    /// values[i * g + j]
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn uniform(g: usize) -> Self {
        HusimiGrid { g, values: vec![1.0 / (g * g) as f64; g * g] }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.g + j]
    }

    pub fn argmax(&self) -> (usize, usize) {
        let k = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (k / self.g, k % self.g)
    }

    /// Raster with x to the right and ξ upwards.
    pub fn to_pgm(&self) -> Result<Vec<u8>> {
        let g = self.g;
        let mut raster = vec![0.0; g * g];
        for i in 0..g {
            for j in 0..g {
                raster[(g - 1 - j) * g + i] = self.at(i, j);
            }
        }
        pgm_bytes(&raster, g, g)
    }

    /// i,j,x,xi,value
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,x,xi,value\n");
        let g = self.g as f64;
        for i in 0..self.g {
            for j in 0..self.g {
                out.push_str(&format!(
                    "{i},{j},{},{},{}\n",
                    fmt_num(i as f64 / g),
                    fmt_num(j as f64 / g),
                    fmt_num(self.at(i, j))
                ));
            }
        }
        out
    }
}

/// ⌈2√N⌉
pub fn default_grid_size(n: usize) -> usize {
    (2.0 * (n as f64).sqrt()).ceil() as usize
}

pub fn husimi(psi: &TorusState, g: usize) -> Result<HusimiGrid> {
    if g < 8 {
        return Err(Error::InvalidArgument(format!("Husimi grid needs G >= 8, got {g}")));
    }
    let h = TorusHilbert::new(psi.dim())?;
    let mut values: Vec<f64> = (0..g * g)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / g, k % g);
            let c = coherent_state(h, TorusPoint::new(i as f64 / g as f64, j as f64 / g as f64));
            c.amplitudes
                .iter()
                .zip(&psi.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum::<c64>()
                .norm_sqr()
        })
        .collect();
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateConstruction("Husimi density vanishes".into()));
    }
    values.iter_mut().for_each(|v| *v /= total);
    Ok(HusimiGrid { g, values })
}

/// Mass of grid points within torus distance ε of `center`.
pub fn ball_mass(grid: &HusimiGrid, center: TorusPoint, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("ball radius must lie in (0, 0.5), got {eps}")));
    }
    let g = grid.g as f64;
    let mut mass = 0.0;
    for i in 0..grid.g {
        for j in 0..grid.g {
            if torus_distance(TorusPoint::new(i as f64 / g, j as f64 / g), center) < eps {
                mass += grid.at(i, j);
            }
        }
    }
    Ok(mass)
}

/// (1/N) Σ_n |μ_{v_n}(A) − ∫A|².
pub fn qe_variance(dec: &EigenDecomposition, a: &TrigObservable) -> Result<f64> {
    let elems = eigenbasis_matrix_elements(dec, a)?;
    let c0 = a.mean();
    Ok(elems.iter().map(|x| (x - c0).powi(2)).sum::<f64>() / elems.len() as f64)
}

/// μ_{v_n}(A) for every eigenvector.
pub fn eigenbasis_matrix_elements(dec: &EigenDecomposition, a: &TrigObservable) -> Result<Vec<f64>> {
    let a = TrigObservable::new(a.coefficients().clone())?;
    let table = TranslationTable::new(TorusHilbert::new(dec.dim())?);
    Ok((0..dec.dim())
        .into_par_iter()
        .map(|k| matrix_element_with(&table, &dec.vector(k), &a).re)
        .collect())
}

/// Invariant measures with closed-form Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ModelMeasure {
    Lebesgue,
    PeriodicOrbit(Vec<TorusPoint>),
    Mixture { alpha: f64, first: Box<ModelMeasure>, second: Box<ModelMeasure> },
}

impl ModelMeasure {
    /// Orbit measure; the points must form a single cycle of the map.
    pub fn periodic_orbit(map: &CatMap, points: Vec<TorusPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("periodic orbit needs at least one point".into()));
        }
        for p in &points {
            let image = map.apply(*p);
            if !points.iter().any(|q| torus_distance(*q, image) < 1e-9) {
                return Err(Error::InvalidArgument(format!("orbit is not closed under the map at {p:?}")));
            }
        }
        Ok(ModelMeasure::PeriodicOrbit(points))
    }

    pub fn origin() -> Self {
        ModelMeasure::PeriodicOrbit(vec![TorusPoint::ORIGIN])
    }

    pub fn mixture(alpha: f64, first: ModelMeasure, second: ModelMeasure) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("mixture weight {alpha} outside [0, 1]")));
        }
        Ok(ModelMeasure::Mixture { alpha, first: Box::new(first), second: Box::new(second) })
    }

    /// ½δ₀ + ½L
    pub fn half_scar() -> Self {
        ModelMeasure::Mixture {
            alpha: 0.5,
            first: Box::new(ModelMeasure::origin()),
            second: Box::new(ModelMeasure::Lebesgue),
        }
    }

    /// ∫ e^{2πi m·v} dμ
    pub fn fourier_coefficient(&self, m: (i64, i64)) -> c64 {
        match self {
            ModelMeasure::Lebesgue => {
                if m == (0, 0) {
                    c64::new(1.0, 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }
            ModelMeasure::PeriodicOrbit(pts) => {
                let s: c64 = pts
                    .iter()
                    .map(|p| c64::cis(TAU * (m.0 as f64 * p.x + m.1 as f64 * p.xi)))
                    .sum();
                s / pts.len() as f64
            }
            ModelMeasure::Mixture { alpha, first, second } => {
                first.fourier_coefficient(m) * *alpha + second.fourier_coefficient(m) * (1.0 - alpha)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelMeasure::Lebesgue => "lebesgue".into(),
            ModelMeasure::PeriodicOrbit(p) => format!("orbit[{}]", p.len()),
            ModelMeasure::Mixture { alpha, first, second } => {
                format!("mixture({alpha},{},{})", first.label(), second.label())
            }
        }
    }
}

/// max over 0 < max(|m₁|,|m₂|) ≤ K of |w(m) − μ̂(m)|.
pub fn weak_star_distance(w: &WignerCoefficients, model: &ModelMeasure, k: usize) -> Result<f64> {
    if k > w.cutoff {
        return Err(Error::InvalidArgument(format!("K = {k} exceeds the coefficient cutoff {}", w.cutoff)));
    }
    let k = k as i64;
    let mut worst = 0.0f64;
    for m1 in -k..=k {
        for m2 in -k..=k {
            if (m1, m2) != (0, 0) {
                let d = (w.get((m1, m2)).unwrap() - model.fourier_coefficient((m1, m2))).norm();
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub region: String,
    pub mass: f64,
    /// Mass the uniform (Liouville) measure assigns to the region.
    pub reference: f64,
    pub ratio: f64,
}

impl MassReport {
    pub fn new(region: impl Into<String>, mass: f64, reference: f64) -> Self {
        let ratio = if reference > 0.0 { mass / reference } else { f64::NAN };
        MassReport { region: region.into(), mass, reference, ratio }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_vector_coefficients() {
        let n = 16;
        let h = TorusHilbert::new(n).unwrap();
        let psi = TorusState::position(h, 3);
        let w = wigner_coefficients(&psi, 4).unwrap();
        assert!((w.get((0, 0)).unwrap() - c64::new(1.0, 0.0)).norm() < 1e-15);
        // x-only frequencies see the lattice point exactly, ξ-frequencies vanish
        assert!((w.get((1, 0)).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(w.get((0, 1)).unwrap().norm() < 1e-15);
        let a = TrigObservable::cos_mode((2, 0), 1.0);
        let x = 3.0 / n as f64;
        assert!((matrix_element(&psi, &a).unwrap() - (TAU * 2.0 * x).cos()).abs() < 1e-14);
    }

    #[test]
    fn aliasing_rejected() {
        let psi = TorusState::position(TorusHilbert::new(8).unwrap(), 0);
        assert!(matches!(wigner_coefficients(&psi, 4), Err(Error::Aliasing { .. })));
        assert!(wigner_coefficients(&psi, 3).is_ok());
    }

    #[test]
    fn uniform_ball_is_area_fraction() {
        let g = HusimiGrid::uniform(200);
        let m = ball_mass(&g, TorusPoint::new(0.3, 0.3), 0.1).unwrap();
        assert!((m - std::f64::consts::PI * 0.01).abs() < 2.0 * TAU * 0.1 / 200.0);
    }

    #[test]
    fn coherent_husimi_peaks_at_center() {
        let h = TorusHilbert::new(64).unwrap();
        let psi = coherent_state(h, TorusPoint::new(0.5, 0.5));
        let g = husimi(&psi, 64).unwrap();
        assert_eq!(g.argmax(), (32, 32));
        assert!((g.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_model_coefficients_are_one() {
        let m = ModelMeasure::origin();
        for k in [(1, 0), (3, -2), (0, 7)] {
            assert_eq!(m.fourier_coefficient(k), c64::new(1.0, 0.0));
        }
        assert_eq!(ModelMeasure::Lebesgue.fourier_coefficient((1, 1)), c64::new(0.0, 0.0));
        assert_eq!(ModelMeasure::half_scar().fourier_coefficient((2, 1)), c64::new(0.5, 0.0));
    }

    #[test]
    fn orbit_closure_checked() {
        let map = CatMap::standard();
        assert!(ModelMeasure::periodic_orbit(&map, vec![TorusPoint::new(0.5, 0.5)]).is_ok());
        assert!(ModelMeasure::periodic_orbit(&map, vec![TorusPoint::new(0.25, 0.0)]).is_err());
        assert!(ModelMeasure::mixture(1.5, ModelMeasure::Lebesgue, ModelMeasure::origin()).is_err());
    }

    #[test]
    fn constant_observable_has_zero_variance() {
        use crate::spectral::diagonalize;
        use crate::torus::cat_propagator;
        let h = TorusHilbert::new(16).unwrap();
        let dec = diagonalize(&cat_propagator(h, &CatMap::standard()).unwrap()).unwrap();
        assert!(qe_variance(&dec, &TrigObservable::constant(3.0)).unwrap() < 1e-28);
    }
}
