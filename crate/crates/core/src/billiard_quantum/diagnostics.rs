use serde::Serialize;

use super::domain::{DiscreteDomain, Geometry};
use super::lanczos::BilliardMode;
use crate::classical::Region;
use crate::error::{Error, Result};
use crate::io::pgm_bytes;
use crate::measures::MassReport;

/// Minimum window size for [`qe_spatial_variance`].
pub const MIN_QE_MODES: usize = 10;

/// Position-only observable: an indicator region or a weight function.
pub enum RegionObservable<'a> {
    Indicator(Region),
    Weight(Box<dyn Fn([f64; 2]) -> f64 + Send + Sync + 'a>),
}

impl RegionObservable<'_> {
    pub fn value(&self, p: [f64; 2]) -> f64 {
        match self {
            RegionObservable::Indicator(r) => {
                if r.contains(p) {
                    1.0
                } else {
                    0.0
                }
            }
            RegionObservable::Weight(f) => f(p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RegionObservable::Indicator(r) => format!("{r:?}"),
            RegionObservable::Weight(_) => "weight".to_string(),
        }
    }
}

impl From<Region> for RegionObservable<'_> {
    fn from(r: Region) -> Self {
        RegionObservable::Indicator(r)
    }
}

fn check_len(domain: &DiscreteDomain, psi: &[f64]) -> Result<()> {
    if psi.len() != domain.len() {
        return Err(Error::InvalidArgument(format!(
            "wavefunction has {} values, grid has {} interior points",
            psi.len(),
            domain.len()
        )));
    }
    Ok(())
}

/// Σ region(cell)·ψ²·h²
pub fn position_measure(domain: &DiscreteDomain, mode: &BilliardMode, region: &RegionObservable) -> Result<f64> {
    field_measure(domain, &mode.wavefunction, region)
}

/// [`position_measure`] for a bare field on the interior cells.
pub fn field_measure(domain: &DiscreteDomain, psi: &[f64], region: &RegionObservable) -> Result<f64> {
    check_len(domain, psi)?;
    let h2 = domain.h * domain.h;
    Ok((0..domain.len()).map(|k| region.value(domain.position(k)) * psi[k] * psi[k] * h2).sum())
}

/// Share of interior cells weighted by the region, i.e. the mass a uniform
/// field puts there.
pub fn area_fraction(domain: &DiscreteDomain, region: &RegionObservable) -> f64 {
    let s: f64 = (0..domain.len()).map(|k| region.value(domain.position(k))).sum();
    s / domain.len() as f64
}

fn stadium(domain: &DiscreteDomain) -> Result<crate::classical::StadiumDomain> {
    match domain.geometry {
        Geometry::Stadium(s) => Ok(s),
        Geometry::Rectangle(_) => Err(Error::Geometry("score needs a stadium grid".to_string())),
    }
}

/// Horizontal tube |y| ≤ w around the axis of the stadium.
pub fn scar_tube<'a>(domain: &DiscreteDomain, w: f64) -> Result<RegionObservable<'a>> {
    let s = stadium(domain)?;
    if !(w > 0.0 && w < 0.5 * s.radius) {
        return Err(Error::InvalidArgument(format!(
            "tube half-width must lie in (0, {}), got {w}",
            0.5 * s.radius
        )));
    }
    let edge = w + 1e-9 * domain.h;
    Ok(RegionObservable::Weight(Box::new(move |p: [f64; 2]| if p[1].abs() <= edge { 1.0 } else { 0.0 })))
}

/// Central rectangle |x| ≤ a of the stadium.
pub fn bouncing_ball_rect<'a>(domain: &DiscreteDomain) -> Result<RegionObservable<'a>> {
    let s = stadium(domain)?;
    if !(s.half_length > 0.0) {
        return Err(Error::Geometry("a circle has no bouncing-ball rectangle".to_string()));
    }
    let edge = s.half_length + 1e-9 * domain.h;
    Ok(RegionObservable::Weight(Box::new(move |p: [f64; 2]| if p[0].abs() <= edge { 1.0 } else { 0.0 })))
}

fn score(domain: &DiscreteDomain, psi: &[f64], name: &str, region: RegionObservable) -> Result<MassReport> {
    let mass = field_measure(domain, psi, &region)?;
    Ok(MassReport::new(name, mass, area_fraction(domain, &region)))
}

/// Tube mass over its uniform share. Ratios above 1 mean enhancement along
/// the horizontal periodic orbit.
pub fn scar_score(domain: &DiscreteDomain, mode: &BilliardMode, w: f64) -> Result<MassReport> {
    scar_score_field(domain, &mode.wavefunction, w)
}

pub fn scar_score_field(domain: &DiscreteDomain, psi: &[f64], w: f64) -> Result<MassReport> {
    score(domain, psi, &format!("tube |y| <= {w}"), scar_tube(domain, w)?)
}

/// Rectangle mass over its uniform share.
pub fn bouncing_ball_score(domain: &DiscreteDomain, mode: &BilliardMode) -> Result<MassReport> {
    bouncing_ball_score_field(domain, &mode.wavefunction)
}

pub fn bouncing_ball_score_field(domain: &DiscreteDomain, psi: &[f64]) -> Result<MassReport> {
    score(domain, psi, "rectangle |x| <= a", bouncing_ball_rect(domain)?)
}

/// Mean squared deviation of the region mass from its uniform share over a
/// window of modes.
pub fn qe_spatial_variance(domain: &DiscreteDomain, modes: &[BilliardMode], region: &RegionObservable) -> Result<f64> {
    if modes.len() < MIN_QE_MODES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_QE_MODES} modes, got {}",
            modes.len()
        )));
    }
    let frac = area_fraction(domain, region);
    let mut acc = 0.0;
    for m in modes {
        let d = position_measure(domain, m, region)? - frac;
        acc += d * d;
    }
    Ok(acc / modes.len() as f64)
}

/// |ψ|² on the full bounding grid, top row first, zero outside.
pub fn density_grid(domain: &DiscreteDomain, psi: &[f64]) -> Result<Vec<f64>> {
    check_len(domain, psi)?;
    let mut out = vec![0.0; domain.nx * domain.ny];
    for (k, &(ix, iy)) in domain.cells.iter().enumerate() {
        out[(domain.ny - 1 - iy) * domain.nx + ix] = psi[k] * psi[k];
    }
    Ok(out)
}

/// Binary PGM of |ψ|², max-normalized, exterior black.
pub fn mode_pgm(domain: &DiscreteDomain, mode: &BilliardMode) -> Result<Vec<u8>> {
    pgm_bytes(&density_grid(domain, &mode.wavefunction)?, domain.nx, domain.ny)
}

/// Per-mode metadata for JSONL export.
#[derive(Debug, Clone, Serialize)]
pub struct ModeRecord {
    pub index: usize,
    pub k: f64,
    pub eigenvalue: f64,
    pub residual: f64,
    pub scar_score: Option<f64>,
    pub bouncing_ball_score: Option<f64>,
}

impl ModeRecord {
    /// Scores are filled in on stadium grids with a > 0.
    pub fn new(domain: &DiscreteDomain, index: usize, mode: &BilliardMode, w: f64) -> Self {
        ModeRecord {
            index,
            k: mode.k,
            eigenvalue: mode.eigenvalue,
            residual: mode.residual,
            scar_score: scar_score(domain, mode, w).ok().map(|r| r.ratio),
            bouncing_ball_score: bouncing_ball_score(domain, mode).ok().map(|r| r.ratio),
        }
    }
}

/// Median of a nonempty sample.
pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Linear-interpolated empirical quantile, q in [0, 1].
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}
