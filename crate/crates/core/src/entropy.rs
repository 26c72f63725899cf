//! Kolmogorov–Sinai entropy of cat-map invariant measures: exact values for
//! the model family and Brin–Katok estimates from weighted sample clouds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{bowen_distance_from_delta, cat_lyapunov, wrap_half, CatMap, TorusPoint};
use crate::error::{Error, Result};
use crate::io::fmt_num;
use crate::measures::{HusimiGrid, ModelMeasure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CloudSource {
    Model(String),
    Husimi { grid: usize },
    Explicit,
}

/// Weighted point sample of an invariant measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<TorusPoint>,
    pub weights: Vec<f64>,
    pub source: CloudSource,
}

/// Fewest points accepted by the estimators.
pub const MIN_CLOUD: usize = 100;

impl SampleCloud {
    /// Weights are renormalized to sum to one and points are stored in a
    /// canonical order, so estimates do not depend on how they were listed.
    pub fn new(points: Vec<TorusPoint>, weights: Vec<f64>, source: CloudSource) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "cloud has {} points and {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("cloud weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("cloud weights sum to zero".into()));
        }
        let mut pairs: Vec<(TorusPoint, f64)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| {
            a.0.x.total_cmp(&b.0.x).then(a.0.xi.total_cmp(&b.0.xi)).then(a.1.total_cmp(&b.1))
        });
        let (points, weights): (Vec<_>, Vec<_>) = pairs.into_iter().map(|(p, w)| (p, w / total)).unzip();
        Ok(SampleCloud { points, weights, source })
    }

    fn equal_weights(points: Vec<TorusPoint>, source: CloudSource) -> Self {
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        SampleCloud { points, weights, source }
    }

    /// n i.i.d. draws from a model measure.
    pub fn from_model(model: &ModelMeasure, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cloud size must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n).map(|_| draw(model, &mut rng)).collect();
        Ok(Self::equal_weights(points, CloudSource::Model(model.label())))
    }

    /// n draws from a Husimi grid: a cell by inverse CDF, then a uniform
    /// position inside the cell centred on its grid point.
    pub fn from_husimi(grid: &HusimiGrid, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cloud size must be positive".into()));
        }
        let mut cdf = Vec::with_capacity(grid.values.len());
        let mut acc = 0.0;
        for v in &grid.values {
            acc += v;
            cdf.push(acc);
        }
        let g = grid.g as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                let (i, j) = (k / grid.g, k % grid.g);
                let jx: f64 = rng.random::<f64>() - 0.5;
                let jy: f64 = rng.random::<f64>() - 0.5;
                TorusPoint::new((i as f64 + jx) / g, (j as f64 + jy) / g)
            })
            .collect();
        Ok(Self::equal_weights(points, CloudSource::Husimi { grid: grid.g }))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weight of cloud points within Bowen distance ε of ρ.
    pub fn bowen_ball_mass(&self, map: &CatMap, rho: TorusPoint, t: u32, eps: f64) -> f64 {
        let mut mass = 0.0;
        for (q, w) in self.points.iter().zip(&self.weights) {
            let dx = wrap_half(q.x - rho.x);
            let dy = wrap_half(q.xi - rho.xi);
            if bowen_distance_from_delta(map, dx, dy, t, eps) < eps {
                mass += w;
            }
        }
        mass
    }
}

fn draw(model: &ModelMeasure, rng: &mut ChaCha8Rng) -> TorusPoint {
    match model {
        ModelMeasure::Lebesgue => TorusPoint::new(rng.random(), rng.random()),
        ModelMeasure::PeriodicOrbit(pts) => pts[rng.random_range(0..pts.len())],
        ModelMeasure::Mixture { alpha, first, second } => {
            if rng.random::<f64>() < *alpha {
                draw(first, rng)
            } else {
                draw(second, rng)
            }
        }
    }
}

/// h_KS for the model family: 0 on orbits, λ₊ on Lebesgue, affine on mixtures.
pub fn model_entropy(model: &ModelMeasure, map: &CatMap) -> f64 {
    match model {
        ModelMeasure::Lebesgue => cat_lyapunov(map).lambda_plus,
        ModelMeasure::PeriodicOrbit(_) => 0.0,
        ModelMeasure::Mixture { alpha, first, second } => {
            alpha * model_entropy(first, map) + (1.0 - alpha) * model_entropy(second, map)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LocalEntropy {
    Finite(f64),
    EmptyBall { t: u32, eps: f64 },
}

fn check_window(cloud: &SampleCloud, t: u32, eps: f64) -> Result<()> {
    if t < 2 {
        return Err(Error::InvalidArgument(format!("Bowen window T must be at least 2, got {t}")));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::InvalidArgument(format!("ball radius must lie in (0, 0.25), got {eps}")));
    }
    if cloud.len() < MIN_CLOUD {
        return Err(Error::InvalidArgument(format!(
            "cloud has {} points; estimation needs at least {MIN_CLOUD}",
            cloud.len()
        )));
    }
    Ok(())
}

/// −(1/T) log μ(B_T(ρ, ε)) with μ the cloud's weighted empirical measure.
pub fn brin_katok_local(map: &CatMap, cloud: &SampleCloud, rho: TorusPoint, t: u32, eps: f64) -> Result<LocalEntropy> {
    check_window(cloud, t, eps)?;
    let mass = cloud.bowen_ball_mass(map, rho, t, eps);
    Ok(if mass > 0.0 {
        LocalEntropy::Finite((-mass.ln() / t as f64).max(0.0))
    } else {
        LocalEntropy::EmptyBall { t, eps }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub t_used: u32,
    pub eps_used: f64,
    pub standard_error: f64,
    pub empty_balls: usize,
    pub n_centers: usize,
}

fn draw_centers(cloud: &SampleCloud, n_centers: usize, seed: u64) -> Vec<TorusPoint> {
    let mut cdf = Vec::with_capacity(cloud.len());
    let mut acc = 0.0;
    for w in &cloud.weights {
        acc += w;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_centers)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cloud.points[cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)]
        })
        .collect()
}

fn summarize(locals: &[Option<f64>], t: u32, eps: f64) -> Result<EntropyEstimate> {
    let n_centers = locals.len();
    let finite: Vec<f64> = locals.iter().flatten().copied().collect();
    let empty = n_centers - finite.len();
    if 2 * empty > n_centers {
        return Err(Error::UnderResolved { empty, total: n_centers, t, eps });
    }
    let k = finite.len() as f64;
    let mean = finite.iter().sum::<f64>() / k;
    let var = if finite.len() > 1 {
        finite.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(EntropyEstimate {
        value: mean.max(0.0),
        t_used: t,
        eps_used: eps,
        standard_error: (var / k).sqrt(),
        empty_balls: empty,
        n_centers,
    })
}

/// Average of local entropies over centres drawn from the cloud by weight.
/// Empty balls are skipped and counted.
pub fn ks_entropy_estimate(map: &CatMap, cloud: &SampleCloud, t: u32, eps: f64, n_centers: usize, seed: u64) -> Result<EntropyEstimate> {
    check_window(cloud, t, eps)?;
    if n_centers < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 centres, got {n_centers}")));
    }
    let centers = draw_centers(cloud, n_centers, seed);
    let locals: Vec<Option<f64>> = centers
        .par_iter()
        .map(|&rho| {
            let m = cloud.bowen_ball_mass(map, rho, t, eps);
            (m > 0.0).then(|| (-m.ln() / t as f64).max(0.0))
        })
        .collect();
    summarize(&locals, t, eps)
}

/// Growth-rate form: per centre, log(μ(B_{t1}) / μ(B_{t2})) / (t2 − t1).
/// The ε-dependent prefactor of the ball volume cancels in the ratio.
pub fn ks_entropy_increment(map: &CatMap, cloud: &SampleCloud, t1: u32, t2: u32, eps: f64, n_centers: usize, seed: u64) -> Result<EntropyEstimate> {
    check_window(cloud, t1, eps)?;
    if t2 <= t1 {
        return Err(Error::InvalidArgument(format!("need t2 > t1, got {t1} and {t2}")));
    }
    if n_centers < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 centres, got {n_centers}")));
    }
    let centers = draw_centers(cloud, n_centers, seed);
    let locals: Vec<Option<f64>> = centers
        .par_iter()
        .map(|&rho| {
            let m1 = cloud.bowen_ball_mass(map, rho, t1, eps);
            let m2 = cloud.bowen_ball_mass(map, rho, t2, eps);
            (m2 > 0.0).then(|| ((m1 / m2).ln() / (t2 - t1) as f64).max(0.0))
        })
        .collect();
    summarize(&locals, t2, eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: u32,
    pub eps: f64,
    pub estimate: Option<f64>,
    pub standard_error: Option<f64>,
    pub empty_balls: usize,
}

pub fn estimator_sweep(map: &CatMap, cloud: &SampleCloud, ts: &[u32], epss: &[f64], n_centers: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &t in ts {
        for &eps in epss {
            let row = match ks_entropy_estimate(map, cloud, t, eps, n_centers, seed) {
                Ok(e) => SweepRow { t, eps, estimate: Some(e.value), standard_error: Some(e.standard_error), empty_balls: e.empty_balls },
                Err(Error::UnderResolved { empty, .. }) => SweepRow { t, eps, estimate: None, standard_error: None, empty_balls: empty },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// T,eps,estimate,stderr,empty_ball_count
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("T,eps,estimate,stderr,empty_ball_count\n");
    let f = |x: Option<f64>| x.map(fmt_num).unwrap_or_else(|| "nan".into());
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.t, fmt_num(r.eps), f(r.estimate), f(r.standard_error), r.empty_balls));
    }
    out
}

/// λ₊ − h; nonnegative for every invariant measure.
pub fn ruelle_pesin_gap(h: f64, map: &CatMap) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::InvalidArgument(format!("entropy must be nonnegative, got {h}")));
    }
    Ok(cat_lyapunov(map).lambda_plus - h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Clause {
    pub pass: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub entropy: f64,
    pub scar_weight: f64,
    pub lambda_plus: f64,
    /// h ≥ λ₊ − (d−1)/2·λ_max = λ₊/2
    pub entropy_bound: Clause,
    /// (1 − α)λ₊ ≥ λ₊/2, i.e. α ≤ ½
    pub scar_weight_bound: Clause,
}

pub fn entropy_bound_check(h: f64, map: &CatMap, alpha: f64) -> Result<BoundCheck> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("scar weight {alpha} outside [0, 1]")));
    }
    let ly = cat_lyapunov(map);
    let lower = ly.lambda_plus - 0.5 * ly.lambda_max;
    let m1 = h - lower;
    Ok(BoundCheck {
        entropy: h,
        scar_weight: alpha,
        lambda_plus: ly.lambda_plus,
        entropy_bound: Clause { pass: m1 >= 0.0, margin: m1 },
        scar_weight_bound: Clause { pass: alpha <= 0.5, margin: (0.5 - alpha) * ly.lambda_plus },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_values() {
        let m = CatMap::standard();
        let l = (2.0 + 3f64.sqrt()).ln();
        assert_eq!(model_entropy(&ModelMeasure::origin(), &m), 0.0);
        assert_eq!(model_entropy(&ModelMeasure::Lebesgue, &m), l);
        assert_eq!(model_entropy(&ModelMeasure::half_scar(), &m), 0.5 * l);
    }

    #[test]
    fn atom_cloud_has_zero_entropy() {
        let m = CatMap::standard();
        let c = SampleCloud::from_model(&ModelMeasure::origin(), 500, 1).unwrap();
        assert_eq!(brin_katok_local(&m, &c, TorusPoint::ORIGIN, 8, 0.1).unwrap(), LocalEntropy::Finite(0.0));
        let e = ks_entropy_estimate(&m, &c, 8, 0.1, 20, 2).unwrap();
        assert_eq!((e.value, e.standard_error), (0.0, 0.0));
    }

    #[test]
    fn empty_ball_variant() {
        let m = CatMap::standard();
        let c = SampleCloud::from_model(&ModelMeasure::origin(), 200, 1).unwrap();
        let r = brin_katok_local(&m, &c, TorusPoint::new(0.5, 0.5), 4, 0.1).unwrap();
        assert_eq!(r, LocalEntropy::EmptyBall { t: 4, eps: 0.1 });
    }

    #[test]
    fn small_cloud_rejected() {
        let c = SampleCloud::from_model(&ModelMeasure::Lebesgue, 50, 1).unwrap();
        assert!(brin_katok_local(&CatMap::standard(), &c, TorusPoint::ORIGIN, 4, 0.1).is_err());
    }

    #[test]
    fn bound_check_cases() {
        let m = CatMap::standard();
        let l = cat_lyapunov(&m).lambda_plus;
        let half = entropy_bound_check(0.5 * l, &m, 0.5).unwrap();
        assert!(half.entropy_bound.pass && half.scar_weight_bound.pass);
        assert_eq!(half.entropy_bound.margin, 0.0);
        assert_eq!(half.scar_weight_bound.margin, 0.0);
        let liouville = entropy_bound_check(l, &m, 0.0).unwrap();
        assert_eq!(liouville.entropy_bound.margin, 0.5 * l);
        let heavy = entropy_bound_check(0.25 * l, &m, 0.75).unwrap();
        assert!(!heavy.scar_weight_bound.pass && !heavy.entropy_bound.pass);
    }

    #[test]
    fn ruelle_pesin_gap_cases() {
        let m = CatMap::standard();
        let l = cat_lyapunov(&m).lambda_plus;
        assert_eq!(ruelle_pesin_gap(l, &m).unwrap(), 0.0);
        assert_eq!(ruelle_pesin_gap(0.0, &m).unwrap(), l);
        assert!(ruelle_pesin_gap(-1.0, &m).is_err());
    }

    #[test]
    fn husimi_sampling_is_deterministic() {
        let g = HusimiGrid::uniform(16);
        let a = SampleCloud::from_husimi(&g, 1000, 9).unwrap();
        let b = SampleCloud::from_husimi(&g, 1000, 9).unwrap();
        assert_eq!(a, b);
    }
}
