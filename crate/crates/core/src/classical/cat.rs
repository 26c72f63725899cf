use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

/// Hyperbolic element of SL(2, ℤ) acting on T² = ℝ²/ℤ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CatMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Point of the torus with both coordinates reduced to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusPoint {
    pub x: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovData {
    pub lambda_plus: f64,
    pub lambda_max: f64,
}

pub type Mat2 = [[i64; 2]; 2];

impl CatMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let bad = |reason| Error::InvalidCatMap { a, b, c, d, reason };
        if a.checked_mul(d).and_then(|ad| b.checked_mul(c).and_then(|bc| ad.checked_sub(bc))) != Some(1) {
            return Err(bad("determinant is not 1"));
        }
        if (a + d).abs() <= 2 {
            return Err(bad("|trace| must exceed 2"));
        }
        Ok(CatMap { a, b, c, d })
    }

    /// The default map [[2,1],[3,2]].
    pub fn standard() -> Self {
        CatMap { a: 2, b: 1, c: 3, d: 2 }
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        CatMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn is_quantizable(&self) -> bool {
        (self.a * self.b) % 2 == 0 && (self.c * self.d) % 2 == 0
    }

    /// M^t for any integer t, failing on i64 overflow.
    pub fn power(&self, t: i64) -> Result<Mat2> {
        let base = if t < 0 { self.inverse().matrix() } else { self.matrix() };
        let mut out = [[1, 0], [0, 1]];
        for _ in 0..t.unsigned_abs() {
            out = mat2_mul_checked(&base, &out)
                .ok_or_else(|| Error::Resource(format!("M^{t} overflows 64-bit entries")))?;
        }
        Ok(out)
    }

    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        cat_apply(self, p)
    }
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

pub fn mat2_mul_checked(x: &Mat2, y: &Mat2) -> Option<Mat2> {
    let e = |i: usize, j: usize| {
        x[i][0].checked_mul(y[0][j])?.checked_add(x[i][1].checked_mul(y[1][j])?)
    };
    Some([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

fn unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid of a tiny negative number can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative in [-1/2, 1/2).
pub(crate) fn wrap_half(v: f64) -> f64 {
    let r = v - v.round();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(x: f64, xi: f64) -> Self {
        TorusPoint { x: unit(x), xi: unit(xi) }
    }

    pub const ORIGIN: TorusPoint = TorusPoint { x: 0.0, xi: 0.0 };
}

/// Flat quotient metric on T².
pub fn torus_distance(p: TorusPoint, q: TorusPoint) -> f64 {
    let dx = wrap_half(p.x - q.x);
    let dy = wrap_half(p.xi - q.xi);
    dx.hypot(dy)
}

pub fn cat_apply(map: &CatMap, p: TorusPoint) -> TorusPoint {
    TorusPoint::new(
        map.a as f64 * p.x + map.b as f64 * p.xi,
        map.c as f64 * p.x + map.d as f64 * p.xi,
    )
}

pub fn cat_lyapunov(map: &CatMap) -> LyapunovData {
    let tr = map.trace().abs() as f64;
    let lambda_plus = ((tr + (tr * tr - 4.0).sqrt()) / 2.0).ln();
    LyapunovData { lambda_plus, lambda_max: lambda_plus }
}

/// Largest denominator accepted by [`periodic_points`].
pub const MAX_PERIODIC_DENOMINATOR: i64 = 4_000_000;

/// All points with M^p v ≡ v (mod 1), grouped into orbits of M. The orbit of
/// the origin comes first; the rest are ordered by their smallest member.
pub fn periodic_points(map: &CatMap, period: u32) -> Result<Vec<Vec<TorusPoint>>> {
    Ok(periodic_points_exact(map, period)?
        .into_iter()
        .map(|orbit| orbit.into_iter().map(|r| r.to_point()).collect())
        .collect())
}

/// Rational point (u1/q, u2/q) with 0 ≤ u < q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub u1: i64,
    pub u2: i64,
    pub q: i64,
}

impl RationalPoint {
    pub fn to_point(self) -> TorusPoint {
        TorusPoint::new(self.u1 as f64 / self.q as f64, self.u2 as f64 / self.q as f64)
    }
}

pub fn periodic_points_exact(map: &CatMap, period: u32) -> Result<Vec<Vec<RationalPoint>>> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let mp = map.power(period as i64)?;
    let a = [[mp[0][0] - 1, mp[0][1]], [mp[1][0], mp[1][1] - 1]];
    let det = a[0][0]
        .checked_mul(a[1][1])
        .and_then(|x| a[0][1].checked_mul(a[1][0]).and_then(|y| x.checked_sub(y)))
        .ok_or_else(|| Error::Resource("determinant overflow".into()))?;
    let q = det.abs();
    if q == 0 {
        return Err(Error::InvalidArgument("M^p − I is singular; map is not hyperbolic".into()));
    }
    if q > MAX_PERIODIC_DENOMINATOR {
        return Err(Error::Resource(format!(
            "{q} periodic points of period {period} exceed the search limit {MAX_PERIODIC_DENOMINATOR}"
        )));
    }
    // Solutions are A^{-1} ℤ² = adj(A) ℤ² / det; in numerators over q they
    // form the subgroup of (ℤ/q)² generated by the columns of ±adj(A).
    let s = det.signum();
    let gens = [
        [(s * a[1][1]).rem_euclid(q), (-s * a[1][0]).rem_euclid(q)],
        [(-s * a[0][1]).rem_euclid(q), (s * a[0][0]).rem_euclid(q)],
    ];
    let mut seen: HashSet<(i64, i64)> = HashSet::with_capacity(q as usize);
    let mut queue = VecDeque::new();
    seen.insert((0, 0));
    queue.push_back((0i64, 0i64));
    while let Some((u1, u2)) = queue.pop_front() {
        for g in &gens {
            let next = ((u1 + g[0]) % q, (u2 + g[1]) % q);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut points: Vec<(i64, i64)> = seen.into_iter().collect();
    points.sort_unstable();
    let mut assigned: HashSet<(i64, i64)> = HashSet::with_capacity(points.len());
    let mut orbits = Vec::new();
    let (ma, mb, mc, md) = (map.a.rem_euclid(q), map.b.rem_euclid(q), map.c.rem_euclid(q), map.d.rem_euclid(q));
    for &start in &points {
        if assigned.contains(&start) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        loop {
            assigned.insert(cur);
            orbit.push(RationalPoint { u1: cur.0, u2: cur.1, q });
            let next = (
                ((ma as i128 * cur.0 as i128 + mb as i128 * cur.1 as i128) % q as i128) as i64,
                ((mc as i128 * cur.0 as i128 + md as i128 * cur.1 as i128) % q as i128) as i64,
            );
            if next == start {
                break;
            }
            cur = next;
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// max over t ∈ [−⌊T/2⌋, ⌈T/2⌉] of the torus distance between M^t p and M^t q.
pub fn bowen_distance(map: &CatMap, p: TorusPoint, q: TorusPoint, t: u32) -> f64 {
    let dx = wrap_half(p.x - q.x);
    let dy = wrap_half(p.xi - q.xi);
    bowen_distance_from_delta(map, dx, dy, t, f64::INFINITY)
}

/// Bowen distance of a separation vector, stopping as soon as it exceeds
/// `stop_above` (the returned value is then some number above it).
pub(crate) fn bowen_distance_from_delta(map: &CatMap, dx: f64, dy: f64, t: u32, stop_above: f64) -> f64 {
    let mut worst = dx.hypot(dy);
    if worst > stop_above {
        return worst;
    }
    let back = t / 2;
    let fwd = t - back;
    let (a, b, c, d) = (map.a as f64, map.b as f64, map.c as f64, map.d as f64);
    let (mut x, mut y) = (dx, dy);
    for _ in 0..fwd {
        let nx = wrap_half(a * x + b * y);
        let ny = wrap_half(c * x + d * y);
        x = nx;
        y = ny;
        worst = worst.max(x.hypot(y));
        if worst > stop_above {
            return worst;
        }
    }
    let (x0, y0) = (dx, dy);
    let (mut x, mut y) = (x0, y0);
    for _ in 0..back {
        let nx = wrap_half(d * x - b * y);
        let ny = wrap_half(-c * x + a * y);
        x = nx;
        y = ny;
        worst = worst.max(x.hypot(y));
        if worst > stop_above {
            return worst;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: TorusPoint, x: f64, xi: f64) -> bool {
        torus_distance(p, TorusPoint::new(x, xi)) < 1e-12
    }

    #[test]
    fn apply_examples() {
        let m = CatMap::standard();
        assert!(close(m.apply(TorusPoint::new(0.0, 0.0)), 0.0, 0.0));
        assert!(close(m.apply(TorusPoint::new(0.5, 0.5)), 0.5, 0.5));
        assert!(close(m.apply(TorusPoint::new(0.25, 0.0)), 0.5, 0.75));
    }

    #[test]
    fn rejects_non_hyperbolic_and_non_unimodular() {
        assert!(CatMap::new(1, 1, 0, 1).is_err());
        assert!(CatMap::new(2, 1, 1, 2).is_err());
        assert!(CatMap::new(2, 1, 3, 2).is_ok());
    }

    #[test]
    fn lyapunov_closed_forms() {
        let l = cat_lyapunov(&CatMap::new(2, 1, 1, 1).unwrap());
        assert!((l.lambda_plus - 0.962_423_650_119_206_9).abs() < 1e-12);
        let l = cat_lyapunov(&CatMap::standard());
        assert!((l.lambda_plus - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-15);
        assert_eq!(l.lambda_plus, l.lambda_max);
        let l2 = cat_lyapunov(&CatMap::new(1, 1, 1, 2).unwrap());
        assert_eq!(l2.lambda_plus, cat_lyapunov(&CatMap::new(2, 1, 1, 1).unwrap()).lambda_plus);
    }

    #[test]
    fn standard_map_fixed_points() {
        let orbits = periodic_points_exact(&CatMap::standard(), 1).unwrap();
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[0], vec![RationalPoint { u1: 0, u2: 0, q: 2 }]);
        assert_eq!(orbits[1], vec![RationalPoint { u1: 1, u2: 1, q: 2 }]);
    }

    #[test]
    fn bowen_distance_window_and_zero_cases() {
        let m = CatMap::standard();
        let p = TorusPoint::new(0.1, 0.7);
        assert_eq!(bowen_distance(&m, p, p, 6), 0.0);
        let q = TorusPoint::new(0.13, 0.69);
        assert!((bowen_distance(&m, p, q, 0) - torus_distance(p, q)).abs() < 1e-15);
    }

    #[test]
    fn wrap_half_range() {
        for v in [-3.5, -0.5, 0.0, 0.49999, 0.5, 0.75, 12.25] {
            let w = wrap_half(v);
            assert!((-0.5..0.5).contains(&w), "{v} -> {w}");
            assert!(((v - w) - (v - w).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_reduction_never_returns_one() {
        let p = TorusPoint::new(-1e-18, 1.0);
        assert!(p.x < 1.0 && p.xi < 1.0);
    }

    #[test]
    fn power_overflow_is_reported() {
        assert!(CatMap::standard().power(60).is_err());
        assert_eq!(CatMap::standard().power(-1).unwrap(), [[2, -1], [-3, 2]]);
    }
}
