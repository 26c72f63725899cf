use serde::Serialize;

use super::region::Region;
use crate::error::{Error, Result};

/// Rectangle [−a, a]×[−r, r] capped by two radius-r half discs centred at
/// (±a, 0). With a = 0 this is the disc of radius r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StadiumDomain {
    pub half_length: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilliardState {
    pub position: [f64; 2],
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSegment {
    pub states: Vec<BilliardState>,
    /// Arc length at each state, starting from 0.
    pub times: Vec<f64>,
}

/// |cos(incidence)| below this raises [`Error::Grazing`].
pub const GRAZING_TOLERANCE: f64 = 1e-10;

const HIT_EPS: f64 = 1e-12;

impl StadiumDomain {
    pub fn new(half_length: f64, radius: f64) -> Result<Self> {
        if !(half_length >= 0.0 && half_length.is_finite()) || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!(
                "stadium needs a >= 0 and r > 0, got a = {half_length}, r = {radius}"
            )));
        }
        Ok(StadiumDomain { half_length, radius })
    }

    pub fn circle(radius: f64) -> Self {
        StadiumDomain { half_length: 0.0, radius }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_length * self.radius + std::f64::consts::PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        4.0 * self.half_length + 2.0 * std::f64::consts::PI * self.radius
    }

    /// [x0, x1, y0, y1]
    pub fn bounding_box(&self) -> [f64; 4] {
        let w = self.half_length + self.radius;
        [-w, w, -self.radius, self.radius]
    }

    /// Signed distance, negative inside.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let ax = p[0].abs() - self.half_length;
        if ax <= 0.0 {
            p[1].abs() - self.radius
        } else {
            ax.hypot(p[1]) - self.radius
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.signed_distance(p) <= 0.0
    }

    pub fn strictly_contains(&self, p: [f64; 2]) -> bool {
        self.signed_distance(p) < 0.0
    }

    /// Distance along `dir` (unit) from an interior or boundary point to
    /// the boundary, with the outward normal there.
    pub fn exit(&self, p: [f64; 2], dir: [f64; 2]) -> Option<(f64, [f64; 2])> {
        let (a, r) = (self.half_length, self.radius);
        let mut best: Option<(f64, [f64; 2])> = None;
        let mut offer = |t: f64, n: [f64; 2]| {
            if t > HIT_EPS && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, n));
            }
        };
        if a > 0.0 {
            for (sign, dy) in [(1.0, dir[1]), (-1.0, dir[1])] {
                if dy * sign > 0.0 {
                    let t = (sign * r - p[1]) / dy;
                    let x = p[0] + t * dir[0];
                    if x.abs() <= a {
                        offer(t, [0.0, sign]);
                    }
                }
            }
        }
        for cx in if a > 0.0 { vec![a, -a] } else { vec![0.0] } {
            let f = [p[0] - cx, p[1]];
            let b = f[0] * dir[0] + f[1] * dir[1];
            let c = f[0] * f[0] + f[1] * f[1] - r * r;
            let disc = b * b - c;
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            let t = if b <= 0.0 { -b + s } else { -c / (b + s) };
            let hit = [p[0] + t * dir[0], p[1] + t * dir[1]];
            let on_cap = if a > 0.0 { (hit[0] - cx) * cx.signum() >= -1e-12 } else { true };
            if on_cap {
                let n = [hit[0] - cx, hit[1]];
                let len = n[0].hypot(n[1]);
                offer(t, [n[0] / len, n[1] / len]);
            }
        }
        best
    }

    /// Project a point that should lie on the boundary back onto it.
    fn snap(&self, q: [f64; 2], normal: [f64; 2]) -> [f64; 2] {
        let (a, r) = (self.half_length, self.radius);
        if a > 0.0 && normal[0] == 0.0 {
            [q[0].clamp(-a, a), normal[1] * r]
        } else {
            let cx = if a > 0.0 { a * q[0].signum() } else { 0.0 };
            [cx + r * normal[0], r * normal[1]]
        }
    }
}

pub fn billiard_step(domain: &StadiumDomain, s: &BilliardState) -> Result<BilliardState> {
    step_indexed(domain, s, 0).map(|(next, _)| next)
}

fn step_indexed(domain: &StadiumDomain, s: &BilliardState, bounce: usize) -> Result<(BilliardState, f64)> {
    let d = s.direction;
    let (t, n) = domain.exit(s.position, d).ok_or_else(|| {
        Error::Geometry(format!("no boundary hit from {:?} along {:?}", s.position, d))
    })?;
    let hit = [s.position[0] + t * d[0], s.position[1] + t * d[1]];
    let q = domain.snap(hit, n);
    let dn = d[0] * n[0] + d[1] * n[1];
    if dn.abs() < GRAZING_TOLERANCE {
        return Err(Error::Grazing { bounce, cos: dn.abs() });
    }
    let mut nd = [d[0] - 2.0 * dn * n[0], d[1] - 2.0 * dn * n[1]];
    let len = nd[0].hypot(nd[1]);
    nd = [nd[0] / len, nd[1] / len];
    Ok((BilliardState { position: q, direction: nd }, t))
}

/// Iterator over successive collisions: yields (state after bounce, chord
/// length travelled to reach it).
pub struct Bounces<'a> {
    domain: &'a StadiumDomain,
    state: BilliardState,
    index: usize,
}

impl<'a> Bounces<'a> {
    pub fn new(domain: &'a StadiumDomain, start: BilliardState) -> Self {
        Bounces { domain, state: start, index: 0 }
    }
}

impl Iterator for Bounces<'_> {
    type Item = Result<(BilliardState, f64)>;

    fn next(&mut self) -> Option<Self::Item> {
        let r = step_indexed(self.domain, &self.state, self.index);
        self.index += 1;
        if let Ok((s, _)) = &r {
            self.state = *s;
        }
        Some(r)
    }
}

pub fn billiard_flow(domain: &StadiumDomain, s: &BilliardState, n_bounces: usize) -> Result<OrbitSegment> {
    if n_bounces == 0 {
        return Err(Error::InvalidArgument("n_bounces must be at least 1".into()));
    }
    let mut states = Vec::with_capacity(n_bounces + 1);
    let mut times = Vec::with_capacity(n_bounces + 1);
    states.push(*s);
    times.push(0.0);
    let mut clock = 0.0;
    for step in Bounces::new(domain, *s).take(n_bounces) {
        let (next, len) = step?;
        clock += len;
        states.push(next);
        times.push(clock);
    }
    Ok(OrbitSegment { states, times })
}

pub fn circle_angular_momentum(s: &BilliardState) -> f64 {
    s.position[0] * s.direction[1] - s.position[1] * s.direction[0]
}

/// Fraction of arc length spent inside `region` over `n_bounces` chords.
pub fn ergodic_average(domain: &StadiumDomain, s: &BilliardState, region: &Region, n_bounces: usize) -> Result<f64> {
    let mut inside = 0.0;
    let mut total = 0.0;
    let mut prev = s.position;
    for step in Bounces::new(domain, *s).take(n_bounces) {
        let (next, len) = step?;
        inside += region.chord_length(prev, next.position);
        total += len;
        prev = next.position;
    }
    if total == 0.0 {
        return Err(Error::InvalidArgument("orbit has zero length".into()));
    }
    Ok(inside / total)
}

/// Which cells of an nx×ny grid over the bounding box the chords pass
/// through. Returned row-major with the x index fastest.
pub fn visited_cells(domain: &StadiumDomain, s: &BilliardState, n_bounces: usize, nx: usize, ny: usize) -> Result<Vec<bool>> {
    let [bx0, bx1, by0, by1] = domain.bounding_box();
    let (dx, dy) = ((bx1 - bx0) / nx as f64, (by1 - by0) / ny as f64);
    let mut visited = vec![false; nx * ny];
    let mut mark = |x: f64, y: f64| {
        let i = (((x - bx0) / dx).floor() as isize).clamp(0, nx as isize - 1) as usize;
        let j = (((y - by0) / dy).floor() as isize).clamp(0, ny as isize - 1) as usize;
        visited[j * nx + i] = true;
    };
    let mut prev = s.position;
    let mut cuts: Vec<f64> = Vec::new();
    for step in Bounces::new(domain, *s).take(n_bounces) {
        let (next, _) = step?;
        let q = next.position;
        cuts.clear();
        cuts.push(0.0);
        cuts.push(1.0);
        for (o, e, lo, h, n) in [(prev[0], q[0], bx0, dx, nx), (prev[1], q[1], by0, dy, ny)] {
            if e != o {
                for k in 1..n {
                    let s = (lo + k as f64 * h - o) / (e - o);
                    if s > 0.0 && s < 1.0 {
                        cuts.push(s);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            mark(prev[0] + m * (q[0] - prev[0]), prev[1] + m * (q[1] - prev[1]));
        }
        prev = q;
    }
    Ok(visited)
}

/// Cells of the nx×ny grid whose centre lies inside the domain.
pub fn domain_cells(domain: &StadiumDomain, nx: usize, ny: usize) -> Vec<bool> {
    let [bx0, bx1, by0, by1] = domain.bounding_box();
    let (dx, dy) = ((bx1 - bx0) / nx as f64, (by1 - by0) / ny as f64);
    let mut out = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let c = [bx0 + (i as f64 + 0.5) * dx, by0 + (j as f64 + 0.5) * dy];
            out[j * nx + i] = domain.strictly_contains(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(x: f64, y: f64, dx: f64, dy: f64) -> BilliardState {
        let l = dx.hypot(dy);
        BilliardState { position: [x, y], direction: [dx / l, dy / l] }
    }

    #[test]
    fn diameter_orbit_in_circle() {
        let c = StadiumDomain::circle(1.0);
        let s = billiard_step(&c, &st(-1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!((s.position[0] - 1.0).abs() < 1e-15 && s.position[1].abs() < 1e-15);
        assert!((s.direction[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn stadium_axis_hits_cap_apex() {
        let d = StadiumDomain::new(1.0, 1.0).unwrap();
        let s = billiard_step(&d, &st(-1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!((s.position[0] - 2.0).abs() < 1e-14 && s.position[1].abs() < 1e-14);
        assert!((s.direction[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn flat_wall_reflection() {
        let d = StadiumDomain::new(1.0, 1.0).unwrap();
        let s = billiard_step(&d, &st(0.0, 0.0, 0.3, 1.0)).unwrap();
        assert!((s.position[1] - 1.0).abs() < 1e-15);
        let e = st(0.0, 0.0, 0.3, -1.0).direction;
        assert!((s.direction[0] - e[0]).abs() < 1e-15 && (s.direction[1] - e[1]).abs() < 1e-15);
    }

    #[test]
    fn tangent_start_is_grazing() {
        let c = StadiumDomain::circle(1.0);
        // From the boundary heading along the tangent, the next hit is the
        // same point: no positive root, or an exactly tangential collision.
        let r = billiard_step(&c, &st(0.0, -1.0, 1.0, 0.0));
        assert!(r.is_err());
    }

    #[test]
    fn near_tangent_chord_is_grazing() {
        let d = StadiumDomain::new(1.0, 1.0).unwrap();
        let r = billiard_step(&d, &st(-1.0, 1.0 - 1e-12, 1.0, 1e-11));
        assert!(matches!(r, Err(Error::Grazing { bounce: 0, .. })), "{r:?}");
    }

    #[test]
    fn angular_momentum_examples() {
        assert_eq!(circle_angular_momentum(&st(-1.0, 0.0, 1.0, 0.0)), 0.0);
        assert_eq!(circle_angular_momentum(&st(1.0, 0.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn whole_region_average_is_one() {
        let d = StadiumDomain::new(1.0, 1.0).unwrap();
        let v = ergodic_average(&d, &st(0.1, 0.2, 0.4, 0.9), &Region::Whole, 100).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn caustic_excludes_inner_disc() {
        let c = StadiumDomain::circle(1.0);
        // L = x dy − y dx = 0.8 for position (0.8, 0) moving along +y.
        let s = st(0.8, 0.0, 0.0, 1.0);
        assert!((circle_angular_momentum(&s) - 0.8).abs() < 1e-15);
        let r = Region::Disc { center: [0.0, 0.0], radius: 0.3 };
        assert_eq!(ergodic_average(&c, &s, &r, 1000).unwrap(), 0.0);
    }

    #[test]
    fn flow_times_increase() {
        let d = StadiumDomain::new(1.0, 1.0).unwrap();
        let o = billiard_flow(&d, &st(0.1, 0.2, 0.4, 0.9), 50).unwrap();
        assert_eq!(o.states.len(), 51);
        assert!(o.times.windows(2).all(|w| w[1] > w[0]));
    }
}
