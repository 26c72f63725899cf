use serde::Serialize;

/// Position-space region in the billiard plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Region {
    Whole,
    /// Points with n·p < offset.
    HalfPlane { normal: [f64; 2], offset: f64 },
    Disc { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl Region {
    pub fn left_half() -> Self {
        Region::HalfPlane { normal: [1.0, 0.0], offset: 0.0 }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::Whole => true,
            Region::HalfPlane { normal, offset } => normal[0] * p[0] + normal[1] * p[1] < offset,
            Region::Disc { center, radius } => dist2(p, center) < radius * radius,
            Region::Annulus { center, inner, outer } => {
                let r2 = dist2(p, center);
                r2 >= inner * inner && r2 < outer * outer
            }
            Region::Rect { x0, x1, y0, y1 } => p[0] >= x0 && p[0] < x1 && p[1] >= y0 && p[1] < y1,
        }
    }

    /// Length of the segment p→q that lies inside the region.
    pub fn chord_length(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let d = [q[0] - p[0], q[1] - p[1]];
        let len = d[0].hypot(d[1]);
        if len == 0.0 {
            return 0.0;
        }
        len * self.chord_fraction(p, d)
    }

    /// Fraction of s ∈ [0,1] with p + s·d inside.
    fn chord_fraction(&self, p: [f64; 2], d: [f64; 2]) -> f64 {
        match *self {
            Region::Whole => 1.0,
            Region::HalfPlane { normal, offset } => {
                let f0 = normal[0] * p[0] + normal[1] * p[1] - offset;
                let slope = normal[0] * d[0] + normal[1] * d[1];
                if slope == 0.0 {
                    return if f0 < 0.0 { 1.0 } else { 0.0 };
                }
                let s = -f0 / slope;
                if slope > 0.0 {
                    s.clamp(0.0, 1.0)
                } else {
                    1.0 - s.clamp(0.0, 1.0)
                }
            }
            Region::Disc { center, radius } => disc_interval(p, d, center, radius),
            Region::Annulus { center, inner, outer } => {
                disc_interval(p, d, center, outer) - disc_interval(p, d, center, inner)
            }
            Region::Rect { x0, x1, y0, y1 } => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for (o, v, a, b) in [(p[0], d[0], x0, x1), (p[1], d[1], y0, y1)] {
                    if v == 0.0 {
                        if o < a || o >= b {
                            return 0.0;
                        }
                    } else {
                        let (s1, s2) = ((a - o) / v, (b - o) / v);
                        lo = lo.max(s1.min(s2));
                        hi = hi.min(s1.max(s2));
                    }
                }
                (hi - lo).max(0.0)
            }
        }
    }
}

fn dist2(p: [f64; 2], c: [f64; 2]) -> f64 {
    (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)
}

fn disc_interval(p: [f64; 2], d: [f64; 2], c: [f64; 2], r: f64) -> f64 {
    let f = [p[0] - c[0], p[1] - c[1]];
    let aa = d[0] * d[0] + d[1] * d[1];
    let bb = f[0] * d[0] + f[1] * d[1];
    let cc = f[0] * f[0] + f[1] * f[1] - r * r;
    let disc = bb * bb - aa * cc;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let s1 = (-bb - sq) / aa;
    let s2 = (-bb + sq) / aa;
    (s2.min(1.0) - s1.max(0.0)).max(0.0)
}
