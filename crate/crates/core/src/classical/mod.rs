//! Classical dynamics: hyperbolic torus automorphisms and stadium billiards.

mod billiard;
mod cat;
mod region;

pub use billiard::{
    billiard_flow, billiard_step, circle_angular_momentum, domain_cells, ergodic_average,
    visited_cells, BilliardState, Bounces, OrbitSegment, StadiumDomain, GRAZING_TOLERANCE,
};
pub use cat::{
    bowen_distance, cat_apply, cat_lyapunov, mat2_mul, periodic_points, periodic_points_exact,
    torus_distance, CatMap, LyapunovData, Mat2, RationalPoint, TorusPoint,
    MAX_PERIODIC_DENOMINATOR,
};
pub(crate) use cat::{bowen_distance_from_delta, wrap_half};
pub use region::Region;

use crate::io::fmt_num;

/// CSV with columns step,x,y,dx,dy.
pub fn billiard_orbit_csv(orbit: &OrbitSegment) -> String {
    let mut out = String::from("step,x,y,dx,dy\n");
    for (i, s) in orbit.states.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{}\n",
            fmt_num(s.position[0]),
            fmt_num(s.position[1]),
            fmt_num(s.direction[0]),
            fmt_num(s.direction[1])
        ));
    }
    out
}

/// CSV with columns step,x,xi.
pub fn torus_orbit_csv(points: &[TorusPoint]) -> String {
    let mut out = String::from("step,x,xi\n");
    for (i, p) in points.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_num(p.x), fmt_num(p.xi)));
    }
    out
}
