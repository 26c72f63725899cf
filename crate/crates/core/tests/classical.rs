mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiclass_core::classical::*;

const MAPS: [(i64, i64, i64, i64); 4] = [(2, 1, 3, 2), (2, 1, 1, 1), (1, 1, 1, 2), (3, 2, 4, 3)];

fn map_strategy() -> impl Strategy<Value = CatMap> {
    (0..MAPS.len()).prop_map(|i| {
        let (a, b, c, d) = MAPS[i];
        CatMap::new(a, b, c, d).unwrap()
    })
}

fn point() -> impl Strategy<Value = TorusPoint> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| TorusPoint::new(x, y))
}

proptest! {
    #[test]
    fn lattice_is_permuted(map in map_strategy(), q in 1i64..=64) {
        let n = (q * q) as usize;
        let mut hit = vec![false; n];
        for i in 0..q {
            for j in 0..q {
                let p = cat_apply(&map, TorusPoint::new(i as f64 / q as f64, j as f64 / q as f64));
                let u = ((p.x * q as f64).round() as i64).rem_euclid(q);
                let v = ((p.xi * q as f64).round() as i64).rem_euclid(q);
                prop_assert!(((p.x * q as f64) - (p.x * q as f64).round()).abs() < 1e-9);
                let k = (u * q + v) as usize;
                prop_assert!(!hit[k]);
                hit[k] = true;
            }
        }
    }

    #[test]
    fn bowen_distance_is_a_metric(map in map_strategy(), p in point(), q in point(), r in point(), t in 0u32..6) {
        let pq = bowen_distance(&map, p, q, t);
        prop_assert_eq!(pq, bowen_distance(&map, q, p, t));
        let pr = bowen_distance(&map, p, r, t);
        let rq = bowen_distance(&map, r, q, t);
        prop_assert!(pq <= pr + rq + 1e-12);
        prop_assert!(bowen_distance(&map, p, q, t + 2) >= pq);
    }

    #[test]
    fn reflection_preserves_speed(x in -0.9..0.9f64, y in -0.9..0.9f64, angle in 0.0..std::f64::consts::TAU) {
        let dom = StadiumDomain::new(1.0, 1.0).unwrap();
        let s = BilliardState { position: [x, y], direction: [angle.cos(), angle.sin()] };
        let orbit = billiard_flow(&dom, &s, 200).unwrap();
        for st in &orbit.states {
            prop_assert!((st.direction[0].hypot(st.direction[1]) - 1.0).abs() < 1e-12);
            prop_assert!(dom.signed_distance(st.position) < 1e-9);
        }
        prop_assert!(orbit.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn circle_angular_momentum_is_conserved(r0 in 0.0..0.9f64, angle in 0.0..std::f64::consts::TAU) {
        let dom = StadiumDomain::circle(1.0);
        let s = BilliardState { position: [r0, 0.0], direction: [angle.cos(), angle.sin()] };
        let l0 = circle_angular_momentum(&s);
        prop_assume!((1.0 - l0 * l0).sqrt() > 1e-6);
        let orbit = billiard_flow(&dom, &s, 2000).unwrap();
        for st in &orbit.states {
            prop_assert!((circle_angular_momentum(st) - l0).abs() < 1e-9);
        }
    }
}

#[test]
fn periodic_point_counts_match_brute_force() {
    for (a, b, c, d) in MAPS {
        let map = CatMap::new(a, b, c, d).unwrap();
        for p in 1..=3u32 {
            let total: usize = periodic_points(&map, p)
                .unwrap()
                .iter()
                .map(|orbit| orbit.len())
                .sum();
            // points of exact period dividing p
            assert_eq!(total, common::fixed_point_count_brute(map.matrix(), p), "map {:?} p {p}", map.matrix());
        }
    }
}

#[test]
fn pushforward_of_uniform_is_uniform() {
    let map = CatMap::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bins = 16usize;
    let samples = 1_000_000usize;
    let mut counts = vec![0usize; bins * bins];
    for _ in 0..samples {
        let p = cat_apply(&map, TorusPoint::new(rng.random(), rng.random()));
        let i = ((p.x * bins as f64) as usize).min(bins - 1);
        let j = ((p.xi * bins as f64) as usize).min(bins - 1);
        counts[i * bins + j] += 1;
    }
    let expected = samples as f64 / (bins * bins) as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = common::chi2_upper_tail(chi2, (bins * bins - 1) as f64);
    assert!(p_value > 0.001, "chi2 = {chi2}, p = {p_value}");
}

#[test]
fn circle_angular_momentum_long_orbit() {
    let dom = StadiumDomain::circle(1.0);
    let s = BilliardState { position: [0.3, 0.1], direction: [0.6, 0.8] };
    let l0 = circle_angular_momentum(&s);
    let mut worst = 0.0f64;
    for step in Bounces::new(&dom, s).take(100_000) {
        let (st, _) = step.unwrap();
        worst = worst.max((circle_angular_momentum(&st) - l0).abs());
    }
    assert!(worst < 1e-9, "drift {worst}");
}

#[test]
fn stadium_time_average_matches_area() {
    let dom = StadiumDomain::new(1.0, 1.0).unwrap();
    let s = BilliardState { position: [0.1234, 0.4321], direction: [0.8, 0.6] };
    let left = ergodic_average(&dom, &s, &Region::left_half(), 1_000_000).unwrap();
    assert!((left - 0.5).abs() < 0.02, "left-half fraction {left}");
    let visited = visited_cells(&dom, &s, 100_000, 32, 16).unwrap();
    let inside = domain_cells(&dom, 32, 16);
    for (v, i) in visited.iter().zip(&inside) {
        assert!(!i || *v);
    }
}
