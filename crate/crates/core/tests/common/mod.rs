//! Reference values computed independently of the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// J_n(x) = (1/π) ∫₀^π cos(nτ − x sin τ) dτ, trapezoid rule. The integrand
/// extends to a smooth periodic function, so the rule converges
/// geometrically.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for i in 1..m {
        s += f(i as f64 * h);
    }
    s * h / PI
}

/// k-th positive zero of J_n, by a sign scan followed by bisection.
pub fn bessel_zero(n: i32, k: usize) -> f64 {
    let mut found = 0;
    let step = 0.01;
    let mut a = 1e-6;
    loop {
        let b = a + step;
        if bessel_j(n, a) * bessel_j(n, b) < 0.0 {
            found += 1;
            if found == k {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if bessel_j(n, lo) * bessel_j(n, mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
    }
}

/// Eigenvalues of the five-point Dirichlet Laplacian on the unit square
/// with h = 1/(n+1), ascending.
pub fn unit_square_spectrum(n: usize) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    let mut v = Vec::with_capacity(n * n);
    for p in 1..=n {
        for q in 1..=n {
            v.push((2.0 / (h * h)) * (2.0 - (PI * p as f64 * h).cos() - (PI * q as f64 * h).cos()));
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Fixed points of a hyperbolic M^p on the torus: |det(M^p − I)|, counted
/// by brute force over the lattice (1/q)Z² with q = |det(M^p − I)|.
pub fn fixed_point_count_brute(m: [[i64; 2]; 2], p: u32) -> usize {
    let mut mp = [[1i64, 0], [0, 1]];
    for _ in 0..p {
        mp = [
            [mp[0][0] * m[0][0] + mp[0][1] * m[1][0], mp[0][0] * m[0][1] + mp[0][1] * m[1][1]],
            [mp[1][0] * m[0][0] + mp[1][1] * m[1][0], mp[1][0] * m[0][1] + mp[1][1] * m[1][1]],
        ];
    }
    let q = ((mp[0][0] - 1) * (mp[1][1] - 1) - mp[0][1] * mp[1][0]).abs();
    let mut count = 0;
    for i in 0..q {
        for j in 0..q {
            let x = (mp[0][0] * i + mp[0][1] * j - i).rem_euclid(q);
            let y = (mp[1][0] * i + mp[1][1] * j - j).rem_euclid(q);
            if x == 0 && y == 0 {
                count += 1;
            }
        }
    }
    count
}

/// Husimi mass of a torus coherent state in a ball of radius r: the
/// overlap |⟨c_ρ, c_0⟩|² is exp(−πN|ρ|²) for small |ρ|.
pub fn coherent_ball_mass(n: usize, r: f64) -> f64 {
    1.0 - (-PI * n as f64 * r * r).exp()
}

/// Upper tail of the χ² distribution with k degrees of freedom, via the
/// Wilson–Hilferty normal approximation.
pub fn chi2_upper_tail(x: f64, k: f64) -> f64 {
    let z = ((x / k).powf(1.0 / 3.0) - (1.0 - 2.0 / (9.0 * k))) / (2.0 / (9.0 * k)).sqrt();
    0.5 * erfc(z / 2f64.sqrt())
}

fn erfc(x: f64) -> f64 {
    // Numerical Recipes erfcc, fractional error < 1.2e-7
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t * (-z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}
