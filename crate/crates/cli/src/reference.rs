//! Reference values used by the run-time checks.

/// J_n(x) by its power series; accurate to ~1e-14 for x below about 10.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..60 {
        term *= -half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of J_n by sign scan and bisection.
pub fn bessel_first_zero(n: u32) -> f64 {
    let mut a = 0.5 + n as f64;
    while bessel_j(n, a) * bessel_j(n, a + 0.05) > 0.0 {
        a += 0.05;
    }
    let (mut lo, mut hi) = (a, a + 0.05);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(n, lo) * bessel_j(n, mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_zeros() {
        assert!((bessel_first_zero(0) - 2.404825557695773).abs() < 1e-12);
        assert!((bessel_first_zero(1) - 3.831705970207512).abs() < 1e-12);
    }
}
