//! Gauss-Legendre and trapezoid rules.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(order: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    assert!(order > 0, "quadrature order must be positive");
    let n = order;
    let mut rule = Vec::with_capacity(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((mid - half * x, half * w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Uniform periodic trapezoid nodes `2πj/count` on `[0, 2π)` with equal weights.
pub fn periodic_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| 2.0 * PI * j as f64 / count as f64)
        .collect()
}
