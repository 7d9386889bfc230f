//! Thin wrappers over `libm` so the rest of the crate reads like std code.

pub use core::f64::consts::{LN_2, SQRT_2};

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Index of the first element of a sorted slice that is `> x`, clamped so
/// that `grid[i - 1] <= x < grid[i]` brackets `x` for interior points.
pub fn bracket(grid: &[f64], x: f64) -> usize {
    let n = grid.len();
    debug_assert!(n >= 2);
    let i = grid.partition_point(|&g| g <= x);
    i.clamp(1, n - 1)
}

/// Least-squares line `y = intercept + slope * x`; returns `(slope, intercept, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    (slope, intercept, sqrt(ss / n))
}
