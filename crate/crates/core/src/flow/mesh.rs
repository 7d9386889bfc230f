//! Logarithmically mapped meshes and monotone remeshing.
//!
//! Nodes sit at x_i = L·(R/L)^{σ_i} with σ_i = (i/(n−1))^p. For the shrinking
//! interval [a(t), b(t)] the dilated positions x_i/a(t) are then uniform in
//! log φ, so a fixed node set resolves the blow-up region at every time.

use alloc::vec::Vec;

use crate::interp::Pchip;
use crate::math::{exp, ln, powf};

/// Reference coordinates σ_i ∈ [0, 1].
pub fn sigma_grid(n: usize, grading: f64) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                1.0
            } else if grading == 1.0 {
                i as f64 / m
            } else {
                powf(i as f64 / m, grading)
            }
        })
        .collect()
}

/// Writes x_i = lo·(hi/lo)^{σ_i}, with the end nodes exact.
pub fn place(sigma: &[f64], lo: f64, hi: f64, out: &mut [f64]) {
    let kappa = ln(hi / lo);
    for (o, &s) in out.iter_mut().zip(sigma) {
        *o = lo * exp(s * kappa);
    }
    out[0] = lo;
    let n = out.len();
    out[n - 1] = hi;
}

pub fn log_mesh(n: usize, grading: f64, lo: f64, hi: f64) -> Vec<f64> {
    let s = sigma_grid(n, grading);
    let mut x = alloc::vec![0.0; n];
    place(&s, lo, hi, &mut x);
    x
}

/// Fraction of nodes inside [lo, lo·(1 + k)].
pub fn window_fraction(x: &[f64], k: f64) -> f64 {
    let edge = x[0] * (1.0 + k);
    x.iter().filter(|&&v| v <= edge).count() as f64 / x.len() as f64
}

/// Target of a remesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemeshPolicy {
    pub nodes: usize,
    pub grading: f64,
    /// Inner window [a, a + K(T − t)].
    pub window_k: f64,
    /// Required share of nodes inside the window.
    pub min_fraction: f64,
}

impl Default for RemeshPolicy {
    fn default() -> Self {
        RemeshPolicy {
            nodes: 2048,
            grading: 1.0,
            window_k: 10.0,
            min_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemeshReport {
    pub old_nodes: usize,
    pub new_nodes: usize,
    pub grading: f64,
    pub window_fraction: f64,
    /// Max difference at the old nodes after mapping back from the new grid.
    pub error_estimate: f64,
}

/// Smallest grading ≥ `start` (in steps of 1/4) that meets the window share.
pub fn grading_for_window(n: usize, start: f64, lo: f64, hi: f64, policy: &RemeshPolicy) -> f64 {
    let mut p = start.max(1.0);
    for _ in 0..64 {
        let x = log_mesh(n, p, lo, hi);
        if window_fraction(&x, policy.window_k) >= policy.min_fraction {
            break;
        }
        p += 0.25;
    }
    p
}

/// Monotone cubic transfer of `u` from `x_old` to `x_new`, with optional
/// exact end slopes. Returns the new values and the round-trip error.
pub fn transfer(
    x_old: &[f64],
    u_old: &[f64],
    x_new: &[f64],
    left_slope: Option<f64>,
    right_slope: Option<f64>,
) -> (Vec<f64>, f64) {
    let forward = Pchip::new(x_old, u_old, left_slope, right_slope);
    let u_new = forward.resample(x_new);
    let back = Pchip::new(x_new, &u_new, left_slope, right_slope);
    let err = x_old
        .iter()
        .zip(u_old)
        .map(|(&x, &u)| crate::math::abs(back.eval(x) - u))
        .fold(0.0, f64::max);
    (u_new, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_mesh_is_uniform_in_log() {
        let x = log_mesh(11, 1.0, 0.5, 512.0);
        for w in x.windows(2) {
            assert!((ln(w[1] / w[0]) - ln(1024.0) / 10.0).abs() < 1e-12);
        }
        assert_eq!(x[0], 0.5);
        assert_eq!(x[10], 512.0);
    }

    #[test]
    fn grading_meets_window_share() {
        let policy = RemeshPolicy::default();
        let p = grading_for_window(512, 1.0, 1e-4, 8.5, &policy);
        let x = log_mesh(512, p, 1e-4, 8.5);
        assert!(window_fraction(&x, 10.0) >= 0.25);
    }
}
