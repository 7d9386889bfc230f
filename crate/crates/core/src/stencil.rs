//! Finite-difference derivatives on nonuniform grids.
//!
//! Interior nodes use the exact three-point nonuniform weights. An endpoint
//! marked [`EndData::Degenerate`] carries the exact boundary slope; the endpoint
//! and its neighbour then take their derivatives from the cubic that matches
//! the boundary value, the boundary slope and the next two samples.

use alloc::vec;
use alloc::vec::Vec;

/// What is known analytically at one end of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndData {
    /// Exact slope at the endpoint (the sampled value is taken as exact too).
    Degenerate { slope: f64 },
    /// Nothing beyond the samples.
    Open,
}

/// First and second derivatives at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivs {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Three-point derivatives at the middle node.
#[inline]
pub fn central(hm: f64, hp: f64, um: f64, u0: f64, up: f64) -> (f64, f64) {
    let s = hm + hp;
    let d1 = -hp / (hm * s) * um + (hp - hm) / (hm * hp) * u0 + hm / (hp * s) * up;
    let d2 = 2.0 * (um / (hm * s) - u0 / (hm * hp) + up / (hp * s));
    (d1, d2)
}

/// Coefficients `(c2, c3)` of `p(ξ) = u0 + slope·ξ + c2 ξ² + c3 ξ³` through
/// `(h1, u1)` and `(h2, u2)`.
#[inline]
fn hermite_cubic(u0: f64, slope: f64, h1: f64, u1: f64, h2: f64, u2: f64) -> (f64, f64) {
    let a = u1 - u0 - slope * h1;
    let b = u2 - u0 - slope * h2;
    let det = h1 * h1 * h2 * h2 * (h2 - h1);
    let c2 = (a * h2 * h2 * h2 - b * h1 * h1 * h1) / det;
    let c3 = (b * h1 * h1 - a * h2 * h2) / det;
    (c2, c3)
}

/// Derivatives of the quadratic through three points, evaluated at `at`.
#[inline]
fn quadratic(xs: [f64; 3], us: [f64; 3], at: f64) -> (f64, f64) {
    let [x0, x1, x2] = xs;
    let [u0, u1, u2] = us;
    let w0 = 1.0 / ((x0 - x1) * (x0 - x2));
    let w1 = 1.0 / ((x1 - x0) * (x1 - x2));
    let w2 = 1.0 / ((x2 - x0) * (x2 - x1));
    let d1 = u0 * w0 * ((at - x1) + (at - x2))
        + u1 * w1 * ((at - x0) + (at - x2))
        + u2 * w2 * ((at - x0) + (at - x1));
    let d2 = 2.0 * (u0 * w0 + u1 * w1 + u2 * w2);
    (d1, d2)
}

/// Derivatives at the two nodes nearest the left end: `[(d1, d2) at 0, (d1, d2) at 1]`.
fn left_end(x: &[f64], u: &[f64], end: EndData) -> [(f64, f64); 2] {
    match end {
        EndData::Degenerate { slope } => {
            let h1 = x[1] - x[0];
            let h2 = x[2] - x[0];
            let (c2, c3) = hermite_cubic(u[0], slope, h1, u[1], h2, u[2]);
            [
                (slope, 2.0 * c2),
                (slope + 2.0 * c2 * h1 + 3.0 * c3 * h1 * h1, 2.0 * c2 + 6.0 * c3 * h1),
            ]
        }
        EndData::Open => {
            let xs = [x[0], x[1], x[2]];
            let us = [u[0], u[1], u[2]];
            [
                quadratic(xs, us, x[0]),
                central(x[1] - x[0], x[2] - x[1], u[0], u[1], u[2]),
            ]
        }
    }
}

fn right_end(x: &[f64], u: &[f64], end: EndData) -> [(f64, f64); 2] {
    let n = x.len();
    match end {
        EndData::Degenerate { slope } => {
            // Mirror: ξ = x_end − x, so dp/dξ at the end is −slope.
            let h1 = x[n - 1] - x[n - 2];
            let h2 = x[n - 1] - x[n - 3];
            let (c2, c3) = hermite_cubic(u[n - 1], -slope, h1, u[n - 2], h2, u[n - 3]);
            [
                (slope, 2.0 * c2),
                (
                    -(-slope + 2.0 * c2 * h1 + 3.0 * c3 * h1 * h1),
                    2.0 * c2 + 6.0 * c3 * h1,
                ),
            ]
        }
        EndData::Open => {
            let xs = [x[n - 3], x[n - 2], x[n - 1]];
            let us = [u[n - 3], u[n - 2], u[n - 1]];
            [
                quadratic(xs, us, x[n - 1]),
                central(
                    x[n - 2] - x[n - 3],
                    x[n - 1] - x[n - 2],
                    u[n - 3],
                    u[n - 2],
                    u[n - 1],
                ),
            ]
        }
    }
}

/// Fills `d1`, `d2` with derivatives of `u` over the grid `x` (at least 4 nodes).
pub fn derivatives_into(
    x: &[f64],
    u: &[f64],
    left: EndData,
    right: EndData,
    d1: &mut [f64],
    d2: &mut [f64],
) {
    let n = x.len();
    debug_assert!(n >= 4 && u.len() == n && d1.len() == n && d2.len() == n);
    for i in 1..n - 1 {
        let (a, b) = central(x[i] - x[i - 1], x[i + 1] - x[i], u[i - 1], u[i], u[i + 1]);
        d1[i] = a;
        d2[i] = b;
    }
    let l = left_end(x, u, left);
    let r = right_end(x, u, right);
    (d1[0], d2[0]) = l[0];
    (d1[1], d2[1]) = l[1];
    (d1[n - 1], d2[n - 1]) = r[0];
    (d1[n - 2], d2[n - 2]) = r[1];
}

pub fn derivatives(x: &[f64], u: &[f64], left: EndData, right: EndData) -> Derivs {
    let n = x.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    derivatives_into(x, u, left, right, &mut d1, &mut d2);
    Derivs { d1, d2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    fn graded(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                a + (b - a) * s * s * (3.0 - 2.0 * s) * 0.5 + (b - a) * s * 0.5
            })
            .collect()
    }

    #[test]
    fn quadratics_are_exact_on_interior_and_open_ends() {
        let x = graded(12, 1.0, 4.0);
        let u: Vec<f64> = x.iter().map(|&t| 3.0 * t * t - 2.0 * t + 0.5).collect();
        let d = derivatives(&x, &u, EndData::Open, EndData::Open);
        for (i, &t) in x.iter().enumerate() {
            assert!((d.d1[i] - (6.0 * t - 2.0)).abs() < 1e-10, "d1 at {i}");
            assert!((d.d2[i] - 6.0).abs() < 1e-9, "d2 at {i}");
        }
    }

    #[test]
    fn degenerate_ends_are_exact_for_cubics_with_matching_slope() {
        // u = (x-1)(4-x)(1 + (x-1)/10)/3 has u(1)=u(4)=0, u'(1)=1, u'(4)=-1.3.
        let x = graded(16, 1.0, 4.0);
        let p = |t: f64| (t - 1.0) * (4.0 - t) * (1.0 + (t - 1.0) / 10.0) / 3.0;
        let dp = |t: f64| {
            let h = 1e-6;
            (p(t + h) - p(t - h)) / (2.0 * h)
        };
        let u: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let d = derivatives(
            &x,
            &u,
            EndData::Degenerate { slope: dp(1.0) },
            EndData::Degenerate { slope: dp(4.0) },
        );
        for &i in &[0usize, 1, 14, 15] {
            assert!((d.d1[i] - dp(x[i])).abs() < 1e-8, "d1 at {i}: {} vs {}", d.d1[i], dp(x[i]));
        }
        // Second derivative of the cubic is linear: exact at the ends too.
        let ddp = |t: f64| {
            let h = 1e-4;
            (p(t + h) - 2.0 * p(t) + p(t - h)) / (h * h)
        };
        assert!((d.d2[0] - ddp(1.0)).abs() < 1e-5);
        assert!((d.d2[15] - ddp(4.0)).abs() < 1e-5);
    }

    #[test]
    fn central_weights_converge_at_second_order() {
        let err = |n: usize| {
            let x = graded(n, 0.0, 1.0);
            let u: Vec<f64> = x.iter().map(|&t| math::exp(t)).collect();
            let d = derivatives(&x, &u, EndData::Open, EndData::Open);
            (2..n - 2)
                .map(|i| (d.d2[i] - math::exp(x[i])).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(41);
        let e2 = err(81);
        // Nonuniform three-point d2 is first order in general; on smoothly
        // graded grids the leading term cancels to second order.
        assert!(e1 / e2 > 3.0, "ratio {}", e1 / e2);
    }
}
