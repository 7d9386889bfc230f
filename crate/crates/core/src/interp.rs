//! Monotone piecewise-cubic Hermite interpolation (PCHIP).

use alloc::vec;
use alloc::vec::Vec;

use crate::math::bracket;

#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Builds the interpolant. `left_slope` / `right_slope` override the
    /// shape-preserving end slopes when the true values are known.
    pub fn new(x: &[f64], y: &[f64], left_slope: Option<f64>, right_slope: Option<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n, "pchip needs at least two matching samples");
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (dm, dp) = (delta[k - 1], delta[k]);
                if dm * dp <= 0.0 {
                    d[k] = 0.0;
                } else {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / dm + w2 / dp);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        if let Some(s) = left_slope {
            d[0] = s;
        }
        if let Some(s) = right_slope {
            d[n - 1] = s;
        }
        Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`; outside the sample range the end cubic is extrapolated.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_slope(t).0
    }

    /// Value and first derivative at `t`.
    pub fn eval_with_slope(&self, t: f64) -> (f64, f64) {
        let k = bracket(&self.x, t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k], self.d[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let dv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (v, dv)
    }

    pub fn resample(&self, at: &[f64]) -> Vec<f64> {
        at.iter().map(|&t| self.eval(t)).collect()
    }
}

/// Shape-preserving three-point end slope.
fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 < 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_is_monotone_between_them() {
        let x = [0.0, 0.5, 1.0, 2.0, 3.5];
        let y = [0.0, 0.1, 0.9, 1.0, 1.0];
        let p = Pchip::new(&x, &y, None, None);
        for (xi, yi) in x.iter().zip(y) {
            assert!((p.eval(*xi) - yi).abs() < 1e-15);
        }
        let mut prev = p.eval(0.0);
        for i in 1..=700 {
            let v = p.eval(i as f64 * 0.005);
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn converges_on_smooth_data_with_exact_end_slopes() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            let y: Vec<f64> = x.iter().map(|&t| t * (1.0 - t)).collect();
            let p = Pchip::new(&x, &y, Some(1.0), Some(-1.0));
            (0..997)
                .map(|k| {
                    let t = k as f64 / 996.0;
                    (p.eval(t) - t * (1.0 - t)).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(65) < 1e-4);
        assert!(err(33) / err(65) > 3.5);
    }
}
