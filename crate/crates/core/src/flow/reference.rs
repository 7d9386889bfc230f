//! Reference integrator in the logarithmic coordinate r.
//!
//! Evolves φ_t = φ_rr/φ_r + φ_r/φ − 2 on a truncated window [r₀, r₁] with the
//! Calabi-type conditions ∂_r log φ_r = +1 at r₀ and −1 at r₁, imposed through
//! exponential ghost nodes. The diffusion term is implicit (one tridiagonal
//! solve per step) because 1/φ_r is huge at the window ends. The endpoint values
//! approximate a(t) and b(t) without imposing them.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{GeometryError, LogProfile};
use crate::math::exp;

#[derive(Debug, Clone)]
pub struct ReferenceEngine {
    r: Vec<f64>,
    phi: Vec<f64>,
    h: f64,
    t: f64,
}

impl ReferenceEngine {
    /// Uniform grid of `n` nodes on `window`, initialized from `phi0(r)`.
    pub fn new(window: (f64, f64), n: usize, phi0: impl Fn(f64) -> f64) -> Self {
        let h = (window.1 - window.0) / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|i| window.0 + h * i as f64).collect();
        let phi = r.iter().map(|&x| phi0(x)).collect();
        ReferenceEngine { r, phi, h, t: 0.0 }
    }

    /// The parabola u = (f − a)(b − f)/(b − a) in r: φ = (a + b·e^r)/(1 + e^r).
    pub fn parabola(a: f64, b: f64, window: (f64, f64), n: usize) -> Self {
        Self::new(window, n, |r| {
            if r > 0.0 {
                let e = exp(-r);
                (a * e + b) / (e + 1.0)
            } else {
                let e = exp(r);
                (a + b * e) / (1.0 + e)
            }
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// (φ(r₀), φ(r₁)).
    pub fn endpoint_values(&self) -> (f64, f64) {
        (self.phi[0], self.phi[self.phi.len() - 1])
    }

    fn ghosts(&self) -> (f64, f64) {
        let n = self.phi.len();
        let q = exp(-self.h);
        let p = &self.phi;
        (p[0] - q * (p[1] - p[0]), p[n - 1] + q * (p[n - 1] - p[n - 2]))
    }

    /// Central φ_r including the ghost nodes.
    pub fn phi_r(&self) -> Vec<f64> {
        let n = self.phi.len();
        let (gl, gr) = self.ghosts();
        (0..n)
            .map(|i| {
                let lo = if i == 0 { gl } else { self.phi[i - 1] };
                let hi = if i == n - 1 { gr } else { self.phi[i + 1] };
                (hi - lo) / (2.0 * self.h)
            })
            .collect()
    }

    /// One linearly implicit step.
    pub fn step(&mut self, dt: f64) {
        let n = self.phi.len();
        let pr = self.phi_r();
        let q = exp(-self.h);
        let h2 = self.h * self.h;
        // Row i: φ_i − c_i·(Δφ)_i = φ_i^n + dt(φ_r/φ − 2), c_i = dt/(h² φ_r).
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let c = dt / (h2 * pr[i]);
            rhs[i] = self.phi[i] + dt * (pr[i] / self.phi[i] - 2.0);
            if i == 0 {
                // Δφ₀ = (1 − q)(φ₁ − φ₀).
                diag[i] = 1.0 + c * (1.0 - q);
                upper[i] = -c * (1.0 - q);
            } else if i == n - 1 {
                // Δφ_N = (1 − q)(φ_{N−1} − φ_N).
                diag[i] = 1.0 + c * (1.0 - q);
                lower[i] = -c * (1.0 - q);
            } else {
                lower[i] = -c;
                diag[i] = 1.0 + 2.0 * c;
                upper[i] = -c;
            }
        }
        thomas(&lower, &mut diag, &upper, &mut rhs);
        self.phi = rhs;
        self.t += dt;
    }

    pub fn advance_to(&mut self, t_end: f64, dt: f64) {
        while self.t < t_end - 1e-14 {
            let h = dt.min(t_end - self.t);
            self.step(h);
        }
    }

    pub fn to_log_profile(&self) -> Result<LogProfile, GeometryError> {
        LogProfile::with_derivative(self.r.clone(), self.phi.clone(), self.phi_r())
    }
}

/// Solves a tridiagonal system in place; the solution is left in `rhs`.
fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_closed_form_matches_logistic() {
        let e = ReferenceEngine::parabola(1.0, 10.0, (-14.0, 14.0), 281);
        let (l, r) = e.endpoint_values();
        assert!((l - 1.0).abs() < 1e-5 && (r - 10.0).abs() < 1e-5);
    }

    #[test]
    fn thomas_solves_small_system() {
        let lower = [0.0, 1.0, 1.0];
        let mut diag = [4.0, 4.0, 4.0];
        let upper = [1.0, 1.0, 0.0];
        let mut rhs = [5.0, 6.0, 5.0];
        thomas(&lower, &mut diag, &upper, &mut rhs);
        for v in rhs {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
