//! Gauge tracking through an anchored point of the dilated profile.
//!
//! A point with fixed dilated coordinate ρ = r + τ moves in φ with speed
//!
//! ```text
//! Φ_τ|_ρ = φ − y + y_φ + y/φ − 2,
//! ```
//!
//! and the rest of the ρ-coordinate is recovered by ρ(φ) = ρ* + ∫_{φ*}^{φ} dφ/y.
//! The gauge C(τ) is minus the ρ of the level φ = 2, relative to its first
//! value; for a C-soliton it grows at rate C − 1. The anchor is re-seeded at
//! φ = 2 whenever it leaves [1.5, 4], splicing ρ* so that ρ(φ) is continuous.

use super::engine::Engine;
use super::state::{dilated_view, DilatedState};
use crate::geometry::{inverse_integral, log_inner_coefficient, RadialProfile};
use crate::math::bracket;
use crate::stencil::central;

/// Dilated level whose ρ defines the gauge.
pub const GAUGE_LEVEL: f64 = 2.0;
const ANCHOR_RANGE: (f64, f64) = (1.5, 4.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorRecord {
    pub tau: f64,
    pub phi_star: f64,
    pub rho_star: f64,
    /// r-coordinate of the anchor, ρ* − τ.
    pub anchor_r: f64,
    /// ρ at the level φ = 2.
    pub rho_two: f64,
    pub gauge_c: f64,
    /// log f_w(0, t) = lim_{φ→1} [log(φ − 1) − ρ].
    pub log_fw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorTracker {
    pub phi_star: f64,
    pub rho_star: f64,
    v_prev: Option<f64>,
    rho_two_first: Option<f64>,
    pub reanchors: u32,
}

/// φ-velocity of a fixed-ρ point.
#[inline]
pub fn anchor_velocity(phi: f64, y: f64, yp: f64) -> f64 {
    phi - y + yp + y / phi - 2.0
}

fn node_slope(x: &[f64], u: &[f64], i: usize, calabi_right: bool) -> f64 {
    let n = x.len();
    if i == 0 {
        1.0
    } else if i == n - 1 {
        if calabi_right {
            -1.0
        } else {
            (u[n - 1] - u[n - 2]) / (x[n - 1] - x[n - 2])
        }
    } else {
        central(x[i] - x[i - 1], x[i + 1] - x[i], u[i - 1], u[i], u[i + 1]).0
    }
}

/// (y, y_φ) at dilated coordinate `phi` of an engine's state.
pub fn sample(e: &Engine, singular_time: f64, phi: f64) -> (f64, f64) {
    let (_, a) = dilated_view(e, singular_time);
    let (x, u) = (e.x(), e.u());
    let target = a * phi;
    let k = bracket(x, target) - 1;
    let calabi = e.right_end() == super::engine::RightEnd::Calabi;
    let (d0, d1) = (node_slope(x, u, k, calabi), node_slope(x, u, k + 1, calabi));
    let h = x[k + 1] - x[k];
    let s = (target - x[k]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * u[k]
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * u[k + 1]
        + (s3 - s2) * h * d1;
    (v / a, d0 + s * (d1 - d0))
}

impl AnchorTracker {
    pub fn new(phi_star: f64, rho_star: f64) -> Self {
        AnchorTracker {
            phi_star,
            rho_star,
            v_prev: None,
            rho_two_first: None,
            reanchors: 0,
        }
    }

    fn velocity(e: &Engine, singular_time: f64, phi: f64) -> f64 {
        let (y, yp) = sample(e, singular_time, phi);
        anchor_velocity(phi, y, yp)
    }

    /// Primes the tracker on the state before the first step.
    pub fn start(&mut self, e: &Engine, singular_time: f64) {
        self.v_prev = Some(Self::velocity(e, singular_time, self.phi_star));
    }

    /// Advances φ* across one accepted step of length `dtau` (Heun).
    pub fn step(&mut self, e: &Engine, singular_time: f64, dtau: f64) {
        let v0 = match self.v_prev {
            Some(v) => v,
            None => Self::velocity(e, singular_time, self.phi_star),
        };
        let predictor = self.phi_star + dtau * v0;
        let v1 = Self::velocity(e, singular_time, predictor);
        self.phi_star += 0.5 * dtau * (v0 + v1);
        self.v_prev = Some(Self::velocity(e, singular_time, self.phi_star));
    }

    /// Re-seeds at φ = 2 if the anchor has drifted out of range.
    pub fn maybe_reanchor(&mut self, profile: &RadialProfile) {
        if self.phi_star >= ANCHOR_RANGE.0 && self.phi_star <= ANCHOR_RANGE.1 {
            return;
        }
        self.rho_star += inverse_integral(profile, self.phi_star, GAUGE_LEVEL);
        self.phi_star = GAUGE_LEVEL;
        self.v_prev = None;
        self.reanchors += 1;
    }

    /// Reconstructs the gauge quantities on a dilated snapshot.
    pub fn record(&mut self, d: &DilatedState) -> Option<AnchorRecord> {
        let profile = d.to_profile().ok()?;
        self.maybe_reanchor(&profile);
        let rho_two = self.rho_star + inverse_integral(&profile, self.phi_star, GAUGE_LEVEL);
        let first = *self.rho_two_first.get_or_insert(rho_two);
        let log_fw = log_inner_coefficient(&profile, self.phi_star, self.rho_star);
        Some(AnchorRecord {
            tau: d.tau,
            phi_star: self.phi_star,
            rho_star: self.rho_star,
            anchor_r: self.rho_star - d.tau,
            rho_two,
            gauge_c: -(rho_two - first),
            log_fw,
        })
    }
}
