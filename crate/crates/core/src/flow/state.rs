//! Snapshots of the two representations.

use alloc::vec::Vec;

use super::engine::{Engine, RightEnd};
use super::FlowError;
use crate::geometry::{end_data, GeometryError, RadialProfile};
use crate::math::{exp, ln};
use crate::stencil::{self, Derivs};

/// The unscaled profile u(·, t) on [a(t), b(t)].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub profile: RadialProfile,
    pub t: f64,
    /// Singular time T = a₀.
    pub singular_time: f64,
    /// r-coordinate of the tracked anchor point.
    pub anchor_r: f64,
    pub step: u64,
}

impl FlowState {
    pub fn a(&self) -> f64 {
        self.profile.a()
    }

    pub fn b(&self) -> f64 {
        self.profile.b()
    }

    pub fn tau(&self) -> f64 {
        -ln(self.singular_time - self.t)
    }
}

/// y(φ, τ) on [1, Φ] where Φ is Φ_max(τ) or a truncation of it.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedState {
    pub tau: f64,
    pub phi: Vec<f64>,
    pub y: Vec<f64>,
}

impl DilatedState {
    pub fn new(tau: f64, phi: Vec<f64>, y: Vec<f64>) -> Result<Self, GeometryError> {
        // Reuse the structural checks of a radial profile.
        let p = RadialProfile::new(phi, y)?;
        let (phi, y) = p.into_parts();
        Ok(DilatedState { tau, phi, y })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Right end of the represented domain.
    pub fn phi_end(&self) -> f64 {
        self.phi[self.phi.len() - 1]
    }

    /// y_φ and y_φφ with exact end data where y vanishes.
    pub fn derivatives(&self) -> Derivs {
        let (l, r) = end_data(&self.y);
        stencil::derivatives(&self.phi, &self.y, l, r)
    }

    pub fn to_profile(&self) -> Result<RadialProfile, GeometryError> {
        RadialProfile::new(self.phi.clone(), self.y.clone())
    }

    /// The unscaled state this dilated state corresponds to: f = e^{−τ}φ,
    /// u = e^{−τ}y, at t = T − e^{−τ}.
    pub fn undilate(&self, singular_time: f64) -> Result<FlowState, FlowError> {
        let a = exp(-self.tau);
        let f = self.phi.iter().map(|p| a * p).collect();
        let u = self.y.iter().map(|v| a * v).collect();
        Ok(FlowState {
            profile: RadialProfile::new(f, u)?,
            t: singular_time - a,
            singular_time,
            anchor_r: 0.0,
            step: 0,
        })
    }
}

/// Dilated view of an engine: (τ, φ_i, y_i) and the scale a = e^{−τ}
/// (a = 1 for a dilated engine).
pub(crate) fn dilated_view(e: &Engine, singular_time: f64) -> (f64, f64) {
    if e.is_dilated() {
        (e.time(), 1.0)
    } else {
        let a = singular_time - e.time();
        (-ln(a), a)
    }
}

impl Engine {
    /// Current state as a dilated snapshot.
    pub fn dilated_state(&self, singular_time: f64) -> DilatedState {
        let (tau, a) = dilated_view(self, singular_time);
        let phi = self.x().iter().map(|x| x / a).collect();
        let y = self.u().iter().map(|u| u / a).collect();
        DilatedState { tau, phi, y }
    }

    /// Current state in unscaled variables.
    pub fn flow_state(&self, singular_time: f64) -> Result<FlowState, FlowError> {
        let (tau, _) = dilated_view(self, singular_time);
        let scale = if self.is_dilated() { exp(-tau) } else { 1.0 };
        let f: Vec<f64> = self.x().iter().map(|x| x * scale).collect();
        let mut u: Vec<f64> = self.u().iter().map(|u| u * scale).collect();
        if self.right_end() == RightEnd::Calabi {
            let n = u.len();
            u[n - 1] = 0.0;
        }
        Ok(FlowState {
            profile: RadialProfile::new(f, u)?,
            t: singular_time - exp(-tau),
            singular_time,
            anchor_r: 0.0,
            step: self.steps(),
        })
    }
}
