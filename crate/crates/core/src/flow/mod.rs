//! Kähler–Ricci flow of the profile, up to just before the singular time.
//!
//! Two engines share one integrator ([`engine::Engine`]): the unscaled engine
//! evolves u(f, t) on [a₀ − t, b₀ − 3t], the dilated engine evolves
//! y(φ, τ) = e^τ u(e^{−τ}φ) with τ = −log(T − t), T = a₀. [`run::run_flow`]
//! drives either or both and collects diagnostics.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{GeometryError, KahlerClass, RadialProfile};
use crate::soliton::SolitonError;

pub mod anchor;
pub mod engine;
pub mod initial;
pub mod mesh;
pub mod reference;
pub mod run;
pub mod state;

pub use anchor::{AnchorRecord, AnchorTracker};
pub use engine::{Bounds, Engine, RightEnd};
pub use initial::{make_initial, InitialData};
pub use mesh::{RemeshPolicy, RemeshReport};
pub use run::{run_flow, RunArtifacts, RunStatus, Snapshot};
pub use state::{DilatedState, FlowState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid `{key}`: {message}")]
    Config { key: &'static str, message: String },
    #[error("initial data outside class C (margin {margin:e})")]
    OutsideClassC { margin: f64 },
    #[error("Ricci positivity lost (min eigenvalue {min_ricci:e})")]
    RicciPositivityLost { min_ricci: f64 },
    #[error("flow positivity failure at step {step} (time {time})")]
    Positivity { step: u64, time: f64 },
    #[error("t = {t} is not before the singular time {singular}")]
    PastSingularTime { t: f64, singular: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
}

fn config_error(key: &'static str, message: impl Into<String>) -> FlowError {
    FlowError::Config {
        key,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialKind {
    /// u₀(f) = (f − a₀)(b₀ − f)/(b₀ − a₀).
    Parabola,
    /// The Cao–Koiso profile stretched near Σ∞ to reach b₀ (b₀ = 3a₀ gives the
    /// soliton itself).
    CaoKoisoPerturbed,
    /// A user-supplied profile on [a₀, b₀].
    Profile(RadialProfile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Unscaled,
    Dilated,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBc {
    /// Full dilated domain with the Calabi end at Φ_max(τ).
    PinnedExact,
    /// Full domain until Φ_max reaches Φ_cut, then [1, Φ_cut] with the value
    /// at Φ_cut taken from a concurrently running unscaled engine.
    FromUnscaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub kahler_class: KahlerClass,
    pub initial_kind: InitialKind,
    pub grid_n: usize,
    pub grading: f64,
    pub cfl: f64,
    pub stop_tau: f64,
    pub engine: EngineKind,
    pub remesh_interval: u64,
    pub barrier_delta: f64,
    pub perturbation_eps: f64,
    pub anchor_f_ref: f64,
    pub outer_bc: OuterBc,
    pub phi_cut: f64,
    /// Right edge of the convergence window [1, window_phi].
    pub window_phi: f64,
    pub record_dtau: f64,
    pub snapshot_taus: Vec<f64>,
}

pub const MIN_GRID_N: usize = 128;
pub const MAX_BARRIER_DELTA: f64 = 1e-6;

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            kahler_class: KahlerClass::new(1.0, 10.0).expect("valid default class"),
            initial_kind: InitialKind::Parabola,
            grid_n: 2048,
            grading: 1.0,
            cfl: 0.4,
            stop_tau: 6.5,
            engine: EngineKind::Both,
            remesh_interval: 200,
            barrier_delta: 1e-7,
            perturbation_eps: 1.5,
            anchor_f_ref: 2.0,
            outer_bc: OuterBc::FromUnscaled,
            phi_cut: 50.0,
            window_phi: 3.0,
            record_dtau: 0.01,
            snapshot_taus: Vec::new(),
        }
    }
}

impl FlowConfig {
    pub fn a0(&self) -> f64 {
        self.kahler_class.a()
    }

    pub fn b0(&self) -> f64 {
        self.kahler_class.b()
    }

    /// Dilated time at t = 0.
    pub fn initial_tau(&self) -> f64 {
        -crate::math::ln(self.a0())
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let (a, b) = (self.a0(), self.b0());
        let exact_soliton = matches!(self.initial_kind, InitialKind::CaoKoisoPerturbed) && b == 3.0 * a;
        if !(b > 3.0 * a) && !exact_soliton {
            return Err(config_error(
                "kahler_class",
                alloc::format!("requires b > 3a (got a = {a}, b = {b})"),
            ));
        }
        if self.grid_n < MIN_GRID_N {
            return Err(config_error(
                "grid_n",
                alloc::format!("must be at least {MIN_GRID_N} (got {})", self.grid_n),
            ));
        }
        if !(self.grading >= 1.0) {
            return Err(config_error("grading", "must be at least 1"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(config_error("cfl", "must lie in (0, 0.5]"));
        }
        if !(self.stop_tau >= 0.0 && self.stop_tau.is_finite()) {
            return Err(config_error("stop_tau", "must be finite and nonnegative"));
        }
        if self.stop_tau <= self.initial_tau() {
            return Err(config_error("stop_tau", "must exceed the initial dilated time -log a"));
        }
        if !(self.barrier_delta > 0.0 && self.barrier_delta <= MAX_BARRIER_DELTA) {
            return Err(config_error("barrier_delta", "must lie in (0, 1e-6]"));
        }
        if !(self.perturbation_eps > 0.0 && self.perturbation_eps <= 2.0) {
            return Err(config_error("perturbation_eps", "must lie in (0, 2]"));
        }
        if !(self.anchor_f_ref > a && self.anchor_f_ref < b) {
            return Err(config_error("anchor_f_ref", "must lie strictly inside (a, b)"));
        }
        if !(self.phi_cut > 3.0) {
            return Err(config_error("phi_cut", "must exceed 3"));
        }
        if !(self.window_phi > 1.0) {
            return Err(config_error("window_phi", "must exceed 1"));
        }
        if !(self.record_dtau > 0.0) {
            return Err(config_error("record_dtau", "must be positive"));
        }
        if self.remesh_interval == 0 {
            return Err(config_error("remesh_interval", "must be positive"));
        }
        Ok(())
    }
}
