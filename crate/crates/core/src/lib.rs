//! Rotationally symmetric (U(2)-invariant) Kähler–Ricci flow on the one-point
//! blow-up of CP², written in terms of the radial profile of the metric
//! potential.
//!
//! A U(2)-invariant Kähler metric is encoded by a single increasing function
//! φ(r) of the logarithmic radius r = log|z|². Everything in this crate works
//! with the equivalent pair (f, u) where f = φ and u = φ_r regarded as a function
//! of f, which turns the infinite r-line into the finite interval [a, b] of the
//! Kähler class and exposes the degenerate endpoints u = 0, u_f = ±1.
//!
//! The crate is `no_std` (it only needs `alloc`). IO, configuration files and
//! the command-line driver live in the companion `krf` crate.
//!
//! Modules:
//! - [`geometry`]: profiles, validation, coordinate changes, curvature.
//! - [`soliton`]: the FIK and Cao–Koiso shrinking solitons and their constants.
//! - [`flow`]: unscaled and parabolically dilated flow engines, run orchestration.
//! - [`analysis`]: dilation, convergence errors, blow-up rate fits.
//! - [`barriers`]: class-C test, sub/supersolution barriers, comparison harness.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod barriers;
pub mod flow;
pub mod geometry;
pub mod interp;
pub mod math;
pub mod quad;
pub mod soliton;
pub mod stencil;

pub use geometry::{CurvatureReport, KahlerClass, LogProfile, RadialProfile};
