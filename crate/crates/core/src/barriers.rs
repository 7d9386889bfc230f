//! Class-C membership, explicit barriers for the dilated equation, a runtime
//! sandwich monitor and a replayable comparison-principle harness.
//!
//! The dilated operator splits as E[y] = L[y] + Q[y] with
//!
//! ```text
//! L[y]    = (2 − φ)y_φ + y
//! Q[y]    = y·y_φφ − y_φ² − y²/φ²
//! M[y, s] = s·y_φφ + y·s_φφ − 2y_φ s_φ − 2ys/φ²
//! ```
//!
//! so that E[y + s] = E[y] + E[s] + M[y, s]. Since E[𝒴] = 0, the barriers
//! y₁ = 𝒴 − λ(τ)φ² and y₂ = 𝒴 + λ(τ)φ² have residuals that reduce to
//! closed forms in φ and λ.

use alloc::vec::Vec;

use thiserror::Error;

use crate::math::{abs, exp, SQRT_2};
use crate::soliton::fik;
use crate::stencil::{self, EndData};

/// Class-C coefficient in 𝒴 − φ²/5.
pub const LAMBDA_INIT: f64 = 0.2;
/// Absolute slack of the sandwich monitor.
pub const MONITOR_SLACK: f64 = 1e-8;
/// Smallest supersolution amplitude returned by [`fit_lambda0`].
pub const LAMBDA0_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("barrier δ must lie in (0, 1e-6] (got {0})")]
    Delta(f64),
    #[error("supersolution amplitude must be positive (got {0})")]
    Lambda0(f64),
    #[error("profile histories disagree in shape: {0}")]
    GridMismatch(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    pub delta: f64,
    pub lambda_init: f64,
    pub lambda0: f64,
}

impl BarrierParams {
    pub fn new(delta: f64, lambda0: f64) -> Result<Self, BarrierError> {
        if !(delta > 0.0 && delta <= 1e-6) {
            return Err(BarrierError::Delta(delta));
        }
        if !(lambda0 > 0.0) {
            return Err(BarrierError::Lambda0(lambda0));
        }
        Ok(BarrierParams {
            delta,
            lambda_init: LAMBDA_INIT,
            lambda0,
        })
    }

    /// λ(τ) of the subsolution.
    pub fn lambda_sub(&self, tau: f64) -> f64 {
        self.lambda_init * exp(-self.delta * tau)
    }

    /// λ(τ) of the supersolution.
    pub fn lambda_super(&self, tau: f64) -> f64 {
        self.lambda0 * exp(-0.5 * tau)
    }
}

/// A function and its first two φ-derivatives at one point.
pub type Jet = (f64, f64, f64);

/// The evaluators E, L, Q, M on pointwise jets.
pub struct OperatorSplit;

impl OperatorSplit {
    pub fn l(phi: f64, y: Jet) -> f64 {
        (2.0 - phi) * y.1 + y.0
    }

    pub fn q(phi: f64, y: Jet) -> f64 {
        y.0 * y.2 - y.1 * y.1 - y.0 * y.0 / (phi * phi)
    }

    pub fn e(phi: f64, y: Jet) -> f64 {
        Self::l(phi, y) + Self::q(phi, y)
    }

    pub fn m(phi: f64, y: Jet, s: Jet) -> f64 {
        s.0 * y.2 + y.0 * s.2 - 2.0 * y.1 * s.1 - 2.0 * y.0 * s.0 / (phi * phi)
    }
}

/// The jet of c·φ².
fn quadratic_jet(c: f64, phi: f64) -> Jet {
    (c * phi * phi, 2.0 * c * phi, 2.0 * c)
}

/// y − (𝒴 − φ²/5) minimized over nodes; membership needs a positive margin.
pub fn class_c_check(phi: &[f64], y: &[f64]) -> (bool, f64) {
    let margin = phi
        .iter()
        .zip(y)
        .map(|(&p, &v)| v - (fik(p).0 - LAMBDA_INIT * p * p))
        .fold(f64::INFINITY, f64::min);
    (margin > 0.0, margin)
}

/// y₁ = 𝒴 − (1/5)e^{−δτ}φ².
pub fn barrier_y1(phi: f64, tau: f64, p: &BarrierParams) -> f64 {
    fik(phi).0 - p.lambda_sub(tau) * phi * phi
}

/// y₂ = 𝒴 + λ₀e^{−τ/2}φ².
pub fn barrier_y2(phi: f64, tau: f64, p: &BarrierParams) -> f64 {
    fik(phi).0 + p.lambda_super(tau) * phi * phi
}

/// (∂_τ − E)[𝒴 − λφ²] with λ′ = −δλ, in closed form.
pub fn barrier_residual_sub(phi: f64, lambda: f64, delta: f64) -> f64 {
    let k = 2.0 - SQRT_2;
    lambda * ((delta + 3.0 * lambda - 1.0) * phi * phi + 2.0 * k * phi - 3.0 * k / phi)
}

/// (∂_τ − E)[𝒴 + λφ²] with λ′ = −λ/2, in closed form.
pub fn barrier_residual_super(phi: f64, lambda: f64) -> f64 {
    let k = 2.0 - SQRT_2;
    lambda * ((0.5 + 3.0 * lambda) * phi * phi - 2.0 * k * phi + 3.0 * k / phi)
}

/// The same residual assembled from the operator split; `sign` is −1 for the
/// subsolution and +1 for the supersolution, `rate` is −λ′/λ.
pub fn barrier_residual_split(phi: f64, lambda: f64, rate: f64, sign: f64) -> f64 {
    let yf = fik(phi);
    let s = quadratic_jet(sign * lambda, phi);
    let dtau = -sign * rate * lambda * phi * phi;
    let e = OperatorSplit::e(phi, yf) + OperatorSplit::e(phi, s) + OperatorSplit::m(phi, yf, s);
    dtau - e
}

/// 1.1 × the smallest λ₀ with 𝒴 + λ₀φ² ≥ y at every node, floored.
pub fn fit_lambda0(phi: &[f64], y: &[f64]) -> f64 {
    let need = phi
        .iter()
        .zip(y)
        .map(|(&p, &v)| (v - fik(p).0) / (p * p))
        .fold(f64::NEG_INFINITY, f64::max);
    if need > 0.0 {
        (1.1 * need).max(LAMBDA0_FLOOR)
    } else {
        LAMBDA0_FLOOR
    }
}

/// y₁ < 0 at the outer end (b₀ − 3a₀)e^τ + 3 for τ sampled on [0, tau_max].
pub fn boundary_admissible(a0: f64, b0: f64, delta: f64, tau_max: f64) -> bool {
    let p = BarrierParams {
        delta,
        lambda_init: LAMBDA_INIT,
        lambda0: 1.0,
    };
    let gap = (b0 - 3.0 * a0) / a0;
    (0..=10_000).all(|k| {
        let tau = tau_max * k as f64 / 10_000.0;
        let edge = gap * exp(tau) + 3.0;
        barrier_y1(edge, tau, &p) < 0.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierKind {
    Sub,
    Super,
}

impl BarrierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BarrierKind::Sub => "sub",
            BarrierKind::Super => "super",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierViolation {
    pub step: u64,
    pub tau: f64,
    pub node_phi: f64,
    pub kind: BarrierKind,
    pub deficit: f64,
}

/// Checks y₁ ≤ y + slack and y ≤ y₂ + slack at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichMonitor {
    pub params: BarrierParams,
    pub slack: f64,
    pub violations: Vec<BarrierViolation>,
    /// Smallest y − y₁ and y₂ − y seen so far.
    pub min_gap_sub: f64,
    pub min_gap_super: f64,
    pub checks: u64,
}

impl SandwichMonitor {
    pub fn new(params: BarrierParams) -> Self {
        SandwichMonitor {
            params,
            slack: MONITOR_SLACK,
            violations: Vec::new(),
            min_gap_sub: f64::INFINITY,
            min_gap_super: f64::INFINITY,
            checks: 0,
        }
    }

    /// Checks nodes given in unscaled form: φ = x/a, y = u/a.
    pub fn check_scaled(&mut self, step: u64, tau: f64, x: &[f64], u: &[f64], a: f64) {
        let ls = self.params.lambda_sub(tau);
        let lp = self.params.lambda_super(tau);
        let inv = 1.0 / a;
        self.checks += 1;
        for (&xi, &ui) in x.iter().zip(u) {
            let phi = xi * inv;
            let y = ui * inv;
            let yf = fik(phi).0;
            let p2 = phi * phi;
            let gap_sub = y - (yf - ls * p2);
            let gap_super = yf + lp * p2 - y;
            if gap_sub < self.min_gap_sub {
                self.min_gap_sub = gap_sub;
            }
            if gap_super < self.min_gap_super {
                self.min_gap_super = gap_super;
            }
            if gap_sub < -self.slack {
                self.violations.push(BarrierViolation {
                    step,
                    tau,
                    node_phi: phi,
                    kind: BarrierKind::Sub,
                    deficit: -gap_sub,
                });
            }
            if gap_super < -self.slack {
                self.violations.push(BarrierViolation {
                    step,
                    tau,
                    node_phi: phi,
                    kind: BarrierKind::Super,
                    deficit: -gap_super,
                });
            }
        }
    }

    pub fn check(&mut self, step: u64, tau: f64, phi: &[f64], y: &[f64]) {
        self.check_scaled(step, tau, phi, y, 1.0);
    }
}

/// Profiles recorded at a sequence of times on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileHistory {
    pub phi: Vec<f64>,
    pub taus: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ProfileHistory {
    pub fn new(phi: Vec<f64>) -> Self {
        ProfileHistory {
            phi,
            taus: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, tau: f64, y: Vec<f64>) {
        self.taus.push(tau);
        self.values.push(y);
    }

    /// Samples `g(φ, τ)` at every recorded time of `like`.
    pub fn sample(like: &ProfileHistory, g: impl Fn(f64, f64) -> f64) -> Self {
        let values = like
            .taus
            .iter()
            .map(|&t| like.phi.iter().map(|&p| g(p, t)).collect())
            .collect();
        ProfileHistory {
            phi: like.phi.clone(),
            taus: like.taus.clone(),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time_index: usize,
    pub tau: f64,
    pub node: usize,
    pub phi: f64,
    /// y⁺ − y⁻ at the crossing (negative).
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub ordered: bool,
    /// One verdict per α of the ladder.
    pub per_alpha: Vec<(f64, bool, f64)>,
    /// y⁺ ≥ y⁻ at the first time.
    pub initially_ordered: bool,
    /// y⁺ ≥ y⁻ at both ends at every time.
    pub boundary_ordered: bool,
    /// One of the two histories obeys |y_φφ| ≤ C at every recorded time.
    pub second_derivative_bounded: bool,
    pub first_crossing: Option<Crossing>,
    pub lambda: f64,
}

/// Default α ladder, decreasing to 0.
pub const ALPHA_LADDER: [f64; 5] = [1e-1, 1e-2, 1e-4, 1e-6, 1e-9];

fn max_second_derivative(phi: &[f64], y: &[f64]) -> f64 {
    let d = stencil::derivatives(phi, y, EndData::Open, EndData::Open);
    d.d2.iter().map(|v| abs(*v)).fold(0.0, f64::max)
}

/// Evaluates w = e^{−λτ}(y⁺ − y⁻) + α with λ = C + 1.5 for each α of the
/// ladder; the pair is ordered iff min w ≥ α(1 − 1e−9) everywhere.
pub fn comparison_check(
    y_minus: &ProfileHistory,
    y_plus: &ProfileHistory,
    c_bound: f64,
    alphas: &[f64],
) -> Result<ComparisonVerdict, BarrierError> {
    if y_minus.phi.len() != y_plus.phi.len() || y_minus.phi.iter().zip(&y_plus.phi).any(|(a, b)| a != b) {
        return Err(BarrierError::GridMismatch("φ grids differ"));
    }
    if y_minus.taus != y_plus.taus {
        return Err(BarrierError::GridMismatch("record times differ"));
    }
    let n = y_minus.phi.len();
    if y_minus.values.iter().chain(&y_plus.values).any(|v| v.len() != n) {
        return Err(BarrierError::GridMismatch("profile length differs from grid"));
    }
    if alphas.is_empty() {
        return Err(BarrierError::GridMismatch("empty α ladder"));
    }
    let lambda = c_bound + 1.5;
    let mut first_crossing = None;
    'outer: for (k, (ym, yp)) in y_minus.values.iter().zip(&y_plus.values).enumerate() {
        for i in 0..n {
            let gap = yp[i] - ym[i];
            if gap < 0.0 {
                first_crossing = Some(Crossing {
                    time_index: k,
                    tau: y_minus.taus[k],
                    node: i,
                    phi: y_minus.phi[i],
                    gap,
                });
                break 'outer;
            }
        }
    }
    let per_alpha: Vec<(f64, bool, f64)> = alphas
        .iter()
        .map(|&alpha| {
            let mut min_w = f64::INFINITY;
            for (k, (ym, yp)) in y_minus.values.iter().zip(&y_plus.values).enumerate() {
                let decay = exp(-lambda * y_minus.taus[k]);
                for i in 0..n {
                    min_w = min_w.min(decay * (yp[i] - ym[i]) + alpha);
                }
            }
            (alpha, min_w >= alpha * (1.0 - 1e-9), min_w)
        })
        .collect();
    let ordered = per_alpha.iter().all(|p| p.1);
    let initially_ordered = y_minus
        .values
        .first()
        .zip(y_plus.values.first())
        .map(|(m, p)| m.iter().zip(p).all(|(a, b)| b >= a))
        .unwrap_or(true);
    let boundary_ordered = y_minus
        .values
        .iter()
        .zip(&y_plus.values)
        .all(|(m, p)| p[0] >= m[0] && p[n - 1] >= m[n - 1]);
    let bounded = |h: &ProfileHistory| {
        h.values
            .iter()
            .all(|v| max_second_derivative(&h.phi, v) <= c_bound)
    };
    let second_derivative_bounded = n >= 4 && (bounded(y_minus) || bounded(y_plus));
    Ok(ComparisonVerdict {
        ordered,
        per_alpha,
        initially_ordered,
        boundary_ordered,
        second_derivative_bounded,
        first_crossing,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_residual_examples() {
        let v = barrier_residual_sub(1.0, 0.2, 0.0);
        assert!((v - 0.2 * (-0.4 - (2.0 - SQRT_2))).abs() < 1e-15);
        assert!((v + 0.197157).abs() < 1e-6);
        let w = barrier_residual_sub(1.0, 1.0 / 3.0, 1.0);
        assert!((w - (SQRT_2 - 1.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn barrier_values() {
        let p = BarrierParams::new(1e-7, 1.0).unwrap();
        assert!((barrier_y1(1.0, 0.0, &p) + 0.2).abs() < 1e-15);
        assert!((barrier_y2(1.0, 0.0, &p) - 1.0).abs() < 1e-15);
        assert!(BarrierParams::new(2e-6, 1.0).is_err());
    }

    #[test]
    fn split_identities_on_quadratics() {
        for &phi in &[1.0, 2.5, 7.0] {
            let (l, q) = (OperatorSplit::l(phi, quadratic_jet(1.0, phi)), OperatorSplit::q(phi, quadratic_jet(1.0, phi)));
            assert!((l - (4.0 * phi - phi * phi)).abs() < 1e-12);
            assert!((q + 3.0 * phi * phi).abs() < 1e-12);
            let m = OperatorSplit::m(phi, fik(phi), quadratic_jet(1.0, phi));
            let expect = (3.0 * SQRT_2 - 6.0) / phi - 2.0 * SQRT_2 * phi;
            assert!((m - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn class_c_edge_cases() {
        let phi: Vec<f64> = (0..50).map(|i| 1.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = phi.iter().map(|&p| fik(p).0).collect();
        let (ok, margin) = class_c_check(&phi, &y);
        assert!(ok && (margin - 0.2).abs() < 1e-15);
        let y: Vec<f64> = phi.iter().map(|&p| fik(p).0 - 0.2 * p * p).collect();
        assert!(!class_c_check(&phi, &y).0);
    }
}
