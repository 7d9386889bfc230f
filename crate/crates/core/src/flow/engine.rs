//! Method-of-lines integrator for the profile equation on a moving log mesh.
//!
//! In (f, u) variables the flow φ_t = φ_rr/φ_r + φ_r/φ − 2 reads
//!
//! ```text
//! u_t|_f = u·u_ff − u_f² + 2u_f − u²/f²                           (unscaled, time t)
//! y_τ|_φ = y·y_φφ + (2 − φ − y_φ)y_φ + y(1 − y/φ²)              (dilated, time τ)
//! ```
//!
//! and the dilated right-hand side is the unscaled one plus y − φ·y_φ. Nodes
//! move with the interval ends; the semi-discrete system for the nodal values
//! picks up the frame term u_x·ẋ_i. The left end is always a Calabi end
//! (u = 0, u_x = 1) and is never evaluated; the right end is either a Calabi
//! end (u = 0, u_x = −1) or a prescribed value.

use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{self, RemeshPolicy, RemeshReport};
use super::FlowError;
use crate::math::{abs, exp};
use crate::stencil::{self, EndData};

/// Interval ends as functions of the engine time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bounds {
    /// [a₀ − t, b₀ − 3t].
    Shrinking { a0: f64, b0: f64 },
    /// The full dilated domain [1, gap·e^τ + 3], gap = b₀ − 3a₀.
    Expanding { gap: f64 },
    Fixed { lo: f64, hi: f64 },
}

impl Bounds {
    /// (L, R, L′, R′) at time `s`.
    #[inline]
    pub fn at(&self, s: f64) -> (f64, f64, f64, f64) {
        match *self {
            Bounds::Shrinking { a0, b0 } => (a0 - s, b0 - 3.0 * s, -1.0, -3.0),
            Bounds::Expanding { gap } => {
                let g = gap * exp(s);
                (1.0, g + 3.0, 0.0, g)
            }
            Bounds::Fixed { lo, hi } => (lo, hi, 0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightEnd {
    Calabi,
    Dirichlet,
}

/// Boundary value supplier for a Dirichlet right end.
pub trait RightValue {
    fn value(&self, time: f64) -> f64;
}

impl<F: Fn(f64) -> f64> RightValue for F {
    fn value(&self, time: f64) -> f64 {
        self(time)
    }
}

/// Zero right value, for Calabi ends.
pub struct NoRight;

impl RightValue for NoRight {
    fn value(&self, _: f64) -> f64 {
        0.0
    }
}

const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Clone)]
pub struct Engine {
    sigma: Vec<f64>,
    x: Vec<f64>,
    u: Vec<f64>,
    time: f64,
    bounds: Bounds,
    dilated: bool,
    right: RightEnd,
    cfl: f64,
    steps: u64,
    // Scratch.
    xs: Vec<f64>,
    us: Vec<f64>,
    k: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Engine {
    /// `u` holds the nodal values on the mesh implied by `sigma` and `bounds`
    /// at `time`; the end values are overwritten with their boundary data.
    pub fn new(
        sigma: Vec<f64>,
        mut u: Vec<f64>,
        time: f64,
        bounds: Bounds,
        dilated: bool,
        right: RightEnd,
        cfl: f64,
    ) -> Self {
        let n = sigma.len();
        assert!(n >= 8 && u.len() == n, "engine needs at least 8 matching nodes");
        let mut x = vec![0.0; n];
        let (l, r, _, _) = bounds.at(time);
        mesh::place(&sigma, l, r, &mut x);
        u[0] = 0.0;
        if right == RightEnd::Calabi {
            u[n - 1] = 0.0;
        }
        Engine {
            sigma,
            x,
            u,
            time,
            bounds,
            dilated,
            right,
            cfl,
            steps: 0,
            xs: vec![0.0; n],
            us: vec![0.0; n],
            k: vec![0.0; n],
            d1: vec![0.0; n],
            d2: vec![0.0; n],
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn is_dilated(&self) -> bool {
        self.dilated
    }

    pub fn right_end(&self) -> RightEnd {
        self.right
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn end_data(&self) -> (EndData, EndData) {
        let right = match self.right {
            RightEnd::Calabi => EndData::Degenerate { slope: -1.0 },
            RightEnd::Dirichlet => EndData::Open,
        };
        (EndData::Degenerate { slope: 1.0 }, right)
    }

    /// Nodal first and second derivatives of the current state.
    pub fn derivatives(&self) -> stencil::Derivs {
        let (l, r) = self.end_data();
        stencil::derivatives(&self.x, &self.u, l, r)
    }

    /// Fills `out[1..n−1]` with du_i/ds at time `s` for nodes `x`, values `u`.
    fn rhs(&mut self, s: f64, use_stage: bool) {
        let (l, r) = self.end_data();
        let (x, u) = if use_stage {
            (&self.xs, &self.us)
        } else {
            (&self.x, &self.u)
        };
        stencil::derivatives_into(x, u, l, r, &mut self.d1, &mut self.d2);
        let (lo, hi, dlo, dhi) = self.bounds.at(s);
        let gl = dlo / lo;
        let gr = dhi / hi - gl;
        let dil = if self.dilated { 1.0 } else { 0.0 };
        let n = x.len();
        for i in 1..n - 1 {
            let (xi, ui, ux, uxx) = (x[i], u[i], self.d1[i], self.d2[i]);
            let xdot = xi * (gl + self.sigma[i] * gr);
            self.k[i] = ui * uxx - ux * ux + 2.0 * ux - ui * ui / (xi * xi)
                + dil * (ui - xi * ux)
                + ux * xdot;
        }
    }

    /// Step size allowed by the diffusion and advection limits.
    pub fn stable_dt(&self) -> f64 {
        let d = self.derivatives();
        let (lo, hi, dlo, dhi) = self.bounds.at(self.time);
        let gl = dlo / lo;
        let gr = dhi / hi - gl;
        let dil = if self.dilated { 1.0 } else { 0.0 };
        let n = self.x.len();
        let mut dt = f64::INFINITY;
        for i in 1..n - 1 {
            let h = (self.x[i] - self.x[i - 1]).min(self.x[i + 1] - self.x[i]);
            let xdot = self.x[i] * (gl + self.sigma[i] * gr);
            let adv = abs(2.0 - 2.0 * d.d1[i]) + abs(xdot - dil * self.x[i]);
            let diff = self.u[i].max(0.0);
            if diff > 0.0 {
                dt = dt.min(h * h / diff);
            }
            if adv > 0.0 {
                dt = dt.min(h / adv);
            }
        }
        self.cfl * dt
    }

    fn place_stage(&mut self, s: f64) {
        let (l, r, _, _) = self.bounds.at(s);
        mesh::place(&self.sigma, l, r, &mut self.xs);
    }

    fn interior_positive(v: &[f64]) -> bool {
        v[1..v.len() - 1].iter().all(|&x| x > 0.0)
    }

    /// One RK2 (midpoint) step of size `dt` without retries. On success the
    /// state is advanced; on positivity loss it is left untouched.
    fn try_step(&mut self, dt: f64, rv: &dyn RightValue) -> bool {
        let n = self.x.len();
        let t0 = self.time;
        let tm = t0 + 0.5 * dt;
        let t1 = t0 + dt;
        let right_dirichlet = self.right == RightEnd::Dirichlet;
        self.rhs(t0, false);
        self.place_stage(tm);
        for i in 1..n - 1 {
            self.us[i] = self.u[i] + 0.5 * dt * self.k[i];
        }
        self.us[0] = 0.0;
        self.us[n - 1] = if right_dirichlet { rv.value(tm) } else { 0.0 };
        if !Self::interior_positive(&self.us) {
            return false;
        }
        self.rhs(tm, true);
        let mut ok = true;
        for i in 1..n - 1 {
            let v = self.u[i] + dt * self.k[i];
            ok &= v > 0.0 && v.is_finite();
            self.us[i] = v;
        }
        if !ok {
            return false;
        }
        self.us[n - 1] = if right_dirichlet { rv.value(t1) } else { 0.0 };
        self.u[1..].copy_from_slice(&self.us[1..]);
        self.time = t1;
        let (l, r, _, _) = self.bounds.at(t1);
        mesh::place(&self.sigma, l, r, &mut self.x);
        self.steps += 1;
        true
    }

    /// Advances by at most `dt`, halving on positivity loss. Returns the step
    /// actually taken.
    pub fn step(&mut self, dt: f64, rv: &dyn RightValue) -> Result<f64, FlowError> {
        if dt == 0.0 {
            return Ok(0.0);
        }
        let mut h = dt;
        for _ in 0..=MAX_HALVINGS {
            if self.try_step(h, rv) {
                return Ok(h);
            }
            h *= 0.5;
        }
        Err(FlowError::Positivity {
            step: self.steps,
            time: self.time,
        })
    }

    /// Steps until `target`, landing on it exactly. `on_step` sees the state
    /// after every accepted step together with the step size.
    pub fn advance_to(
        &mut self,
        target: f64,
        rv: &dyn RightValue,
        on_step: &mut dyn FnMut(&Engine, f64),
    ) -> Result<(), FlowError> {
        while self.time < target {
            let remaining = target - self.time;
            let mut dt = self.stable_dt();
            let last = dt >= remaining;
            if last {
                dt = remaining;
            } else if dt > 0.5 * remaining {
                dt = 0.5 * remaining;
            }
            let taken = self.step(dt, rv)?;
            if last && taken == dt {
                self.time = target;
                let (l, r, _, _) = self.bounds.at(target);
                mesh::place(&self.sigma, l, r, &mut self.x);
            }
            on_step(self, taken);
        }
        Ok(())
    }

    /// Replaces the mesh by `policy.nodes` nodes with `policy.grading`, keeping
    /// end values and slopes exact.
    pub fn remesh(&mut self, policy: &RemeshPolicy) -> RemeshReport {
        let n_old = self.x.len();
        let sigma = mesh::sigma_grid(policy.nodes, policy.grading);
        let (l, r, _, _) = self.bounds.at(self.time);
        let mut x = vec![0.0; policy.nodes];
        mesh::place(&sigma, l, r, &mut x);
        let right_slope = match self.right {
            RightEnd::Calabi => Some(-1.0),
            RightEnd::Dirichlet => None,
        };
        let (mut u, err) = mesh::transfer(&self.x, &self.u, &x, Some(1.0), right_slope);
        let m = u.len();
        u[0] = 0.0;
        u[m - 1] = if self.right == RightEnd::Calabi { 0.0 } else { self.u[n_old - 1] };
        let fraction = mesh::window_fraction(&x, policy.window_k);
        *self = Engine::new(sigma, u, self.time, self.bounds, self.dilated, self.right, self.cfl)
            .with_steps(self.steps);
        RemeshReport {
            old_nodes: n_old,
            new_nodes: policy.nodes,
            grading: policy.grading,
            window_fraction: fraction,
            error_estimate: err,
        }
    }

    fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps;
        self
    }

    /// Freezes an expanding dilated domain at its current extent and switches
    /// the right end to a prescribed value.
    pub fn truncate_here(&mut self) {
        let (l, r, _, _) = self.bounds.at(self.time);
        self.bounds = Bounds::Fixed { lo: l, hi: r };
        self.right = RightEnd::Dirichlet;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::fik;

    #[test]
    fn zero_step_is_identity() {
        let sigma = mesh::sigma_grid(64, 1.0);
        let x = mesh::log_mesh(64, 1.0, 1.0, 10.0);
        let u: Vec<f64> = x.iter().map(|&f| (f - 1.0) * (10.0 - f) / 9.0).collect();
        let mut e = Engine::new(sigma, u, 0.0, Bounds::Shrinking { a0: 1.0, b0: 10.0 }, false, RightEnd::Calabi, 0.4);
        let before = e.u().to_vec();
        assert_eq!(e.step(0.0, &NoRight).unwrap(), 0.0);
        assert_eq!(e.u(), &before[..]);
    }

    #[test]
    fn fik_is_nearly_stationary_on_a_short_run() {
        let n = 256;
        let sigma = mesh::sigma_grid(n, 1.0);
        let x = mesh::log_mesh(n, 1.0, 1.0, 50.0);
        let y: Vec<f64> = x.iter().map(|&p| fik(p).0).collect();
        let edge = fik(50.0).0;
        let mut e = Engine::new(sigma, y.clone(), 0.0, Bounds::Fixed { lo: 1.0, hi: 50.0 }, true, RightEnd::Dirichlet, 0.4);
        e.advance_to(0.1, &|_: f64| edge, &mut |_, _| {}).unwrap();
        let drift = e.u().iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-3, "drift {drift}");
        assert_eq!(e.time(), 0.1);
    }
}
