//! Calabi-ansatz profiles, their validity checks and curvature.
//!
//! A U(2)-invariant Kähler metric on C²∖{0} is determined by φ(r) = P_r(r),
//! r = log|z|², and is Kähler iff φ > 0 and φ_r > 0. It closes up to a metric on
//! the blow-up M with |Σ₀| = πa, |Σ∞| = πb when φ runs from a (r → −∞) to b
//! (r → +∞) with the Calabi expansions at both ends.
//!
//! [`LogProfile`] samples φ(r) directly; [`RadialProfile`] stores u(f) = φ_r as
//! a function of f = φ on [a, b]. In the latter form every smooth profile has
//! u(a) = u(b) = 0 and u_f(a) = 1, u_f(b) = −1, and the curvature reads
//!
//! ```text
//! ψ  = 2 − u/f − u_f          (= −∂_r log det g)
//! λ₁ = ψ / f
//! λ₂ = ψ_f = −u_f/f + u/f² − u_ff
//! R  = 2(λ₁ + λ₂)
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::math::{abs, ln};
use crate::stencil::{self, Derivs, EndData};

/// Minimum node count for [`RadialProfile::validate`] and [`LogProfile::validate`].
pub const MIN_VALIDATE_NODES: usize = 8;
/// Minimum node count for second-derivative quantities.
pub const MIN_CURVATURE_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("Kähler class requires 0 < a < b (got a = {a}, b = {b})")]
    InvalidClass { a: f64, b: f64 },
    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("grid and values differ in length ({grid} vs {values})")]
    LengthMismatch { grid: usize, values: usize },
    #[error("grid is not strictly increasing at node {index}")]
    NonMonotoneGrid { index: usize },
    #[error("non-finite sample at node {index}")]
    NonFinite { index: usize },
    #[error("degenerate input: φ_r = {value} ≤ 0 at interior node {index}")]
    Degenerate { index: usize, value: f64 },
    #[error("anchor f_ref = {f_ref} must lie strictly inside ({a}, {b})")]
    AnchorNotInterior { f_ref: f64, a: f64, b: f64 },
    #[error("invalid Calabi asymptotics: {0}")]
    InvalidAsymptotics(&'static str),
}

/// The Kähler class b[Σ∞] − a[Σ₀]: |Σ₀| = πa and |Σ∞| = πb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KahlerClass {
    a: f64,
    b: f64,
}

impl KahlerClass {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(GeometryError::InvalidClass { a, b });
        }
        Ok(KahlerClass { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// True when Σ₀ collapses first (b > 3a).
    pub fn singular_regime(&self) -> bool {
        self.b > 3.0 * self.a
    }

    /// Time at which a(t) reaches zero.
    pub fn singular_time(&self) -> f64 {
        self.a
    }

    /// a(t) = a − t.
    pub fn a_at(&self, t: f64) -> f64 {
        self.a - t
    }

    /// b(t) = b − 3t.
    pub fn b_at(&self, t: f64) -> f64 {
        self.b - 3.0 * t
    }

    /// Right end of the dilated domain, (b − 3a)e^τ + 3.
    pub fn dilated_outer(&self, tau: f64) -> f64 {
        (self.b - 3.0 * self.a) * crate::math::exp(tau) + 3.0
    }
}

/// One violated invariant of a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositivePhi { index: usize, value: f64 },
    NonPositivePhiR { index: usize, value: f64 },
    PhiNotIncreasing { index: usize },
    LeftValue { value: f64 },
    RightValue { value: f64 },
    LeftSlope { slope: f64, tolerance: f64 },
    RightSlope { slope: f64, tolerance: f64 },
    InteriorNonPositive { index: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositivePhi { index, value } => {
                write!(f, "φ ≤ 0 at node {index} (φ = {value})")
            }
            Violation::NonPositivePhiR { index, value } => {
                write!(f, "φ_r ≤ 0 at interior node {index} (φ_r = {value})")
            }
            Violation::PhiNotIncreasing { index } => {
                write!(f, "φ not strictly increasing at node {index}")
            }
            Violation::LeftValue { value } => write!(f, "u(a) ≠ 0 (u(a) = {value})"),
            Violation::RightValue { value } => write!(f, "u(b) ≠ 0 (u(b) = {value})"),
            Violation::LeftSlope { slope, tolerance } => {
                write!(f, "u_f(a) ≠ +1 (u_f(a) = {slope}, tolerance {tolerance})")
            }
            Violation::RightSlope { slope, tolerance } => {
                write!(f, "u_f(b) ≠ −1 (u_f(b) = {slope}, tolerance {tolerance})")
            }
            Violation::InteriorNonPositive { index, value } => {
                write!(f, "u ≤ 0 at interior node {index} (u = {value})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_grid(x: &[f64], values: &[f64], min_nodes: usize) -> Result<(), GeometryError> {
    if x.len() != values.len() {
        return Err(GeometryError::LengthMismatch {
            grid: x.len(),
            values: values.len(),
        });
    }
    if x.len() < min_nodes {
        return Err(GeometryError::TooFewNodes {
            needed: min_nodes,
            got: x.len(),
        });
    }
    for (i, (&xi, &vi)) in x.iter().zip(values).enumerate() {
        if !xi.is_finite() || !vi.is_finite() {
            return Err(GeometryError::NonFinite { index: i });
        }
    }
    if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
        return Err(GeometryError::NonMonotoneGrid { index: i + 1 });
    }
    Ok(())
}

/// End data implied by the samples: an exactly vanishing end value means the
/// Calabi end, whose slope is known analytically.
pub fn end_data(u: &[f64]) -> (EndData, EndData) {
    let left = if u[0] == 0.0 {
        EndData::Degenerate { slope: 1.0 }
    } else {
        EndData::Open
    };
    let right = if u[u.len() - 1] == 0.0 {
        EndData::Degenerate { slope: -1.0 }
    } else {
        EndData::Open
    };
    (left, right)
}

/// u(f) = φ_r sampled over f = φ ∈ [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    f: Vec<f64>,
    u: Vec<f64>,
}

impl RadialProfile {
    /// Checks lengths and finiteness only; use [`RadialProfile::validate`] for
    /// the Calabi invariants.
    pub fn new(f: Vec<f64>, u: Vec<f64>) -> Result<Self, GeometryError> {
        if f.len() != u.len() {
            return Err(GeometryError::LengthMismatch {
                grid: f.len(),
                values: u.len(),
            });
        }
        if f.len() < 4 {
            return Err(GeometryError::TooFewNodes {
                needed: 4,
                got: f.len(),
            });
        }
        if let Some(i) = f.iter().zip(&u).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(GeometryError::NonFinite { index: i });
        }
        Ok(RadialProfile { f, u })
    }

    /// Samples `u` on `f`, forcing exact zeros at the ends.
    pub fn from_fn(f: Vec<f64>, u: impl Fn(f64) -> f64) -> Result<Self, GeometryError> {
        let n = f.len();
        let mut vals: Vec<f64> = f.iter().map(|&x| u(x)).collect();
        if n > 0 {
            vals[0] = 0.0;
            vals[n - 1] = 0.0;
        }
        Self::new(f, vals)
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Left end a.
    pub fn a(&self) -> f64 {
        self.f[0]
    }

    /// Right end b.
    pub fn b(&self) -> f64 {
        self.f[self.f.len() - 1]
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.f, self.u)
    }

    /// Nodal u_f and u_ff, using exact end data where u vanishes.
    pub fn derivatives(&self) -> Derivs {
        let (l, r) = end_data(&self.u);
        stencil::derivatives(&self.f, &self.u, l, r)
    }

    /// Lists every violated invariant. A non-monotone grid is a structural
    /// error rather than a violation.
    pub fn validate(&self) -> Result<ValidationReport, GeometryError> {
        check_grid(&self.f, &self.u, MIN_VALIDATE_NODES)?;
        let n = self.len();
        let mut violations = Vec::new();
        let (f, u) = (&self.f, &self.u);
        if u[0] != 0.0 {
            violations.push(Violation::LeftValue { value: u[0] });
        }
        if u[n - 1] != 0.0 {
            violations.push(Violation::RightValue { value: u[n - 1] });
        }
        // Sampled one-sided slopes, second order.
        let open = stencil::derivatives(f, u, EndData::Open, EndData::Open);
        let tol_l = 10.0 * (f[1] - f[0]);
        if abs(open.d1[0] - 1.0) > tol_l {
            violations.push(Violation::LeftSlope {
                slope: open.d1[0],
                tolerance: tol_l,
            });
        }
        let tol_r = 10.0 * (f[n - 1] - f[n - 2]);
        if abs(open.d1[n - 1] + 1.0) > tol_r {
            violations.push(Violation::RightSlope {
                slope: open.d1[n - 1],
                tolerance: tol_r,
            });
        }
        for (i, &v) in u.iter().enumerate().take(n - 1).skip(1) {
            if v <= 0.0 {
                violations.push(Violation::InteriorNonPositive { index: i, value: v });
            }
        }
        Ok(ValidationReport { violations })
    }
}

/// φ(r) sampled on a logarithmic radial grid, with φ_r stored alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProfile {
    r: Vec<f64>,
    phi: Vec<f64>,
    phi_r: Vec<f64>,
}

impl LogProfile {
    /// Derives φ_r with second-order differences.
    pub fn new(r: Vec<f64>, phi: Vec<f64>) -> Result<Self, GeometryError> {
        check_grid(&r, &phi, 4)?;
        let d = stencil::derivatives(&r, &phi, EndData::Open, EndData::Open);
        Ok(LogProfile {
            r,
            phi,
            phi_r: d.d1,
        })
    }

    pub fn with_derivative(
        r: Vec<f64>,
        phi: Vec<f64>,
        phi_r: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        check_grid(&r, &phi, 4)?;
        check_grid(&r, &phi_r, 4)?;
        Ok(LogProfile { r, phi, phi_r })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_r(&self) -> &[f64] {
        &self.phi_r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn validate(&self) -> Result<ValidationReport, GeometryError> {
        check_grid(&self.r, &self.phi, MIN_VALIDATE_NODES)?;
        let n = self.len();
        let mut violations = Vec::new();
        for (i, &p) in self.phi.iter().enumerate() {
            if p <= 0.0 {
                violations.push(Violation::NonPositivePhi { index: i, value: p });
            }
        }
        for i in 1..n - 1 {
            if self.phi_r[i] <= 0.0 {
                violations.push(Violation::NonPositivePhiR {
                    index: i,
                    value: self.phi_r[i],
                });
            }
        }
        for i in 1..n {
            if self.phi[i] <= self.phi[i - 1] {
                violations.push(Violation::PhiNotIncreasing { index: i });
            }
        }
        Ok(ValidationReport { violations })
    }

    /// Curvature from the r-coordinate formulas
    /// ψ = 2 − φ_r/φ − φ_rr/φ_r and λ₂ = ψ_r/φ_r, using differences in r.
    /// Used to cross-check the (f, u) route; end nodes use one-sided stencils.
    pub fn curvature_r(&self) -> Result<CurvatureReport, GeometryError> {
        check_grid(&self.r, &self.phi, MIN_CURVATURE_NODES)?;
        let n = self.len();
        let d = stencil::derivatives(&self.r, &self.phi, EndData::Open, EndData::Open);
        let psi: Vec<f64> = (0..n)
            .map(|i| 2.0 - self.phi_r[i] / self.phi[i] - d.d2[i] / self.phi_r[i])
            .collect();
        let dpsi = stencil::derivatives(&self.r, &psi, EndData::Open, EndData::Open);
        let lambda1: Vec<f64> = (0..n).map(|i| psi[i] / self.phi[i]).collect();
        let lambda2: Vec<f64> = (0..n).map(|i| dpsi.d1[i] / self.phi_r[i]).collect();
        let scalar = (0..n).map(|i| 2.0 * (lambda1[i] + lambda2[i])).collect();
        Ok(CurvatureReport {
            f: self.phi.clone(),
            psi,
            lambda1,
            lambda2,
            scalar,
            rm: Vec::new(),
        })
    }
}

/// u(f) = φ_r(r) at f = φ(r). The output grid is the image of φ.
pub fn to_radial(p: &LogProfile) -> Result<RadialProfile, GeometryError> {
    check_grid(&p.r, &p.phi, 4)?;
    let n = p.len();
    for i in 1..n - 1 {
        if p.phi_r[i] <= 0.0 {
            return Err(GeometryError::Degenerate {
                index: i,
                value: p.phi_r[i],
            });
        }
    }
    if let Some(i) = p.phi.windows(2).position(|w| w[1] <= w[0]) {
        return Err(GeometryError::NonMonotoneGrid { index: i + 1 });
    }
    RadialProfile::new(p.phi.clone(), p.phi_r.clone())
}

/// ∫₀^{s·h} of the cubic Hermite interpolant with end values `g0, g1` and end
/// slopes `d0, d1` on a cell of width `h`.
fn hermite_integral(h: f64, g0: f64, g1: f64, d0: f64, d1: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let i00 = s - s3 + 0.5 * s4;
    let i10 = 0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4;
    let i01 = s3 - 0.5 * s4;
    let i11 = 0.25 * s4 - s3 / 3.0;
    h * (g0 * i00 + h * d0 * i10 + g1 * i01 + h * d1 * i11)
}

/// Running integral of 1/u over the grid, split as an exact logarithmic part
/// for the Calabi ends plus a smooth remainder. Returns `(logpart, remainder)`
/// closures' ingredients: the remainder's cumulative integral at each node
/// and its samples and slopes.
struct InverseIntegral {
    left_deg: bool,
    right_deg: bool,
    a: f64,
    b: f64,
    g: Vec<f64>,
    dg: Vec<f64>,
    cumulative: Vec<f64>,
}

impl InverseIntegral {
    fn new(p: &RadialProfile) -> Self {
        let (f, u) = (p.f(), p.u());
        let n = f.len();
        let (left, right) = end_data(u);
        let left_deg = matches!(left, EndData::Degenerate { .. });
        let right_deg = matches!(right, EndData::Degenerate { .. });
        let (a, b) = (f[0], f[n - 1]);
        let q = |x: f64| match (left_deg, right_deg) {
            (true, true) => (x - a) * (b - x) / (b - a),
            (true, false) => x - a,
            (false, true) => b - x,
            (false, false) => 1.0,
        };
        let q2 = match (left_deg, right_deg) {
            (true, true) => -2.0 / (b - a),
            _ => 0.0,
        };
        let d = stencil::derivatives(f, u, left, right);
        let mut g = vec![0.0; n];
        for i in 0..n {
            let at_left = i == 0 && left_deg;
            let at_right = i == n - 1 && right_deg;
            g[i] = if at_left || at_right {
                0.5 * (q2 - d.d2[i])
            } else if left_deg || right_deg {
                let qi = q(f[i]);
                (qi - u[i]) / (u[i] * qi)
            } else {
                1.0 / u[i]
            };
        }
        let dg = stencil::derivatives(f, &g, EndData::Open, EndData::Open).d1;
        let mut cumulative = vec![0.0; n];
        for k in 0..n - 1 {
            let h = f[k + 1] - f[k];
            cumulative[k + 1] = cumulative[k] + hermite_integral(h, g[k], g[k + 1], dg[k], dg[k + 1], 1.0);
        }
        InverseIntegral {
            left_deg,
            right_deg,
            a,
            b,
            g,
            dg,
            cumulative,
        }
    }

    /// Antiderivative of 1/q at an interior point.
    fn log_part(&self, x: f64) -> f64 {
        let l = if self.left_deg { ln(x - self.a) } else { 0.0 };
        let r = if self.right_deg { -ln(self.b - x) } else { 0.0 };
        if !self.left_deg && !self.right_deg {
            0.0
        } else {
            l + r
        }
    }

    /// Remainder integral from the first node to `x`.
    fn remainder(&self, f: &[f64], x: f64) -> f64 {
        let k = crate::math::bracket(f, x) - 1;
        let h = f[k + 1] - f[k];
        let s = (x - f[k]) / h;
        self.cumulative[k] + hermite_integral(h, self.g[k], self.g[k + 1], self.dg[k], self.dg[k + 1], s)
    }

    /// ∫ 1/u from `x0` to `x1` (both interior, or open ends).
    fn between(&self, f: &[f64], x0: f64, x1: f64) -> f64 {
        let no_log = !self.left_deg && !self.right_deg;
        let lp = if no_log { 0.0 } else { self.log_part(x1) - self.log_part(x0) };
        lp + self.remainder(f, x1) - self.remainder(f, x0)
    }
}

/// ∫_{x0}^{x1} df/u(f) for points strictly inside a profile's degenerate ends.
pub fn inverse_integral(p: &RadialProfile, x0: f64, x1: f64) -> f64 {
    InverseIntegral::new(p).between(p.f(), x0, x1)
}

/// lim_{f→a} [log(f − a) − r(f)] where r is the log coordinate anchored by
/// r(f_ref) = r_ref. This is log f_w(0) in the coordinate w = e^r; the left end
/// must be a Calabi end.
pub fn log_inner_coefficient(p: &RadialProfile, f_ref: f64, r_ref: f64) -> f64 {
    // r(f) = r_ref + ∫_{f_ref}^{f} 1/u; split 1/u = 1/(f − a) + [1/u − 1/(f − a)].
    let ii = InverseIntegral::new(p);
    let f = p.f();
    let a = f[0];
    // Remainder from a to f_ref of 1/u − 1/q plus the log part of 1/q − 1/(f − a).
    let rem = ii.remainder(f, f_ref);
    let extra = if ii.right_deg {
        // 1/q − 1/(f − a) = 1/(b − f) for the two-ended q.
        -ln(ii.b - f_ref) + ln(ii.b - a)
    } else {
        0.0
    };
    -r_ref + ln(f_ref - a) + rem + extra
}

/// Inverse change of coordinates r(f) = r_ref + ∫_{f_ref}^{f} df′/u(f′).
/// Calabi ends map to r = ∓∞ and are dropped from the output; φ_r is stored
/// as the sampled u.
pub fn to_log(p: &RadialProfile, f_ref: f64, r_ref: f64) -> Result<LogProfile, GeometryError> {
    check_grid(&p.f, &p.u, 4)?;
    let n = p.len();
    let (a, b) = (p.a(), p.b());
    if !(f_ref > a && f_ref < b) {
        return Err(GeometryError::AnchorNotInterior { f_ref, a, b });
    }
    for i in 1..n - 1 {
        if p.u[i] <= 0.0 {
            return Err(GeometryError::Degenerate {
                index: i,
                value: p.u[i],
            });
        }
    }
    let ii = InverseIntegral::new(p);
    let start = usize::from(ii.left_deg);
    let end = if ii.right_deg { n - 1 } else { n };
    let mut r = Vec::with_capacity(end - start);
    for i in start..end {
        r.push(r_ref + ii.between(&p.f, f_ref, p.f[i]));
    }
    LogProfile::with_derivative(r, p.f[start..end].to_vec(), p.u[start..end].to_vec())
}

/// Curvature quantities at every node of a radial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub f: Vec<f64>,
    pub psi: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub scalar: Vec<f64>,
    /// Reduced Riemann magnitudes `[2|u_ff|, (4/f)|1 − u/f|, (2/f)|u/f − u_f|]`.
    pub rm: Vec<[f64; 3]>,
}

impl CurvatureReport {
    pub fn max_rm(&self) -> f64 {
        self.rm
            .iter()
            .flat_map(|c| c.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn min_ricci(&self) -> f64 {
        self.lambda1
            .iter()
            .chain(&self.lambda2)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

#[inline]
pub(crate) fn rm_terms(f: f64, u: f64, uf: f64, uff: f64) -> [f64; 3] {
    [
        2.0 * abs(uff),
        4.0 / f * abs(1.0 - u / f),
        2.0 / f * abs(u / f - uf),
    ]
}

/// ψ, λ₁, λ₂, R and the reduced Riemann terms at every node.
pub fn curvature(p: &RadialProfile) -> Result<CurvatureReport, GeometryError> {
    check_grid(&p.f, &p.u, MIN_CURVATURE_NODES)?;
    let d = p.derivatives();
    let n = p.len();
    let mut report = CurvatureReport {
        f: p.f.clone(),
        psi: Vec::with_capacity(n),
        lambda1: Vec::with_capacity(n),
        lambda2: Vec::with_capacity(n),
        scalar: Vec::with_capacity(n),
        rm: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (f, u, uf, uff) = (p.f[i], p.u[i], d.d1[i], d.d2[i]);
        let psi = 2.0 - u / f - uf;
        let l1 = psi / f;
        let l2 = -uf / f + u / (f * f) - uff;
        report.psi.push(psi);
        report.lambda1.push(l1);
        report.lambda2.push(l2);
        report.scalar.push(2.0 * (l1 + l2));
        report.rm.push(rm_terms(f, u, uf, uff));
    }
    Ok(report)
}

/// The three reduced Riemann magnitudes per node and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannComponents {
    pub per_node: Vec<[f64; 3]>,
    pub max: f64,
}

pub fn riemann_components(p: &RadialProfile) -> Result<RiemannComponents, GeometryError> {
    check_grid(&p.f, &p.u, MIN_VALIDATE_NODES)?;
    let d = p.derivatives();
    let per_node: Vec<[f64; 3]> = (0..p.len())
        .map(|i| rm_terms(p.f[i], p.u[i], d.d1[i], d.d2[i]))
        .collect();
    let max = per_node
        .iter()
        .flat_map(|c| c.iter().copied())
        .fold(0.0, f64::max);
    Ok(RiemannComponents { per_node, max })
}

/// Coefficients of the Calabi expansions
/// φ = a₀ + a₁w + a₂w² + … (r → −∞) and φ = b₀ + b₁/w + b₂/w² + … (r → +∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalabiAsymptotics {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    MinusInfinity,
    PlusInfinity,
}

impl CalabiAsymptotics {
    pub fn new(a0: f64, a1: f64, a2: f64, b0: f64, b1: f64, b2: f64) -> Result<Self, GeometryError> {
        if !(a0 > 0.0) {
            return Err(GeometryError::InvalidAsymptotics("a0 must be positive"));
        }
        if !(a1 > 0.0) {
            return Err(GeometryError::InvalidAsymptotics("a1 must be positive"));
        }
        if !(b0 > 0.0) {
            return Err(GeometryError::InvalidAsymptotics("b0 must be positive"));
        }
        if !(b1 < 0.0) {
            return Err(GeometryError::InvalidAsymptotics("b1 must be negative"));
        }
        Ok(CalabiAsymptotics { a0, a1, a2, b0, b1, b2 })
    }

    /// Leading-order Ricci eigenvalues (λ₁, λ₂) at the given end.
    pub fn eigenvalues(&self, end: End) -> (f64, f64) {
        asymptotic_eigenvalues(self, end)
    }
}

/// λ₁ = 1/a₀, λ₂ = −1/a₀ − 2a₂/a₁² at r → −∞;
/// λ₁ = 3/b₀, λ₂ = 1/b₀ + 2b₂/b₁² at r → +∞.
pub fn asymptotic_eigenvalues(c: &CalabiAsymptotics, end: End) -> (f64, f64) {
    match end {
        End::MinusInfinity => (1.0 / c.a0, -1.0 / c.a0 - 2.0 * c.a2 / (c.a1 * c.a1)),
        End::PlusInfinity => (3.0 / c.b0, 1.0 / c.b0 + 2.0 * c.b2 / (c.b1 * c.b1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{exp, SQRT_2};
    use alloc::string::ToString;

    fn uniform(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn parabola(n: usize) -> RadialProfile {
        RadialProfile::from_fn(uniform(n, 1.0, 10.0), |f| (f - 1.0) * (10.0 - f) / 9.0).unwrap()
    }

    #[test]
    fn kahler_class_bookkeeping() {
        let k = KahlerClass::new(1.0, 10.0).unwrap();
        assert!(k.singular_regime());
        assert_eq!(k.a_at(0.5), 0.5);
        assert_eq!(k.b_at(0.5), 8.5);
        assert!(!KahlerClass::new(1.0, 3.0).unwrap().singular_regime());
        assert!(KahlerClass::new(2.0, 1.0).is_err());
        assert!(KahlerClass::new(0.0, 1.0).is_err());
    }

    #[test]
    fn parabola_is_valid() {
        let r = parabola(33).validate().unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);
    }

    #[test]
    fn fik_window_flags_nonzero_right_end() {
        let f = uniform(40, 1.0, 3.0);
        let u: Vec<f64> = f.iter().map(|&x| crate::soliton::fik_y(x).unwrap()).collect();
        let r = RadialProfile::new(f, u).unwrap().validate().unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, Violation::RightValue { .. })));
        assert!(r.violations.iter().any(|v| v.to_string().starts_with("u(b) ≠ 0")));
    }

    #[test]
    fn interior_zero_is_invalid() {
        let (f, mut u) = parabola(33).into_parts();
        u[10] = 0.0;
        let r = RadialProfile::new(f, u).unwrap().validate().unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::InteriorNonPositive { index: 10, .. })));
    }

    #[test]
    fn non_monotone_grid_is_structural() {
        let mut f = uniform(10, 1.0, 2.0);
        f.swap(3, 4);
        let p = RadialProfile::new(f, vec![0.1; 10]).unwrap();
        assert_eq!(p.validate(), Err(GeometryError::NonMonotoneGrid { index: 4 }));
    }

    #[test]
    fn flat_profile_maps_to_identity() {
        let r = uniform(50, 0.0, 1.0);
        let phi: Vec<f64> = r.iter().map(|&x| exp(x)).collect();
        let lp = LogProfile::with_derivative(r, phi.clone(), phi.clone()).unwrap();
        let rp = to_radial(&lp).unwrap();
        for (f, u) in rp.f().iter().zip(rp.u()) {
            assert_eq!(f, u);
        }
    }

    #[test]
    fn constant_phi_is_degenerate() {
        let lp = LogProfile::new(uniform(10, 0.0, 1.0), vec![2.0; 10]).unwrap();
        assert!(matches!(to_radial(&lp), Err(GeometryError::Degenerate { .. })));
    }

    #[test]
    fn to_log_of_identity_is_log() {
        let f = uniform(200, 1.0, core::f64::consts::E);
        let p = RadialProfile::new(f.clone(), f.clone()).unwrap();
        let lp = to_log(&p, 1.0 + 1e-9, libm::log(1.0 + 1e-9)).unwrap();
        for (r, ff) in lp.r().iter().zip(&f) {
            assert!((r - libm::log(*ff)).abs() < 1e-8, "{} vs {}", r, libm::log(*ff));
        }
    }

    #[test]
    fn to_log_of_parabola_matches_logit() {
        // 1/u = 9/((f−1)(10−f)) integrates to log((f−1)/(10−f)).
        let p = parabola(301);
        let lp = to_log(&p, 5.5, 0.0).unwrap();
        assert_eq!(lp.len(), 299);
        for (r, f) in lp.r().iter().zip(lp.phi()) {
            let exact = libm::log((f - 1.0) / (10.0 - f));
            assert!((r - exact).abs() < 1e-11, "{r} vs {exact}");
        }
        assert!(lp.r().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn anchor_at_endpoint_is_rejected() {
        assert!(matches!(
            to_log(&parabola(33), 1.0, 0.0),
            Err(GeometryError::AnchorNotInterior { .. })
        ));
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let f = uniform(64, 1.0, 3.0);
        let p = RadialProfile::new(f.clone(), f).unwrap();
        let c = curvature(&p).unwrap();
        for i in 0..64 {
            assert!(c.psi[i].abs() < 1e-12);
            assert!(c.lambda1[i].abs() < 1e-12);
            assert!(c.lambda2[i].abs() < 1e-10);
            assert!(c.scalar[i].abs() < 1e-10);
        }
        assert!(c.max_rm() < 1e-10);
    }

    #[test]
    fn fik_curvature_at_section() {
        let f = uniform(2001, 1.0, 3.0);
        let mut u: Vec<f64> = f.iter().map(|&x| crate::soliton::fik_y(x).unwrap()).collect();
        u[0] = 0.0;
        let c = curvature(&RadialProfile::new(f, u).unwrap()).unwrap();
        assert!((c.lambda1[0] - 1.0).abs() < 1e-12);
        assert!((c.lambda2[0] - (1.0 - SQRT_2)).abs() < 1e-5, "{}", c.lambda2[0]);
        assert!((c.scalar[0] - (4.0 - 2.0 * SQRT_2)).abs() < 2e-5);
    }

    #[test]
    fn too_few_nodes_for_curvature() {
        assert!(matches!(
            curvature(&parabola(10)),
            Err(GeometryError::TooFewNodes { needed: 16, got: 10 })
        ));
    }

    #[test]
    fn asymptotic_examples() {
        let c = CalabiAsymptotics::new(1.0, 1.0, 0.0, 3.0, -1.0, 0.0).unwrap();
        assert_eq!(asymptotic_eigenvalues(&c, End::MinusInfinity), (1.0, -1.0));
        let (l1, l2) = asymptotic_eigenvalues(&c, End::PlusInfinity);
        assert!((l1 - 1.0).abs() < 1e-15 && (l2 - 1.0 / 3.0).abs() < 1e-15);
        let c = CalabiAsymptotics::new(1.0, 1.0, -1.0, 3.0, -1.0, 0.0).unwrap();
        assert_eq!(asymptotic_eigenvalues(&c, End::MinusInfinity), (1.0, 1.0));
        assert!(CalabiAsymptotics::new(1.0, 1.0, 0.0, 3.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn riemann_flat_and_fik() {
        let f = uniform(32, 1.0, 2.0);
        let flat = RadialProfile::new(f.clone(), f.clone()).unwrap();
        assert!(riemann_components(&flat).unwrap().max < 1e-10);
        let terms = rm_terms(1.0, 0.0, 1.0, SQRT_2 - 2.0);
        assert!((terms[0] - 2.0 * (2.0 - SQRT_2)).abs() < 1e-15);
        assert_eq!(terms[1], 4.0);
        assert_eq!(terms[2], 2.0);
    }
}
