//! Gradient shrinking Kähler–Ricci solitons under the Calabi ansatz.
//!
//! Normalized so that |Σ₀| = π, a soliton profile satisfies in (f, u) form the
//! first-order linear ODE
//!
//! ```text
//! u_f + u/f − C·u + f − 2 = 0,   u(1) = 0,
//! ```
//!
//! solved by u(f) = (e^{Cf}/f) ∫₁^f (2 − s) s e^{−Cs} ds. The FIK soliton on the
//! blow-up of C² is the bounded-growth solution on [1, ∞), which forces C = √2;
//! the Cao–Koiso soliton on M is the one closing up at f = 3.

use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{GeometryError, KahlerClass, LogProfile, RadialProfile};
use crate::math::{abs, exp, ln, SQRT_2};
use crate::quad::{integrate, integrate_to_infinity, Quadrature};

/// Absolute tolerance of the quadratures used to locate soliton constants.
pub const CONSTANT_QUAD_TOL: f64 = 1e-13;
/// Minimum node count for quadrature-built profiles.
pub const MIN_SOLITON_NODES: usize = 64;
/// Default truncation of the noncompact profile.
pub const DEFAULT_F_MAX: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error("φ = {phi} is below the section (φ ≥ 1 required)")]
    Domain { phi: f64 },
    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("soliton constant must be positive (got {c})")]
    NonPositiveConstant { c: f64 },
    #[error("C = {c} is incompatible with the {base} base")]
    IncompatibleConstant { c: f64, base: Base },
    #[error("loses positivity at f = {at_f}")]
    LosesPositivity { at_f: f64 },
    #[error("profile grows like e^(Cf)/f for C = {c} (tail integral {tail:e} > 0); no complete soliton")]
    ExponentialGrowth { c: f64, tail: f64 },
    #[error("shoot diverged at r = {r}")]
    ShootDiverged { r: f64 },
    #[error("shooting bracket [{lo}, {hi}] does not straddle the target")]
    NoBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which manifold the soliton lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    /// The blow-up L of C² at the origin (noncompact).
    LNoncompact,
    /// The blow-up M of CP² at one point (compact).
    MCompact,
}

impl core::fmt::Display for Base {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Base::LNoncompact => "L",
            Base::MCompact => "M",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonSpec {
    c: f64,
    base: Base,
}

impl SolitonSpec {
    /// Tolerance on C = √2 for the noncompact base.
    pub const FIK_TOLERANCE: f64 = 1e-8;

    pub fn new(c: f64, base: Base) -> Result<Self, SolitonError> {
        if !(c > 0.0) {
            return Err(SolitonError::NonPositiveConstant { c });
        }
        let ok = match base {
            Base::MCompact => c > 0.5 && c < 1.0,
            Base::LNoncompact => abs(c - SQRT_2) <= Self::FIK_TOLERANCE,
        };
        if !ok {
            return Err(SolitonError::IncompatibleConstant { c, base });
        }
        Ok(SolitonSpec { c, base })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn base(&self) -> Base {
        self.base
    }
}

/// A normalized soliton: its constant plus the sampled u(f) with u(1) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonProfile {
    pub c: f64,
    pub base: Option<Base>,
    pub profile: RadialProfile,
}

impl SolitonProfile {
    pub fn spec(&self) -> Option<SolitonSpec> {
        self.base.and_then(|b| SolitonSpec::new(self.c, b).ok())
    }

    /// Max ODE residual over interior nodes, with stencil derivatives.
    pub fn residual(&self) -> f64 {
        soliton_ode_residual(self)
    }

    /// Kähler class of a compact profile.
    pub fn kahler_class(&self) -> Result<KahlerClass, GeometryError> {
        KahlerClass::new(self.profile.a(), self.profile.b())
    }
}

/// 𝒴(φ) = (φ(φ − 2) + √2(φ − 1) + 1)/(√2 φ) with its first two derivatives,
/// evaluated without a domain check.
#[inline]
pub fn fik(phi: f64) -> (f64, f64, f64) {
    let y = phi / SQRT_2 + (1.0 - SQRT_2) + (1.0 / SQRT_2 - 1.0) / phi;
    let p2 = phi * phi;
    let yp = (p2 + SQRT_2 - 1.0) / (SQRT_2 * p2);
    let ypp = (SQRT_2 - 2.0) / (p2 * phi);
    (y, yp, ypp)
}

/// The FIK profile 𝒴(φ).
pub fn fik_y(phi: f64) -> Result<f64, SolitonError> {
    fik_y_derivs(phi).map(|d| d.0)
}

/// (𝒴, 𝒴_φ, 𝒴_φφ) at φ ≥ 1.
pub fn fik_y_derivs(phi: f64) -> Result<(f64, f64, f64), SolitonError> {
    if !(phi >= 1.0) {
        return Err(SolitonError::Domain { phi });
    }
    Ok(fik(phi))
}

/// u_f + u/f − C·u + f − 2 at one point.
#[inline]
pub fn ode_residual_at(c: f64, f: f64, u: f64, uf: f64) -> f64 {
    uf + u / f - c * u + f - 2.0
}

/// Max residual over interior nodes given values and slopes.
pub fn max_ode_residual(c: f64, f: &[f64], u: &[f64], uf: &[f64]) -> f64 {
    let n = f.len();
    (1..n.saturating_sub(1))
        .map(|i| abs(ode_residual_at(c, f[i], u[i], uf[i])))
        .fold(0.0, f64::max)
}

/// Max |u_f + u/f − C·u + f − 2| over interior nodes, u_f by stencil.
pub fn soliton_ode_residual(p: &SolitonProfile) -> f64 {
    let d = p.profile.derivatives();
    max_ode_residual(p.c, p.profile.f(), p.profile.u(), &d.d1)
}

fn kernel(c: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| (2.0 - s) * s * exp(-c * s)
}

/// ∫₁^upper (2 − s) s e^{−Cs} ds by adaptive quadrature; `None` means ∞.
pub fn soliton_integral(c: f64, upper: Option<f64>, tol: f64) -> Quadrature {
    match upper {
        Some(b) => integrate(kernel(c), 1.0, b, tol),
        None => integrate_to_infinity(kernel(c), 1.0, tol),
    }
}

/// Closed form of ∫₁^upper (2 − s) s e^{−Cs} ds, from the antiderivative
/// −e^{−Cs}(−s²/C + 2(C − 1)s/C² + 2(C − 1)/C³).
pub fn soliton_integral_closed(c: f64, upper: Option<f64>) -> f64 {
    let p = |s: f64| -s * s / c + 2.0 * (c - 1.0) * s / (c * c) + 2.0 * (c - 1.0) / (c * c * c);
    let lower = exp(-c) * p(1.0);
    match upper {
        None => lower,
        Some(b) => lower - exp(-c * b) * p(b),
    }
}

/// e^{−C}(C² − 2)/C³, the full tail integral.
pub fn fik_integral_closed(c: f64) -> f64 {
    exp(-c) * (c * c - 2.0) / (c * c * c)
}

/// e^{2C}(2 − C²) − (3C² + 4C + 2); its root is the Cao–Koiso constant.
pub fn cao_koiso_equation(c: f64) -> f64 {
    exp(2.0 * c) * (2.0 - c * c) - (3.0 * c * c + 4.0 * c + 2.0)
}

/// Bisection to `xtol` on a sign change over [lo, hi].
fn bisect(mut lo: f64, mut hi: f64, xtol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection followed by a few Newton polishing steps.
fn bracketed_root(
    lo: f64,
    hi: f64,
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
) -> f64 {
    let mut c = bisect(lo, hi, 1e-12, &g);
    for _ in 0..3 {
        let step = g(c) / dg(c);
        let next = c - step;
        if !(next > lo && next < hi) || abs(step) > 1e-10 {
            break;
        }
        c = next;
    }
    c
}

/// The C > 0 with ∫₁^∞ (2 − s) s e^{−Cs} ds = 0, found on [1.2, 1.6].
pub fn find_fik_constant() -> f64 {
    bracketed_root(
        1.2,
        1.6,
        |c| soliton_integral(c, None, CONSTANT_QUAD_TOL).value,
        |c| -integrate_to_infinity(|s| (2.0 - s) * s * s * exp(-c * s), 1.0, CONSTANT_QUAD_TOL).value,
    )
}

/// The C with ∫₁³ (2 − s) s e^{−Cs} ds = 0, found on [0.5, 1.0].
pub fn find_cao_koiso_constant() -> f64 {
    bracketed_root(
        0.5,
        1.0,
        |c| soliton_integral(c, Some(3.0), CONSTANT_QUAD_TOL).value,
        |c| -integrate(|s| (2.0 - s) * s * s * exp(-c * s), 1.0, 3.0, CONSTANT_QUAD_TOL).value,
    )
}

/// Root of [`cao_koiso_equation`] by bisection alone.
pub fn cao_koiso_constant_closed() -> f64 {
    bisect(0.5, 1.0, 1e-15, cao_koiso_equation)
}

/// Where the soliton profile is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolitonDomain {
    /// [1, f_end]; if u(f_end) vanishes to 1e-8 it is set to exactly 0.
    Compact(f64),
    /// [1, ∞) represented on [1, f_max]; requires the tail integral to vanish.
    Noncompact { f_max: f64 },
}

/// Largest |u(f_end)| accepted as a closed Calabi end.
pub const CLOSURE_TOL: f64 = 1e-8;

fn uniform(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// First f > 2 with ∫₁^f (2 − s) s e^{−Cs} ds = 0, when the tail is negative.
fn positivity_loss(c: f64) -> f64 {
    let g = |f: f64| soliton_integral(c, Some(f), CONSTANT_QUAD_TOL).value;
    let mut hi = 4.0;
    while g(hi) > 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    bisect(2.0, hi, 1e-12, g)
}

/// Integrating-factor construction of the soliton profile with constant `c`
/// on `n` uniform nodes.
pub fn soliton_quadrature(
    c: f64,
    domain: SolitonDomain,
    n: usize,
) -> Result<SolitonProfile, SolitonError> {
    if n < MIN_SOLITON_NODES {
        return Err(SolitonError::TooFewNodes {
            needed: MIN_SOLITON_NODES,
            got: n,
        });
    }
    if !(c > 0.0) {
        return Err(SolitonError::NonPositiveConstant { c });
    }
    match domain {
        SolitonDomain::Compact(f_end) => {
            let f = uniform(n, 1.0, f_end);
            // J(f) = f·u(f) = ∫₁^f (2 − s) s e^{C(f − s)} ds, advanced cell by cell.
            let mut u = Vec::with_capacity(n);
            u.push(0.0);
            let mut j = 0.0;
            for k in 0..n - 1 {
                let (x0, x1) = (f[k], f[k + 1]);
                let cell = integrate(|s| (2.0 - s) * s * exp(c * (x1 - s)), x0, x1, 1e-15).value;
                j = j * exp(c * (x1 - x0)) + cell;
                u.push(j / x1);
            }
            if abs(u[n - 1]) <= CLOSURE_TOL {
                u[n - 1] = 0.0;
            }
            if let Some(k) = (1..n).find(|&k| u[k] <= 0.0 && !(k == n - 1 && u[k] == 0.0)) {
                let at_f = positivity_loss(c).min(f[k]);
                return Err(SolitonError::LosesPositivity { at_f });
            }
            let base = if u[n - 1] == 0.0 && c > 0.5 && c < 1.0 {
                Some(Base::MCompact)
            } else {
                None
            };
            Ok(SolitonProfile {
                c,
                base,
                profile: RadialProfile::new(f, u)?,
            })
        }
        SolitonDomain::Noncompact { f_max } => {
            let tail = soliton_integral(c, None, CONSTANT_QUAD_TOL).value;
            let tol = 1e-11;
            if tail > tol {
                return Err(SolitonError::ExponentialGrowth { c, tail });
            }
            if tail < -tol {
                return Err(SolitonError::LosesPositivity {
                    at_f: positivity_loss(c),
                });
            }
            // With a vanishing tail, u(f) = −(1/f) ∫₀^∞ (2 − f − x)(f + x) e^{−Cx} dx,
            // which avoids the e^{Cf} amplification of the forward form.
            let f = uniform(n, 1.0, f_max);
            let mut u = Vec::with_capacity(n);
            for &x in &f {
                let q = integrate_to_infinity(
                    |t| (2.0 - x - t) * (x + t) * exp(-c * t),
                    0.0,
                    1e-14 * (1.0 + x * x),
                );
                u.push(-q.value / x);
            }
            u[0] = 0.0;
            if let Some(k) = (1..n).find(|&k| u[k] <= 0.0) {
                return Err(SolitonError::LosesPositivity { at_f: f[k] });
            }
            let base = if abs(c - SQRT_2) <= SolitonSpec::FIK_TOLERANCE {
                Some(Base::LNoncompact)
            } else {
                None
            };
            Ok(SolitonProfile {
                c,
                base,
                profile: RadialProfile::new(f, u)?,
            })
        }
    }
}

/// u(f) = (1/f) ∫₁^f (2 − s) s e^{C(f − s)} ds at a single point.
pub fn soliton_u(c: f64, f: f64) -> f64 {
    if f <= 1.0 {
        return 0.0;
    }
    integrate(|s| (2.0 - s) * s * exp(c * (f - s)), 1.0, f, 1e-15).value / f
}

/// u_f from the ODE: u_f = 2 − f + C·u − u/f.
pub fn soliton_uf(c: f64, f: f64, u: f64) -> f64 {
    2.0 - f + c * u - u / f
}

/// The noncompact FIK profile on [1, f_max] from the numerically found constant.
pub fn fik_profile(n: usize, f_max: f64) -> Result<SolitonProfile, SolitonError> {
    soliton_quadrature(find_fik_constant(), SolitonDomain::Noncompact { f_max }, n)
}

/// The Cao–Koiso profile on [1, 3].
pub fn cao_koiso_profile(n: usize) -> Result<SolitonProfile, SolitonError> {
    let c = find_cao_koiso_constant();
    let p = soliton_quadrature(c, SolitonDomain::Compact(3.0), n)?;
    if p.profile.u()[n - 1] != 0.0 {
        return Err(SolitonError::LosesPositivity { at_f: 3.0 });
    }
    Ok(p)
}

/// Why the r-coordinate integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotEnd {
    /// Reached the end of the r-window.
    WindowEnd,
    /// φ_r decayed to numerical zero; φ has converged to `phi_inf`.
    Closed { phi_inf: f64 },
}

/// Result of integrating the second-order soliton ODE in r.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotProfile {
    pub c: f64,
    pub log: LogProfile,
    /// The same curve as u(f); both ends are open samples.
    pub radial: RadialProfile,
    pub end: ShotEnd,
}

/// Default r-window for the compact shooting problem.
pub const SHOOT_WINDOW_M: (f64, f64) = (-12.0, 40.0);
/// Default r-window for the noncompact shooting problem. The forward problem
/// amplifies errors like e^{Cφ}, so the window stops near φ ≈ 10.
pub const SHOOT_WINDOW_L: (f64, f64) = (-12.0, 2.0);

const SHOOT_STEP: f64 = 1e-3;
const SHOOT_SAMPLE_EVERY: usize = 10;
/// log φ_r below which the profile is treated as closed.
const SHOOT_CLOSED_LOG: f64 = -30.0;

/// Integrates φ_rr/φ_r + φ_r/φ − Cφ_r + φ − 2 = 0 over `r_window` from the
/// Calabi seed φ ≈ 1 + a₁e^r + a₁²(C − 2)e^{2r}/2, with classical RK4 in the
/// variables (φ, log φ_r).
pub fn soliton_shoot_r(c: f64, r_window: (f64, f64), a1: f64) -> Result<ShotProfile, SolitonError> {
    if !(c > 0.0 && c < 3.0) {
        return Err(SolitonError::NonPositiveConstant { c });
    }
    let (r0, r1) = r_window;
    let w = exp(r0);
    let a2 = 0.5 * a1 * a1 * (c - 2.0);
    let mut phi = 1.0 + a1 * w + a2 * w * w;
    let mut v = ln(a1 * w + 2.0 * a2 * w * w);
    let rhs = |phi: f64, v: f64| {
        let e = exp(v);
        (e, -e / phi + c * e - phi + 2.0)
    };
    let steps = libm::ceil((r1 - r0) / SHOOT_STEP) as usize;
    let h = (r1 - r0) / steps as f64;
    let mut rs = Vec::new();
    let mut phis = Vec::new();
    let mut us = Vec::new();
    let mut end = ShotEnd::WindowEnd;
    for k in 0..=steps {
        let r = r0 + k as f64 * h;
        if k % SHOOT_SAMPLE_EVERY == 0 || k == steps {
            rs.push(r);
            phis.push(phi);
            us.push(exp(v));
        }
        if v < SHOOT_CLOSED_LOG {
            if rs.last() != Some(&r) {
                rs.push(r);
                phis.push(phi);
                us.push(exp(v));
            }
            end = ShotEnd::Closed { phi_inf: phi };
            break;
        }
        if k == steps {
            break;
        }
        let (k1p, k1v) = rhs(phi, v);
        let (k2p, k2v) = rhs(phi + 0.5 * h * k1p, v + 0.5 * h * k1v);
        let (k3p, k3v) = rhs(phi + 0.5 * h * k2p, v + 0.5 * h * k2v);
        let (k4p, k4v) = rhs(phi + h * k3p, v + h * k3v);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !phi.is_finite() || !v.is_finite() || v > 50.0 || phi > 1e8 {
            return Err(SolitonError::ShootDiverged { r: r + h });
        }
    }
    // Plateaued samples after closure would repeat φ; keep φ strictly increasing.
    let mut keep = 1;
    for i in 1..phis.len() {
        if phis[i] > phis[keep - 1] {
            rs[keep] = rs[i];
            phis[keep] = phis[i];
            us[keep] = us[i];
            keep += 1;
        }
    }
    rs.truncate(keep);
    phis.truncate(keep);
    us.truncate(keep);
    let radial = RadialProfile::new(phis.clone(), us.clone())?;
    let log = LogProfile::with_derivative(rs, phis, us)?;
    Ok(ShotProfile { c, log, radial, end })
}

/// Recovers the Cao–Koiso constant by shooting: bisects C on [lo, hi] until
/// the closing value φ∞ equals 3. The seed amplitude a₁ only translates the
/// solution in r, so C is the one shooting parameter.
pub fn shoot_cao_koiso_constant(lo: f64, hi: f64) -> Result<f64, SolitonError> {
    let miss = |c: f64| -> Result<f64, SolitonError> {
        match soliton_shoot_r(c, SHOOT_WINDOW_M, 1.0)?.end {
            ShotEnd::Closed { phi_inf } => Ok(phi_inf - 3.0),
            ShotEnd::WindowEnd => Err(SolitonError::ShootDiverged { r: SHOOT_WINDOW_M.1 }),
        }
    };
    let (mut a, mut b) = (lo, hi);
    let ma = miss(a)?;
    let mb = miss(b)?;
    if (ma < 0.0) == (mb < 0.0) {
        return Err(SolitonError::NoBracket { lo, hi });
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let mm = miss(m)?;
        if (mm < 0.0) == (ma < 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fik_closed_form_values() {
        assert!(fik_y(1.0).unwrap().abs() < 1e-15);
        assert!((fik_y(2.0).unwrap() - (2.0 + SQRT_2) / 4.0).abs() < 1e-15);
        assert!((fik_y_derivs(1.0).unwrap().2 - (SQRT_2 - 2.0)).abs() < 1e-15);
        assert!(matches!(fik_y(0.5), Err(SolitonError::Domain { .. })));
    }

    #[test]
    fn fik_satisfies_the_ode() {
        for i in 0..1000 {
            let phi = 1.0 + 0.099 * i as f64;
            let (y, yp, _) = fik(phi);
            assert!(ode_residual_at(SQRT_2, phi, y, yp).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_integral_matches_tail_formula() {
        for c in [0.5, 1.0, 2.0] {
            assert!((soliton_integral_closed(c, None) - fik_integral_closed(c)).abs() < 1e-15);
        }
    }

    #[test]
    fn equation_sign_brackets_cao_koiso() {
        assert!(cao_koiso_equation(0.5) > 0.0);
        assert!(cao_koiso_equation(0.6) < 0.0);
    }
}
