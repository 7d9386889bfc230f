//! Initial profiles on the log mesh.

use alloc::vec::Vec;

use super::{mesh, FlowConfig, FlowError, FlowState, InitialKind};
use crate::barriers::class_c_check;
use crate::geometry::{curvature, RadialProfile};
use crate::interp::Pchip;
use crate::math::abs;
use crate::soliton::{find_cao_koiso_constant, soliton_u};

/// Initial unscaled state plus the facts established while building it.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub state: FlowState,
    pub sigma: Vec<f64>,
    /// min over nodes of y − (𝒴 − φ²/5) for the dilated initial profile.
    pub class_c_margin: f64,
    /// min(λ₁, λ₂) over nodes, for the Cao–Koiso based data.
    pub min_ricci: Option<f64>,
}

/// Septic smooth step: 0 for s ≤ 0, 1 for s ≥ 1, C³ at both ends.
fn smooth_step(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0);
    }
    let s4 = s * s * s * s;
    (
        s4 * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s),
        140.0 * s * s * s * (1.0 - s) * (1.0 - s) * (1.0 - s),
    )
}

/// Cao–Koiso profile composed with h(f) = f + (B − 3)·S((f − (3 − w))/w), so that
/// φ ↦ h(φ) moves Σ∞ from 3 to B while fixing [1, 3 − w]. Evaluated at
/// unit-normalized points `x` ∈ [1, B].
fn stretched_cao_koiso(x: &[f64], big_b: f64, w: f64) -> Vec<f64> {
    let c = find_cao_koiso_constant();
    let lift = big_b - 3.0;
    let h = |f: f64| {
        let (s, ds) = smooth_step((f - (3.0 - w)) / w);
        (f + lift * s, 1.0 + lift * ds / w)
    };
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &target)| {
            if i == 0 || i == n - 1 {
                return 0.0;
            }
            let (mut lo, mut hi) = (1.0, 3.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid).0 < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let f = 0.5 * (lo + hi);
            h(f).1 * soliton_u(c, f)
        })
        .collect()
}

/// Builds the initial unscaled profile on the configured log mesh and checks
/// class-C membership (and Ricci positivity for Cao–Koiso data).
pub fn make_initial(cfg: &FlowConfig) -> Result<InitialData, FlowError> {
    cfg.validate()?;
    let (a0, b0) = (cfg.a0(), cfg.b0());
    let n = cfg.grid_n;
    let sigma = mesh::sigma_grid(n, cfg.grading);
    let mut f = alloc::vec![0.0; n];
    mesh::place(&sigma, a0, b0, &mut f);
    let mut min_ricci = None;
    let mut u: Vec<f64> = match &cfg.initial_kind {
        InitialKind::Parabola => f.iter().map(|&x| (x - a0) * (b0 - x) / (b0 - a0)).collect(),
        InitialKind::CaoKoisoPerturbed => {
            let x: Vec<f64> = f.iter().map(|v| v / a0).collect();
            let big_b = b0 / a0;
            let w = cfg.perturbation_eps;
            stretched_cao_koiso(&x, big_b, w).into_iter().map(|v| a0 * v).collect()
        }
        InitialKind::Profile(p) => {
            let tol = 1e-9 * b0;
            if abs(p.a() - a0) > tol || abs(p.b() - b0) > tol {
                return Err(FlowError::Config {
                    key: "initial_file",
                    message: alloc::format!(
                        "profile spans [{}, {}] but the class is [{a0}, {b0}]",
                        p.a(),
                        p.b()
                    ),
                });
            }
            let report = p.validate()?;
            if let Some(v) = report.violations.first() {
                return Err(FlowError::Config {
                    key: "initial_file",
                    message: alloc::format!("{v}"),
                });
            }
            let mut fx = p.f().to_vec();
            let last = fx.len() - 1;
            fx[0] = a0;
            fx[last] = b0;
            Pchip::new(&fx, p.u(), Some(1.0), Some(-1.0)).resample(&f)
        }
    };
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let profile = RadialProfile::new(f, u)?;
    if matches!(cfg.initial_kind, InitialKind::CaoKoisoPerturbed) {
        let c = curvature(&profile)?;
        let m = c.min_ricci();
        min_ricci = Some(m);
        if !(m > 0.0) {
            return Err(FlowError::RicciPositivityLost { min_ricci: m });
        }
    }
    let phi: Vec<f64> = profile.f().iter().map(|v| v / a0).collect();
    let y: Vec<f64> = profile.u().iter().map(|v| v / a0).collect();
    let (inside, margin) = class_c_check(&phi, &y);
    if !inside {
        return Err(FlowError::OutsideClassC { margin });
    }
    Ok(InitialData {
        state: FlowState {
            profile,
            t: 0.0,
            singular_time: a0,
            anchor_r: 0.0,
            step: 0,
        },
        sigma,
        class_c_margin: margin,
        min_ricci,
    })
}
