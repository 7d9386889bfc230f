//! Acceptance criteria A1–A14, each a self-contained check printing one line.
//!
//! Criteria that read the canonical run share a single lazily computed run.

use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use clap::ValueEnum;
use krf_core::analysis::{blowup_rates, type_one_trend, SeriesRecord};
use krf_core::barriers::{
    barrier_residual_sub, barrier_residual_super, barrier_y1, comparison_check, BarrierParams, OperatorSplit,
    ProfileHistory, ALPHA_LADDER, LAMBDA_INIT,
};
use krf_core::flow::engine::{Bounds, Engine, RightEnd};
use krf_core::flow::mesh::{log_mesh, sigma_grid};
use krf_core::flow::{make_initial, run_flow, EngineKind, FlowConfig, InitialKind, RunArtifacts};
use krf_core::soliton::{
    cao_koiso_equation, fik, fik_integral_closed, find_cao_koiso_constant, find_fik_constant, soliton_integral,
    soliton_u, CONSTANT_QUAD_TOL,
};
use krf_core::stencil::{derivatives, EndData};
use krf_core::KahlerClass;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
/// (T − t)R at Σ₀ along the FIK soliton.
pub const SCALAR_LIMIT: f64 = 4.0 - 2.0 * SQRT_2;
/// (T − t)λ₂ at Σ₀ along the FIK soliton.
pub const LAMBDA2_LIMIT: f64 = 1.0 - SQRT_2;
pub const GAUGE_SLOPE: f64 = SQRT_2 - 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {} [{:.1} s]", self.id, self.detail, self.seconds)
    }
}

type Check = fn() -> (bool, String);

const ALL: [(&str, Check); 14] = [
    ("A1", a1_fik_constant),
    ("A2", a2_cao_koiso_constant),
    ("A3", a3_stationarity),
    ("A4", a4_self_similarity),
    ("A5", a5_convergence),
    ("A6", a6_scalar_rate),
    ("A7", a7_eigenvalue_rate),
    ("A8", a8_barriers_full),
    ("A9", a9_gauge_slope),
    ("A10", a10_maximum_principles),
    ("A11", a11_positive_ricci),
    ("A12", a12_type_one),
    ("A13", a13_cross_engine),
    ("A14", a14_comparison),
];

const QUICK: [(&str, Check); 5] = [
    ("A1", a1_fik_constant),
    ("A2", a2_cao_koiso_constant),
    ("A3", a3_stationarity),
    ("A8", a8_barriers_quick),
    ("A11", a11_positive_ricci),
];

fn timed(id: &'static str, check: Check) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = check();
    Outcome {
        id,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs one criterion by id (`"A1"` … `"A14"`).
pub fn run_one(id: &str) -> Option<Outcome> {
    ALL.iter().find(|(k, _)| *k == id).map(|&(k, c)| timed(k, c))
}

/// Runs every criterion of `level` concurrently; results come back in order.
pub fn run_level(level: Level) -> Vec<Outcome> {
    let list: &[(&'static str, Check)] = match level {
        Level::Quick => &QUICK,
        Level::Full => &ALL,
    };
    std::thread::scope(|s| {
        let handles: Vec<_> = list.iter().map(|&(id, c)| s.spawn(move || timed(id, c))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    })
}

/// The canonical class-C run: (a₀, b₀) = (1, 10), parabola data, 2048 nodes,
/// both engines, up to τ = 6.5.
pub fn canonical_config() -> FlowConfig {
    FlowConfig::default()
}

fn canonical() -> Result<&'static RunArtifacts, String> {
    static RUN: OnceLock<Result<RunArtifacts, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let out = run_flow(&canonical_config()).map_err(|e| e.to_string())?;
        match &out.status {
            krf_core::flow::RunStatus::Completed => Ok(out),
            krf_core::flow::RunStatus::Failed { step, tau, message } => {
                Err(format!("canonical run failed at step {step} (τ = {tau}): {message}"))
            }
        }
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn at_tau(series: &[SeriesRecord], tau: f64) -> Option<&SeriesRecord> {
    series.iter().find(|r| (r.tau - tau).abs() < 1e-6)
}

fn rel(x: f64, target: f64) -> f64 {
    ((x - target) / target).abs()
}

macro_rules! canonical_or_fail {
    () => {
        match canonical() {
            Ok(r) => r,
            Err(e) => return (false, e),
        }
    };
}

fn a1_fik_constant() -> (bool, String) {
    let c = find_fik_constant();
    let err = (c - SQRT_2).abs();
    let worst = [0.5, 1.0, 2.0]
        .iter()
        .map(|&k| (soliton_integral(k, None, CONSTANT_QUAD_TOL).value - fik_integral_closed(k)).abs())
        .fold(0.0, f64::max);
    (
        err <= 1e-10 && worst <= 1e-12,
        format!("C = {c:.12}, |C − √2| = {err:.2e} (≤ 1e-10), quadrature vs closed form {worst:.2e} (≤ 1e-12)"),
    )
}

fn a2_cao_koiso_constant() -> (bool, String) {
    let c = find_cao_koiso_constant();
    // Independent root of e^{2C}(2 − C²) = 3C² + 4C + 2 by plain bisection.
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cao_koiso_equation(lo) * cao_koiso_equation(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let diff = (c - oracle).abs();
    (
        diff <= 1e-8 && c > 0.5 && c < 1.0,
        format!("C = {c:.10}, transcendental root {oracle:.10}, difference {diff:.2e} (≤ 1e-8), in (1/2, 1)"),
    )
}

fn a3_stationarity() -> (bool, String) {
    let residual = (0..10_000)
        .map(|i| {
            let phi = 1.0 + 99.0 * i as f64 / 9_999.0;
            OperatorSplit::e(phi, fik(phi)).abs()
        })
        .fold(0.0, f64::max);
    let n = 1024;
    let x = log_mesh(n, 1.0, 1.0, 50.0);
    let y: Vec<f64> = x.iter().map(|&p| fik(p).0).collect();
    let edge = fik(50.0).0;
    let mut e = Engine::new(sigma_grid(n, 1.0), y.clone(), 0.0, Bounds::Fixed { lo: 1.0, hi: 50.0 }, true, RightEnd::Dirichlet, 0.4);
    let span = 1.0;
    if let Err(err) = e.advance_to(span, &|_: f64| edge, &mut |_, _| {}) {
        return (false, format!("stationary run failed: {err}"));
    }
    let drift = e.u().iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / span;
    (
        residual <= 1e-10 && drift <= 5e-4,
        format!("max |E[𝒴]| on [1,100] = {residual:.2e} (≤ 1e-10), drift on [1,50] = {drift:.2e} per unit τ (≤ 5e-4)"),
    )
}

fn a4_self_similarity() -> (bool, String) {
    let times = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let cfg = FlowConfig {
        kahler_class: KahlerClass::new(1.0, 3.0).expect("valid class"),
        initial_kind: InitialKind::CaoKoisoPerturbed,
        grid_n: 1024,
        engine: EngineKind::Unscaled,
        stop_tau: -(0.1f64).ln(),
        snapshot_taus: times.iter().map(|t: &f64| -(1.0 - t).ln()).collect(),
        ..FlowConfig::default()
    };
    let out = match run_flow(&cfg) {
        Ok(o) if o.status.is_completed() => o,
        Ok(o) => return (false, format!("run stopped: {:?}", o.status)),
        Err(e) => return (false, e.to_string()),
    };
    let c = find_cao_koiso_constant();
    let mut worst: f64 = 0.0;
    for s in &out.snapshots {
        let scale = (-s.tau).exp();
        let p = &s.radial;
        let reference: Vec<f64> = p.f().iter().map(|&f| scale * soliton_u(c, (f / scale).min(3.0))).collect();
        let top = reference.iter().copied().fold(0.0, f64::max);
        let diff = p.u().iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / top);
    }
    (
        out.snapshots.len() == times.len() && worst <= 0.01,
        format!("max relative sup error over t ∈ {{0.1, …, 0.9}} = {worst:.2e} (≤ 1e-2)"),
    )
}

fn a5_convergence() -> (bool, String) {
    let run = canonical_or_fail!();
    let (Some(r4), Some(r6)) = (at_tau(&run.series, 4.0), at_tau(&run.series, 6.0)) else {
        return (false, "records at τ = 4 and τ = 6 missing".into());
    };
    let rates = match blowup_rates(&run.series, Some((5.0, 6.5)), None) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let ratio = r4.sup_err_c0 / r6.sup_err_c0;
    (
        r6.sup_err_c0 <= 0.05 && ratio >= 1.5 && rates.decay_rate_delta0 > 0.0,
        format!(
            "sup|y − 𝒴| on [1,3]: {:.3e} at τ=6 (≤ 0.05), {:.3e} at τ=4, ratio {ratio:.2} (≥ 1.5), δ₀ = {:.3} (> 0)",
            r6.sup_err_c0, r4.sup_err_c0, rates.decay_rate_delta0
        ),
    )
}

fn a6_scalar_rate() -> (bool, String) {
    let run = canonical_or_fail!();
    let Some(r) = at_tau(&run.series, 6.0) else {
        return (false, "record at τ = 6 missing".into());
    };
    let v = r.a * r.r_sigma0;
    let e = rel(v, SCALAR_LIMIT);
    (e <= 0.02, format!("(T−t)R(Σ₀) = {v:.6} at τ=6, target {SCALAR_LIMIT:.6}, relative error {e:.2e} (≤ 2e-2)"))
}

fn a7_eigenvalue_rate() -> (bool, String) {
    let run = canonical_or_fail!();
    let Some(r) = at_tau(&run.series, 6.0) else {
        return (false, "record at τ = 6 missing".into());
    };
    let v = r.a * r.lambda2_sigma0;
    let e = rel(v, LAMBDA2_LIMIT);
    let late: Vec<&SeriesRecord> = run.series.iter().filter(|r| r.tau >= 3.0).collect();
    let negative = !late.is_empty() && late.iter().all(|r| r.lambda2_sigma0 < 0.0);
    (
        e <= 0.02 && negative,
        format!(
            "(T−t)λ₂(Σ₀) = {v:.6} at τ=6, target {LAMBDA2_LIMIT:.6}, relative error {e:.2e} (≤ 2e-2); negative on all {} records with τ ≥ 3: {negative}",
            late.len()
        ),
    )
}

/// Residual certificates on 100 × 100 samples of (φ, τ) ∈ [1, 10⁴] × [0, 20].
fn certificates(delta: f64, lambda0: f64) -> (f64, f64) {
    let p = BarrierParams::new(delta, lambda0).expect("valid barrier parameters");
    let mut max_sub = f64::NEG_INFINITY;
    let mut min_super = f64::INFINITY;
    for i in 0..100 {
        let phi = 10f64.powf(4.0 * i as f64 / 99.0);
        for j in 0..100 {
            let tau = 20.0 * j as f64 / 99.0;
            max_sub = max_sub.max(barrier_residual_sub(phi, p.lambda_sub(tau), delta));
            min_super = min_super.min(barrier_residual_super(phi, p.lambda_super(tau)));
        }
    }
    (max_sub, min_super)
}

fn barrier_verdict(run: &RunArtifacts, label: &str) -> (bool, String) {
    let delta = canonical_config().barrier_delta;
    let (max_sub, min_super) = certificates(delta, run.lambda0);
    let pass = max_sub < 0.0 && min_super > 0.0 && run.violations.is_empty();
    (
        pass,
        format!(
            "max sub residual {max_sub:.3e} (< 0), min super residual {min_super:.3e} (> 0), {} sandwich violations over {} checks on the {label} run",
            run.violations.len(),
            run.sandwich_checks
        ),
    )
}

fn a8_barriers_full() -> (bool, String) {
    let run = canonical_or_fail!();
    barrier_verdict(run, "canonical")
}

/// Quick variant: the canonical setup on 512 nodes.
fn a8_barriers_quick() -> (bool, String) {
    let cfg = FlowConfig {
        grid_n: 512,
        engine: EngineKind::Unscaled,
        ..canonical_config()
    };
    match run_flow(&cfg) {
        Ok(run) if run.status.is_completed() => barrier_verdict(&run, "512-node canonical"),
        Ok(run) => (false, format!("run stopped: {:?}", run.status)),
        Err(e) => (false, e.to_string()),
    }
}

fn a9_gauge_slope() -> (bool, String) {
    let run = canonical_or_fail!();
    let rates = match blowup_rates(&run.series, Some((5.0, 6.5)), None) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    // 1 + y_φφ(1, τ) = −(T − t)λ₂(Σ₀).
    let window: Vec<f64> = run
        .series
        .iter()
        .filter(|r| r.tau >= 5.0 - 1e-9 && r.tau <= 6.5 + 1e-9)
        .map(|r| -r.a * r.lambda2_sigma0)
        .collect();
    let inst = window.iter().sum::<f64>() / window.len() as f64;
    let e_target = rel(rates.gauge_slope, GAUGE_SLOPE);
    let e_inst = rel(rates.gauge_slope, inst);
    (
        e_target <= 0.05 && e_inst <= 0.05,
        format!(
            "slope of C(τ) on [5, 6.5] = {:.6} (target {GAUGE_SLOPE:.6}, error {e_target:.2e} ≤ 5e-2); mean 1 + y_φφ(1) = {inst:.6} (difference {e_inst:.2e} ≤ 5e-2)",
            rates.gauge_slope
        ),
    )
}

fn a10_maximum_principles() -> (bool, String) {
    let run = canonical_or_fail!();
    let max_f = run.series.iter().map(|r| r.max_f).fold(f64::NEG_INFINITY, f64::max);
    let f_bound = run.initial_max_f.max(1.0);
    let min_yphi = run.series.iter().map(|r| r.min_yphi).fold(f64::INFINITY, f64::min);
    let max_yphi = run.series.iter().map(|r| r.max_yphi).fold(f64::NEG_INFINITY, f64::max);
    let lower = run.initial_min_yphi.min(-1.0) - 1e-6;
    let upper = run.initial_max_yphi.max(f_bound) + 1e-6;
    let pass = max_f <= f_bound + 1e-6 && min_yphi >= lower && max_yphi <= upper;
    (
        pass,
        format!(
            "max u/f = {max_f:.6} (≤ {:.6}); y_φ ∈ [{min_yphi:.6}, {max_yphi:.6}] within [{lower:.6}, {upper:.6}]",
            f_bound + 1e-6
        ),
    )
}

fn a11_positive_ricci() -> (bool, String) {
    let cfg = FlowConfig {
        kahler_class: KahlerClass::new(1.0, 3.1).expect("valid class"),
        initial_kind: InitialKind::CaoKoisoPerturbed,
        ..FlowConfig::default()
    };
    match make_initial(&cfg) {
        Ok(init) => {
            let m = init.min_ricci.unwrap_or(f64::NAN);
            (
                m > 0.0 && init.class_c_margin > 0.0,
                format!("b₀ = 3.1: min(λ₁, λ₂) = {m:.4e} (> 0), class-C margin {:.4e} (> 0)", init.class_c_margin),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn a12_type_one() -> (bool, String) {
    let run = canonical_or_fail!();
    match type_one_trend(&run.series, 1.0) {
        Some((growth, bounded)) => (
            bounded,
            format!("max reduced |Rm| growth over the last unit of τ = {:.2}% (< 10%)", 100.0 * growth),
        ),
        None => (false, "series too short for the trend".into()),
    }
}

fn a13_cross_engine() -> (bool, String) {
    let base = FlowConfig {
        grid_n: 1024,
        ..canonical_config()
    };
    let doubled = FlowConfig {
        phi_cut: 2.0 * base.phi_cut,
        ..base.clone()
    };
    let (r1, r2) = std::thread::scope(|s| {
        let h = s.spawn(|| run_flow(&doubled));
        (run_flow(&base), h.join().expect("run panicked"))
    });
    let (r1, r2) = match (r1, r2) {
        (Ok(a), Ok(b)) if a.status.is_completed() && b.status.is_completed() => (a, b),
        (a, b) => return (false, format!("runs did not complete: {:?} / {:?}", a.map(|x| x.status), b.map(|x| x.status))),
    };
    let Some(&(_, cross)) = r1.cross_engine.iter().find(|(t, _)| (t - 2.0).abs() < 1e-6) else {
        return (false, "no cross-engine record at τ = 2".into());
    };
    let e1 = at_tau(&r1.dilated_series, 6.0).map(|r| r.sup_err_c0);
    let e2 = at_tau(&r2.dilated_series, 6.0).map(|r| r.sup_err_c0);
    let (Some(e1), Some(e2)) = (e1, e2) else {
        return (false, "dilated records at τ = 6 missing".into());
    };
    let change = rel(e2, e1);
    (
        cross <= 1e-3 && change < 0.1,
        format!(
            "sup difference on [1,5] at τ=2 = {cross:.2e} (≤ 1e-3); sup|y − 𝒴| at τ=6 with Φ_cut = {} / {}: {e1:.4e} / {e2:.4e}, change {:.2}% (< 10%)",
            base.phi_cut,
            doubled.phi_cut,
            100.0 * change
        ),
    )
}

fn fik_history(phi: &[f64], taus: &[f64], shift: impl Fn(f64, f64) -> f64) -> ProfileHistory {
    let mut h = ProfileHistory::new(phi.to_vec());
    for &t in taus {
        h.push(t, phi.iter().map(|&p| fik(p).0 + shift(p, t)).collect());
    }
    h
}

fn max_abs_second_derivative(h: &ProfileHistory) -> f64 {
    h.values
        .iter()
        .flat_map(|v| derivatives(&h.phi, v, EndData::Open, EndData::Open).d2)
        .map(f64::abs)
        .fold(0.0, f64::max)
}

fn a14_comparison() -> (bool, String) {
    let phi: Vec<f64> = (0..101).map(|i| 1.0 + 0.02 * i as f64).collect();
    let taus: Vec<f64> = (0..51).map(|k| 0.1 * k as f64).collect();
    let mut notes = Vec::new();
    let mut pass = true;
    let stable = |v: &krf_core::barriers::ComparisonVerdict| v.per_alpha.iter().all(|a| a.1 == v.ordered);

    // Shifted FIK pairs are ordered for every positive shift.
    for shift in [0.1, 0.01, 1e-4] {
        let lo = fik_history(&phi, &taus, |_, _| 0.0);
        let hi = fik_history(&phi, &taus, |_, _| shift);
        let c = max_abs_second_derivative(&hi);
        match comparison_check(&lo, &hi, c, &ALPHA_LADDER) {
            Ok(v) => {
                let ok = v.ordered && v.first_crossing.is_none() && stable(&v);
                pass &= ok;
                notes.push(format!("shift {shift}: ordered={}", v.ordered));
            }
            Err(e) => return (false, e.to_string()),
        }
    }

    // y⁺ dragged below y⁻ at the outer boundary from mid-run on.
    let lo = fik_history(&phi, &taus, |_, _| 0.0);
    let hi = fik_history(&phi, &taus, |p, t| if p >= 3.0 - 1e-12 && t >= 2.5 { -0.05 } else { 0.1 });
    let c = max_abs_second_derivative(&lo);
    match comparison_check(&lo, &hi, c, &ALPHA_LADDER) {
        Ok(v) => {
            let ok = !v.ordered && !v.boundary_ordered && v.first_crossing.is_some() && stable(&v);
            pass &= ok;
            let at = v.first_crossing.map(|c| (c.tau, c.phi));
            notes.push(format!("boundary violation detected={} at {at:?}", !v.ordered));
        }
        Err(e) => return (false, e.to_string()),
    }

    // Flow output against the subsolution, replayed from the canonical history.
    let run = canonical_or_fail!();
    let h = &run.history;
    let p = BarrierParams::new(canonical_config().barrier_delta, run.lambda0).expect("valid barrier parameters");
    let sub = ProfileHistory::sample(h, |phi, tau| barrier_y1(phi, tau, &p));
    let c = max_abs_second_derivative(h);
    match comparison_check(&sub, h, c, &ALPHA_LADDER) {
        Ok(v) => {
            let ok = v.ordered && v.initially_ordered && v.boundary_ordered && stable(&v);
            pass &= ok;
            notes.push(format!("flow vs subsolution (λ = {:.3}): ordered={}", v.lambda, v.ordered));
        }
        Err(e) => return (false, e.to_string()),
    }
    let _ = LAMBDA_INIT;
    (pass, notes.join("; "))
}
