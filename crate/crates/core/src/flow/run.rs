//! Orchestration of a flow run: both engines, anchor, monitor and records.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::anchor::{sample, AnchorRecord, AnchorTracker};
use super::engine::{Bounds, Engine, NoRight, RightEnd, RightValue};
use super::initial::make_initial;
use super::mesh::{grading_for_window, window_fraction, RemeshPolicy, RemeshReport};
use super::state::{dilated_view, DilatedState, FlowState};
use super::{EngineKind, FlowConfig, FlowError, OuterBc};
use crate::analysis::{convergence_error, type_one_monitor, SeriesRecord};
use crate::barriers::{fit_lambda0, BarrierParams, BarrierViolation, ProfileHistory, SandwichMonitor};
use crate::geometry::RadialProfile;
use crate::interp::Pchip;
use crate::math::{abs, exp, ln};

/// Right edge of the cross-engine comparison window.
pub const CROSS_ENGINE_PHI: f64 = 5.0;
const HISTORY_NODES: usize = 201;

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Failed { step: u64, tau: f64, message: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: f64,
    /// Unscaled profile of the primary engine.
    pub radial: RadialProfile,
    /// Dilated profile of the primary engine.
    pub dilated: DilatedState,
    /// State of the dilated engine, when one runs alongside.
    pub dilated_engine: Option<DilatedState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    /// Records of the primary engine (unscaled unless only the dilated engine runs).
    pub series: Vec<SeriesRecord>,
    /// Records of the dilated engine.
    pub dilated_series: Vec<SeriesRecord>,
    pub anchors: Vec<AnchorRecord>,
    pub snapshots: Vec<Snapshot>,
    pub violations: Vec<BarrierViolation>,
    pub sandwich_checks: u64,
    pub min_gap_sub: f64,
    pub min_gap_super: f64,
    /// (τ, sup |y_dilated − y_unscaled| over [1, 5]).
    pub cross_engine: Vec<(f64, f64)>,
    pub lambda0: f64,
    pub class_c_margin: f64,
    pub min_ricci: Option<f64>,
    pub initial_max_f: f64,
    pub initial_min_yphi: f64,
    pub initial_max_yphi: f64,
    /// τ at which the dilated engine switched to the truncated window.
    pub truncation_tau: Option<f64>,
    pub remeshes: Vec<(f64, RemeshReport)>,
    /// Dilated profiles of the primary engine on a fixed grid over [1, window_phi].
    pub history: ProfileHistory,
    pub final_state: Option<FlowState>,
    pub final_dilated: Option<DilatedState>,
    pub status: RunStatus,
}

/// Derived diagnostics of one engine state.
pub fn measure(e: &Engine, singular_time: f64, window_phi: f64, gauge_c: f64, last_dt: f64) -> SeriesRecord {
    let d = e.dilated_state(singular_time);
    let (tau, scale) = dilated_view(e, singular_time);
    let a = exp(-tau);
    let der = e.derivatives();
    // y_φφ(1) = scale·u_xx at the inner end.
    let yphiphi = scale * der.d2[0];
    let lambda2 = (-1.0 - yphiphi) / a;
    let (c0, c1) = convergence_error(&d, window_phi).unwrap_or((f64::NAN, f64::NAN));
    let n = d.len();
    let max_f = (1..n - 1).map(|i| d.y[i] / d.phi[i]).fold(0.0, f64::max);
    let min_yphi = der.d1.iter().copied().fold(f64::INFINITY, f64::min);
    let max_yphi = der.d1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dt = if e.is_dilated() { last_dt * a } else { last_dt };
    SeriesRecord {
        step: e.steps(),
        t: singular_time - a,
        tau,
        a,
        b: d.phi_end() * a,
        r_sigma0: 2.0 * (1.0 / a + lambda2),
        lambda2_sigma0: lambda2,
        sup_err_c0: c0,
        sup_err_c1: c1,
        max_f,
        min_yphi,
        max_yphi,
        gauge_c,
        max_rm: type_one_monitor(&d),
        dt,
    }
}

fn dilated_pchip(d: &DilatedState) -> Pchip {
    let right = if d.y[d.y.len() - 1] == 0.0 { Some(-1.0) } else { None };
    Pchip::new(&d.phi, &d.y, Some(1.0), right)
}

/// sup |y_a − y_b| over the nodes of `a` in [1, phi_max].
fn sup_difference(a: &DilatedState, b: &DilatedState, phi_max: f64) -> f64 {
    let p = dilated_pchip(b);
    let end = b.phi_end().min(phi_max);
    a.phi
        .iter()
        .zip(&a.y)
        .filter(|(&x, _)| x <= end)
        .map(|(&x, &y)| abs(y - p.eval(x)))
        .fold(0.0, f64::max)
}

/// Record times: a uniform grid of spacing `record_dtau` from τ₀ to `stop`,
/// merged with the extra times and deduplicated.
fn record_times(tau0: f64, stop: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let count = ((stop - tau0) / step + 1e-9) as usize;
    for k in 1..=count {
        out.push(tau0 + step * k as f64);
    }
    out.push(stop);
    out.extend(extra.iter().copied().filter(|&t| t > tau0 && t <= stop));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| abs(*a - *b) < 1e-9);
    out
}

/// Linear interpolation of the truncation value over one record interval.
struct EdgeValue {
    t0: f64,
    v0: f64,
    t1: f64,
    v1: f64,
}

impl RightValue for EdgeValue {
    fn value(&self, time: f64) -> f64 {
        if self.t1 <= self.t0 {
            return self.v1;
        }
        let s = ((time - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0);
        self.v0 + s * (self.v1 - self.v0)
    }
}

fn maybe_remesh(e: &mut Engine, policy: &RemeshPolicy, log: &mut Vec<(f64, RemeshReport)>, tau: f64) {
    if window_fraction(e.x(), policy.window_k) >= policy.min_fraction {
        return;
    }
    let (lo, hi, _, _) = e.bounds().at(e.time());
    let grading = grading_for_window(policy.nodes, policy.grading, lo, hi, policy);
    let target = RemeshPolicy { grading, ..*policy };
    log.push((tau, e.remesh(&target)));
}

/// Evolves `cfg` to `stop_tau`, recording diagnostics every `record_dtau`.
///
/// Engine failures do not propagate: the run stops and the artifacts collected
/// so far are returned with a [`RunStatus::Failed`]. Invalid configurations
/// and initial data outside class C are errors.
pub fn run_flow(cfg: &FlowConfig) -> Result<RunArtifacts, FlowError> {
    let init = make_initial(cfg)?;
    let a0 = cfg.a0();
    let big_t = a0;
    let tau0 = cfg.initial_tau();
    let n = cfg.grid_n;

    let profile = &init.state.profile;
    let phi0: Vec<f64> = profile.f().iter().map(|f| f / a0).collect();
    let y0: Vec<f64> = profile.u().iter().map(|u| u / a0).collect();
    let lambda0 = fit_lambda0(&phi0, &y0);
    let params = BarrierParams::new(cfg.barrier_delta, lambda0).map_err(|e| FlowError::Config {
        key: "barrier_delta",
        message: e.to_string(),
    })?;
    let mut monitor = SandwichMonitor::new(params);

    let run_unscaled = true;
    let run_dilated = matches!(cfg.engine, EngineKind::Dilated | EngineKind::Both);
    let primary_is_dilated = cfg.engine == EngineKind::Dilated;

    let mut unscaled = Engine::new(
        init.sigma.clone(),
        profile.u().to_vec(),
        0.0,
        Bounds::Shrinking { a0, b0: cfg.b0() },
        false,
        RightEnd::Calabi,
        cfg.cfl,
    );
    let gap = cfg.b0() - 3.0 * a0;
    let mut dilated = run_dilated.then(|| {
        Engine::new(init.sigma.clone(), y0.clone(), tau0, Bounds::Expanding { gap }, true, RightEnd::Calabi, cfg.cfl)
    });
    let truncate_at = match cfg.outer_bc {
        OuterBc::FromUnscaled if run_dilated => {
            let ts = ln((cfg.phi_cut - 3.0) / gap);
            Some(ts.max(tau0))
        }
        _ => None,
    };

    let policy = RemeshPolicy {
        nodes: n,
        grading: cfg.grading,
        ..RemeshPolicy::default()
    };

    let hist_grid: Vec<f64> = (0..HISTORY_NODES)
        .map(|i| 1.0 + (cfg.window_phi - 1.0) * i as f64 / (HISTORY_NODES - 1) as f64)
        .collect();
    let mut history = ProfileHistory::new(hist_grid.clone());

    let der0 = profile.derivatives();
    let n0 = phi0.len();
    let initial_max_f = (1..n0 - 1).map(|i| y0[i] / phi0[i]).fold(0.0, f64::max);
    let initial_min_yphi = der0.d1.iter().copied().fold(f64::INFINITY, f64::min);
    let initial_max_yphi = der0.d1.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut extra: Vec<f64> = cfg.snapshot_taus.clone();
    if let Some(ts) = truncate_at {
        extra.push(ts);
    }
    let targets = record_times(tau0, cfg.stop_tau, cfg.record_dtau, &extra);

    let mut tracker = AnchorTracker::new(cfg.anchor_f_ref / a0, tau0);
    let mut out = RunArtifacts {
        series: Vec::new(),
        dilated_series: Vec::new(),
        anchors: Vec::new(),
        snapshots: Vec::new(),
        violations: Vec::new(),
        sandwich_checks: 0,
        min_gap_sub: f64::INFINITY,
        min_gap_super: f64::INFINITY,
        cross_engine: Vec::new(),
        lambda0,
        class_c_margin: init.class_c_margin,
        min_ricci: init.min_ricci,
        initial_max_f,
        initial_min_yphi,
        initial_max_yphi,
        truncation_tau: None,
        remeshes: Vec::new(),
        history: ProfileHistory::new(hist_grid),
        final_state: None,
        final_dilated: None,
        status: RunStatus::Completed,
    };

    // Initial record and monitor pass.
    {
        let primary = if primary_is_dilated { dilated.as_ref().unwrap() } else { &unscaled };
        tracker.start(primary, big_t);
        let (x, u) = (primary.x(), primary.u());
        let scale = dilated_view(primary, big_t).1;
        monitor.check_scaled(0, 0.0, x, u, scale);
    }
    let mut last_dt_u = 0.0;
    let mut last_dt_d = 0.0;
    let mut edge_prev: Option<(f64, f64)> = None;
    let (mut checked_u, mut checked_d) = (0u64, 0u64);

    let record = |out: &mut RunArtifacts,
                      tracker: &mut AnchorTracker,
                      history: &mut ProfileHistory,
                      unscaled: &Engine,
                      dilated: Option<&Engine>,
                      last_dt_u: f64,
                      last_dt_d: f64,
                      tau: f64| {
        let primary = if primary_is_dilated { dilated.unwrap() } else { unscaled };
        let d = primary.dilated_state(big_t);
        let anchor = tracker.record(&d);
        let gauge = anchor.map_or(f64::NAN, |a| a.gauge_c);
        if let Some(a) = anchor {
            out.anchors.push(a);
        }
        let last = if primary_is_dilated { last_dt_d } else { last_dt_u };
        out.series.push(measure(primary, big_t, cfg.window_phi, gauge, last));
        history.push(tau, dilated_pchip(&d).resample(&history.phi));
        if let Some(de) = dilated {
            out.dilated_series.push(measure(de, big_t, cfg.window_phi, f64::NAN, last_dt_d));
            if run_unscaled && !primary_is_dilated {
                let dd = de.dilated_state(big_t);
                let du = unscaled.dilated_state(big_t);
                out.cross_engine.push((tau, sup_difference(&dd, &du, CROSS_ENGINE_PHI)));
            }
        }
        if cfg.snapshot_taus.iter().any(|&s| abs(s - tau) < 1e-9) {
            if let Ok(state) = primary.flow_state(big_t) {
                out.snapshots.push(Snapshot {
                    tau,
                    radial: state.profile,
                    dilated: d,
                    dilated_engine: dilated.map(|de| de.dilated_state(big_t)),
                });
            }
        }
    };

    record(&mut out, &mut tracker, &mut history, &unscaled, dilated.as_ref(), 0.0, 0.0, tau0);

    for &tau in &targets {
        // Unscaled engine first: it supplies the truncation value.
        let t_target = big_t - exp(-tau);
        let result = {
            let watch_primary = !primary_is_dilated;
            let monitor = &mut monitor;
            let tracker = &mut tracker;
            let last = &mut last_dt_u;
            let mut on_step = |e: &Engine, dt: f64| {
                *last = dt;
                if watch_primary {
                    let (tau_now, scale) = dilated_view(e, big_t);
                    let dtau = ln((big_t - e.time() + dt) / (big_t - e.time()));
                    tracker.step(e, big_t, dtau);
                    monitor.check_scaled(e.steps(), tau_now - tau0, e.x(), e.u(), scale);
                }
            };
            unscaled.advance_to(t_target, &NoRight, &mut on_step)
        };
        if let Err(err) = result {
            out.status = fail(&unscaled, big_t, err);
            break;
        }
        if unscaled.steps() >= checked_u + cfg.remesh_interval {
            checked_u = unscaled.steps();
            maybe_remesh(&mut unscaled, &policy, &mut out.remeshes, tau);
        }

        if let Some(de) = dilated.as_mut() {
            let result = if de.right_end() == RightEnd::Dirichlet {
                let x_end = de.x()[de.len() - 1];
                let v1 = sample(&unscaled, big_t, x_end).0;
                let (t0, v0) = edge_prev.unwrap_or((de.time(), v1));
                let edge = EdgeValue { t0, v0, t1: tau, v1 };
                edge_prev = Some((tau, v1));
                advance_dilated(de, tau, &edge, primary_is_dilated, big_t, &mut tracker, &mut monitor, tau0, &mut last_dt_d)
            } else {
                advance_dilated(de, tau, &NoRight, primary_is_dilated, big_t, &mut tracker, &mut monitor, tau0, &mut last_dt_d)
            };
            if let Err(err) = result {
                out.status = fail(de, big_t, err);
                break;
            }
            if de.steps() >= checked_d + cfg.remesh_interval {
                checked_d = de.steps();
                maybe_remesh(de, &policy, &mut out.remeshes, tau);
            }
            if let Some(ts) = truncate_at {
                if out.truncation_tau.is_none() && tau >= ts - 1e-9 {
                    de.truncate_here();
                    let x_end = de.x()[de.len() - 1];
                    edge_prev = Some((tau, sample(&unscaled, big_t, x_end).0));
                    out.truncation_tau = Some(tau);
                }
            }
        }

        record(&mut out, &mut tracker, &mut history, &unscaled, dilated.as_ref(), last_dt_u, last_dt_d, tau);
    }

    out.sandwich_checks = monitor.checks;
    out.min_gap_sub = monitor.min_gap_sub;
    out.min_gap_super = monitor.min_gap_super;
    out.violations = monitor.violations;
    out.history = history;
    let primary = if primary_is_dilated { dilated.as_ref().unwrap() } else { &unscaled };
    out.final_state = primary.flow_state(big_t).ok().map(|mut s| {
        s.anchor_r = tracker.rho_star - s.tau();
        s
    });
    out.final_dilated = dilated.as_ref().map(|e| e.dilated_state(big_t));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn advance_dilated(
    de: &mut Engine,
    tau: f64,
    rv: &dyn RightValue,
    is_primary: bool,
    singular_time: f64,
    tracker: &mut AnchorTracker,
    monitor: &mut SandwichMonitor,
    tau0: f64,
    last: &mut f64,
) -> Result<(), FlowError> {
    let mut on_step = |e: &Engine, dt: f64| {
        *last = dt;
        if is_primary {
            tracker.step(e, singular_time, dt);
            monitor.check(e.steps(), e.time() - tau0, e.x(), e.u());
        }
    };
    de.advance_to(tau, rv, &mut on_step)
}

fn fail(e: &Engine, singular_time: f64, err: FlowError) -> RunStatus {
    RunStatus::Failed {
        step: e.steps(),
        tau: dilated_view(e, singular_time).0,
        message: err.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_times_merge_and_dedup() {
        let t = record_times(0.0, 0.05, 0.01, &[0.02, 0.025, 0.5]);
        assert_eq!(t.len(), 6);
        assert!((t[2] - 0.025).abs() < 1e-12);
        assert!((t[5] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn short_run_is_deterministic_and_ordered() {
        let cfg = FlowConfig {
            grid_n: 256,
            stop_tau: 0.3,
            record_dtau: 0.05,
            ..FlowConfig::default()
        };
        let a = run_flow(&cfg).unwrap();
        let b = run_flow(&cfg).unwrap();
        assert!(a.status.is_completed());
        assert_eq!(a.series, b.series);
        for w in a.series.windows(2) {
            assert!(w[1].t > w[0].t && w[1].tau > w[0].tau);
        }
        let last = a.series.last().unwrap();
        assert!((last.a - (1.0 - last.t)).abs() < 1e-12);
        assert!((last.b - (10.0 - 3.0 * last.t)).abs() < 1e-9);
    }
}
