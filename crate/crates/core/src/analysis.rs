//! Post-processing of flow output: dilation, distance to the FIK profile,
//! blow-up rate fits and the two routes to λ₂ at Σ₀.

use alloc::vec::Vec;

use thiserror::Error;

use crate::flow::{AnchorRecord, DilatedState, FlowState};
use crate::geometry::rm_terms;
use crate::interp::Pchip;
use crate::math::{abs, exp, linear_fit, ln};
use crate::soliton::fik;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("t = {t} is not before the singular time {singular}")]
    PastSingularTime { t: f64, singular: f64 },
    #[error("window [1, {phi0}] exceeds the represented domain [1, {end}]")]
    WindowTooWide { phi0: f64, end: f64 },
    #[error("series tail is too short: need {needed} records in τ ∈ [{lo}, {hi}], have {have}")]
    InsufficientTail { needed: usize, have: usize, lo: f64, hi: f64 },
    #[error("series spans {span} units of τ, need at least {needed}")]
    ShortSeries { span: f64, needed: f64 },
    #[error("anchor data missing")]
    MissingAnchors,
}

/// Per-record diagnostics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesRecord {
    pub step: u64,
    pub t: f64,
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub r_sigma0: f64,
    pub lambda2_sigma0: f64,
    pub sup_err_c0: f64,
    pub sup_err_c1: f64,
    pub max_f: f64,
    pub min_yphi: f64,
    pub max_yphi: f64,
    pub gauge_c: f64,
    pub max_rm: f64,
    pub dt: f64,
}

impl SeriesRecord {
    /// Column names of the series CSV, in field order.
    pub const COLUMNS: [&'static str; 15] = [
        "step",
        "t",
        "tau",
        "a",
        "b",
        "R_sigma0",
        "lambda2_sigma0",
        "sup_err_c0",
        "sup_err_c1",
        "max_F",
        "min_yphi",
        "max_yphi",
        "gauge_C",
        "max_rm",
        "dt",
    ];

    pub fn values(&self) -> [f64; 15] {
        [
            self.step as f64,
            self.t,
            self.tau,
            self.a,
            self.b,
            self.r_sigma0,
            self.lambda2_sigma0,
            self.sup_err_c0,
            self.sup_err_c1,
            self.max_f,
            self.min_yphi,
            self.max_yphi,
            self.gauge_c,
            self.max_rm,
            self.dt,
        ]
    }

    pub fn from_values(v: &[f64; 15]) -> Self {
        SeriesRecord {
            step: v[0] as u64,
            t: v[1],
            tau: v[2],
            a: v[3],
            b: v[4],
            r_sigma0: v[5],
            lambda2_sigma0: v[6],
            sup_err_c0: v[7],
            sup_err_c1: v[8],
            max_f: v[9],
            min_yphi: v[10],
            max_yphi: v[11],
            gauge_c: v[12],
            max_rm: v[13],
            dt: v[14],
        }
    }

    /// T − t = e^{−τ}.
    pub fn time_to_singularity(&self) -> f64 {
        exp(-self.tau)
    }
}

/// Dilates an unscaled state with its own nodes: φ_i = f_i/(T − t), y_i = u_i/(T − t).
pub fn dilate(s: &FlowState) -> Result<DilatedState, AnalysisError> {
    let gap = s.singular_time - s.t;
    if !(gap > 0.0) {
        return Err(AnalysisError::PastSingularTime {
            t: s.t,
            singular: s.singular_time,
        });
    }
    let scale = 1.0 / gap;
    let mut phi: Vec<f64> = s.profile.f().iter().map(|f| f * scale).collect();
    phi[0] = 1.0;
    let y = s.profile.u().iter().map(|u| u * scale).collect();
    Ok(DilatedState {
        tau: -ln(gap),
        phi,
        y,
    })
}

/// Dilates and resamples onto `grid` (which must start at 1 and stay inside
/// the dilated domain), with exact end slope at φ = 1.
pub fn dilate_onto(s: &FlowState, grid: &[f64]) -> Result<DilatedState, AnalysisError> {
    let d = dilate(s)?;
    let end = d.phi_end();
    if grid[grid.len() - 1] > end * (1.0 + 1e-12) {
        return Err(AnalysisError::WindowTooWide {
            phi0: grid[grid.len() - 1],
            end,
        });
    }
    let right = if d.y[d.y.len() - 1] == 0.0 { Some(-1.0) } else { None };
    let p = Pchip::new(&d.phi, &d.y, Some(1.0), right);
    Ok(DilatedState {
        tau: d.tau,
        phi: grid.to_vec(),
        y: p.resample(grid),
    })
}

/// (sup |y − 𝒴|, sup |y_φ − 𝒴_φ|) over the nodes in [1, φ₀].
pub fn convergence_error(d: &DilatedState, phi0: f64) -> Result<(f64, f64), AnalysisError> {
    let end = d.phi_end();
    if phi0 > end {
        return Err(AnalysisError::WindowTooWide { phi0, end });
    }
    let der = d.derivatives();
    let mut c0: f64 = 0.0;
    let mut c1: f64 = 0.0;
    for (i, &p) in d.phi.iter().enumerate() {
        if p > phi0 {
            break;
        }
        let (yf, ypf, _) = fik(p);
        c0 = c0.max(abs(d.y[i] - yf));
        c1 = c1.max(abs(der.d1[i] - ypf));
    }
    Ok((c0, c1))
}

/// Max of the three reduced Riemann magnitudes over the state.
pub fn type_one_monitor(d: &DilatedState) -> f64 {
    let der = d.derivatives();
    (0..d.len())
        .flat_map(|i| rm_terms(d.phi[i], d.y[i], der.d1[i], der.d2[i]))
        .fold(0.0, f64::max)
}

/// Running-max growth of `max_rm` over the last `span` units of τ: the ratio of
/// the max over the final window to the max before it.
pub fn type_one_trend(series: &[SeriesRecord], span: f64) -> Option<(f64, bool)> {
    let last = series.last()?.tau;
    let cut = last - span;
    let before = series
        .iter()
        .filter(|r| r.tau <= cut)
        .map(|r| r.max_rm)
        .fold(f64::NEG_INFINITY, f64::max);
    let overall = series.iter().map(|r| r.max_rm).fold(f64::NEG_INFINITY, f64::max);
    if !before.is_finite() || before <= 0.0 {
        return None;
    }
    let growth = overall / before - 1.0;
    Some((growth, growth < 0.1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesReport {
    pub limit_r_times_tt: f64,
    pub limit_r_width: f64,
    pub limit_lambda2_times_tt: f64,
    pub limit_lambda2_width: f64,
    pub gauge_slope: f64,
    pub gauge_residual: f64,
    pub decay_rate_delta0: f64,
    pub decay_residual: f64,
    /// τ-window of the limit and slope fits.
    pub window: (f64, f64),
    /// τ-window of the decay fit.
    pub decay_window: (f64, f64),
}

/// Minimum τ coverage of a series handed to [`blowup_rates`].
pub const MIN_SERIES_SPAN: f64 = 2.0;

fn tail(series: &[SeriesRecord], lo: f64, hi: f64) -> Result<Vec<&SeriesRecord>, AnalysisError> {
    let rows: Vec<&SeriesRecord> = series
        .iter()
        .filter(|r| r.tau >= lo - 1e-9 && r.tau <= hi + 1e-9)
        .collect();
    if rows.len() < 3 {
        return Err(AnalysisError::InsufficientTail {
            needed: 3,
            have: rows.len(),
            lo,
            hi,
        });
    }
    Ok(rows)
}

/// Fits the blow-up constants over `window` and the C⁰ decay rate over
/// `decay_window`; `None` selects the trailing 1.5 units of τ for both.
pub fn blowup_rates(
    series: &[SeriesRecord],
    window: Option<(f64, f64)>,
    decay_window: Option<(f64, f64)>,
) -> Result<RatesReport, AnalysisError> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f.tau, l.tau),
        _ => {
            return Err(AnalysisError::ShortSeries {
                span: 0.0,
                needed: MIN_SERIES_SPAN,
            })
        }
    };
    if last - first < MIN_SERIES_SPAN {
        return Err(AnalysisError::ShortSeries {
            span: last - first,
            needed: MIN_SERIES_SPAN,
        });
    }
    let window = window.unwrap_or((last - 1.5, last));
    let decay_window = decay_window.unwrap_or(window);
    let rows = tail(series, window.0, window.1)?;
    let mean_width = |vals: &[f64]| {
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (m, 0.5 * (hi - lo))
    };
    let rt: Vec<f64> = rows.iter().map(|r| r.time_to_singularity() * r.r_sigma0).collect();
    let lt: Vec<f64> = rows
        .iter()
        .map(|r| r.time_to_singularity() * r.lambda2_sigma0)
        .collect();
    let (limit_r, width_r) = mean_width(&rt);
    let (limit_l, width_l) = mean_width(&lt);
    let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    let gauge: Vec<f64> = rows.iter().map(|r| r.gauge_c).collect();
    let (slope, _, gauge_res) = linear_fit(&taus, &gauge);
    let drows = tail(series, decay_window.0, decay_window.1)?;
    let (dt, de): (Vec<f64>, Vec<f64>) = drows
        .iter()
        .filter(|r| r.sup_err_c0 > 0.0)
        .map(|r| (r.tau, ln(r.sup_err_c0)))
        .unzip();
    let (decay, decay_res) = if dt.len() >= 2 {
        let (s, _, res) = linear_fit(&dt, &de);
        (-s, res)
    } else {
        (0.0, 0.0)
    };
    Ok(RatesReport {
        limit_r_times_tt: limit_r,
        limit_r_width: width_r,
        limit_lambda2_times_tt: limit_l,
        limit_lambda2_width: width_l,
        gauge_slope: slope,
        gauge_residual: gauge_res,
        decay_rate_delta0: decay,
        decay_residual: decay_res,
        window,
        decay_window,
    })
}

/// Result of comparing the stencil value of (T − t)λ₂ at Σ₀ with
/// −d/dτ log f_w(0, t) from the anchor reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sigma2Crosscheck {
    /// (τ, stencil value, anchor value) for every compared record.
    pub points: Vec<(f64, f64, f64)>,
    pub max_relative: f64,
}

/// Compares the two routes to λ₂|Σ₀ over records with τ in `range`.
/// Derivatives of log f_w use centred differences of the anchor records.
pub fn sigma2_crosscheck(
    series: &[SeriesRecord],
    anchors: &[AnchorRecord],
    range: (f64, f64),
) -> Result<Sigma2Crosscheck, AnalysisError> {
    if anchors.len() < 3 {
        return Err(AnalysisError::MissingAnchors);
    }
    let mut points = Vec::new();
    let mut max_relative: f64 = 0.0;
    for k in 1..anchors.len() - 1 {
        let tau = anchors[k].tau;
        if tau < range.0 || tau > range.1 {
            continue;
        }
        let Some(rec) = series.iter().find(|r| abs(r.tau - tau) < 1e-9) else {
            continue;
        };
        let (p, q) = (&anchors[k - 1], &anchors[k + 1]);
        let route_anchor = -(q.log_fw - p.log_fw) / (q.tau - p.tau);
        let route_stencil = rec.time_to_singularity() * rec.lambda2_sigma0;
        let rel = abs(route_anchor - route_stencil) / abs(route_stencil).max(1e-300);
        max_relative = max_relative.max(rel);
        points.push((tau, route_stencil, route_anchor));
    }
    if points.is_empty() {
        return Err(AnalysisError::MissingAnchors);
    }
    Ok(Sigma2Crosscheck {
        points,
        max_relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fik_state(n: usize) -> DilatedState {
        let phi: Vec<f64> = (0..n).map(|i| 1.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let mut y: Vec<f64> = phi.iter().map(|&p| fik(p).0).collect();
        y[0] = 0.0;
        DilatedState { tau: 0.0, phi, y }
    }

    #[test]
    fn fik_has_zero_c0_error() {
        let (c0, c1) = convergence_error(&fik_state(401), 3.0).unwrap();
        assert!(c0 < 1e-15);
        assert!(c1 < 1e-4);
    }

    #[test]
    fn shifted_barrier_error() {
        let mut d = fik_state(401);
        for (y, p) in d.y.iter_mut().zip(&d.phi) {
            *y -= 0.2 * p * p;
        }
        let (c0, _) = convergence_error(&d, 3.0).unwrap();
        assert!((c0 - 1.8).abs() < 1e-12);
        assert!(convergence_error(&d, 6.0).is_err());
    }
}
