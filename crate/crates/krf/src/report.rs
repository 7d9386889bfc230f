//! Machine-readable run and analysis reports.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use krf_core::analysis::RatesReport;
use serde::{Deserialize, Serialize};

/// `report.json`: the fitted blow-up quantities with their windows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatesJson {
    pub limit_r_times_tt: f64,
    pub limit_r_width: f64,
    pub limit_lambda2_times_tt: f64,
    pub limit_lambda2_width: f64,
    pub gauge_slope: f64,
    pub gauge_residual: f64,
    pub decay_rate_delta0: f64,
    pub decay_residual: f64,
    pub window: [f64; 2],
    pub decay_window: [f64; 2],
}

impl From<&RatesReport> for RatesJson {
    fn from(r: &RatesReport) -> Self {
        RatesJson {
            limit_r_times_tt: r.limit_r_times_tt,
            limit_r_width: r.limit_r_width,
            limit_lambda2_times_tt: r.limit_lambda2_times_tt,
            limit_lambda2_width: r.limit_lambda2_width,
            gauge_slope: r.gauge_slope,
            gauge_residual: r.gauge_residual,
            decay_rate_delta0: r.decay_rate_delta0,
            decay_residual: r.decay_residual,
            window: [r.window.0, r.window.1],
            decay_window: [r.decay_window.0, r.decay_window.1],
        }
    }
}

/// Flat `key=value` rendering of a rates report.
pub fn rates_key_values(r: &RatesReport) -> Vec<(String, String)> {
    let f = |v: f64| format!("{v:.6}");
    vec![
        ("limit_r_times_tt".into(), f(r.limit_r_times_tt)),
        ("limit_r_width".into(), f(r.limit_r_width)),
        ("limit_lambda2_times_tt".into(), f(r.limit_lambda2_times_tt)),
        ("limit_lambda2_width".into(), f(r.limit_lambda2_width)),
        ("gauge_slope".into(), f(r.gauge_slope)),
        ("gauge_residual".into(), f(r.gauge_residual)),
        ("decay_rate_delta0".into(), f(r.decay_rate_delta0)),
        ("decay_residual".into(), f(r.decay_residual)),
        ("window".into(), format!("{},{}", r.window.0, r.window.1)),
        ("decay_window".into(), format!("{},{}", r.decay_window.0, r.decay_window.1)),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ManifestStatus {
    Completed,
    Failed { step: u64, tau: f64, message: String },
}

/// Record of an `evolve` invocation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub config: BTreeMap<String, String>,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
    pub status: ManifestStatus,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub lambda0: f64,
    pub class_c_margin: f64,
    pub truncation_tau: Option<f64>,
    /// Largest cross-engine sup-difference on [1, 5] over the run.
    pub cross_engine_max: Option<f64>,
    /// Cross-engine sup-difference at each record, as (τ, value).
    pub cross_engine: Vec<(f64, f64)>,
    pub sandwich_violations: usize,
    pub remeshes: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed JSON", path.display()))
}
