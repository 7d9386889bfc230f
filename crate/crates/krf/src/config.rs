//! Flat `key = value` run configuration.
//!
//! Keys are the [`FlowConfig`] field names plus `initial_file`, which names the
//! profile CSV used with `initial_kind = from_file`. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use krf_core::flow::{EngineKind, FlowConfig, FlowError, InitialKind, OuterBc};
use krf_core::KahlerClass;
use thiserror::Error;

use crate::io;

pub const KEYS: [&str; 17] = [
    "kahler_class",
    "initial_kind",
    "initial_file",
    "grid_n",
    "grading",
    "cfl",
    "stop_tau",
    "engine",
    "remesh_interval",
    "barrier_delta",
    "perturbation_eps",
    "anchor_f_ref",
    "outer_bc",
    "phi_cut",
    "window_phi",
    "record_dtau",
    "snapshot_taus",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { key: String, line: usize },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    /// The offending key, when the error is tied to one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }
}

impl From<FlowError> for ConfigError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Config { key, message } => ConfigError::Invalid {
                key: key.to_string(),
                message,
            },
            other => ConfigError::Invalid {
                key: "initial_kind".into(),
                message: other.to_string(),
            },
        }
    }
}

/// A parsed configuration together with the path of a file-based profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub flow: FlowConfig,
    pub initial_file: Option<PathBuf>,
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| invalid(key, format!("cannot parse `{v}` as a number")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

/// Splits `text` into key/value pairs, rejecting unknown and repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let key = k.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key, line });
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(ConfigError::Duplicate { key, line });
        }
    }
    Ok(out)
}

/// Parses a configuration. Relative `initial_file` paths resolve against `base`.
pub fn parse_config(text: &str, base: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let pairs = parse_pairs(text)?;
    let mut cfg = FlowConfig::default();
    let mut kind = "parabola".to_string();
    let mut initial_file = None;
    for (key, v) in &pairs {
        let k = key.as_str();
        match k {
            "kahler_class" => {
                let ab = list(k, v)?;
                if ab.len() != 2 {
                    return Err(invalid(k, "expected two numbers `a, b`"));
                }
                cfg.kahler_class = KahlerClass::new(ab[0], ab[1]).map_err(|e| invalid(k, e.to_string()))?;
            }
            "initial_kind" => kind = v.clone(),
            "initial_file" => {
                let p = PathBuf::from(v);
                initial_file = Some(match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                });
            }
            "grid_n" => cfg.grid_n = number(k, v)?,
            "grading" => cfg.grading = number(k, v)?,
            "cfl" => cfg.cfl = number(k, v)?,
            "stop_tau" => cfg.stop_tau = number(k, v)?,
            "engine" => {
                cfg.engine = match v.as_str() {
                    "unscaled" => EngineKind::Unscaled,
                    "dilated" => EngineKind::Dilated,
                    "both" => EngineKind::Both,
                    _ => return Err(invalid(k, "expected unscaled, dilated or both")),
                }
            }
            "remesh_interval" => cfg.remesh_interval = number(k, v)?,
            "barrier_delta" => cfg.barrier_delta = number(k, v)?,
            "perturbation_eps" => cfg.perturbation_eps = number(k, v)?,
            "anchor_f_ref" => cfg.anchor_f_ref = number(k, v)?,
            "outer_bc" => {
                cfg.outer_bc = match v.as_str() {
                    "pinned_exact" => OuterBc::PinnedExact,
                    "from_unscaled" => OuterBc::FromUnscaled,
                    _ => return Err(invalid(k, "expected pinned_exact or from_unscaled")),
                }
            }
            "phi_cut" => cfg.phi_cut = number(k, v)?,
            "window_phi" => cfg.window_phi = number(k, v)?,
            "record_dtau" => cfg.record_dtau = number(k, v)?,
            "snapshot_taus" => cfg.snapshot_taus = list(k, v)?,
            _ => unreachable!("key list checked in parse_pairs"),
        }
    }
    cfg.initial_kind = match kind.as_str() {
        "parabola" => InitialKind::Parabola,
        "cao_koiso_perturbed" => InitialKind::CaoKoisoPerturbed,
        "from_file" => {
            let path = initial_file
                .as_ref()
                .ok_or_else(|| invalid("initial_file", "required when initial_kind = from_file"))?;
            let profile = io::read_radial_csv(path).map_err(|e| invalid("initial_file", format!("{e:#}")))?;
            InitialKind::Profile(profile)
        }
        other => {
            return Err(invalid(
                "initial_kind",
                format!("`{other}` is not parabola, cao_koiso_perturbed or from_file"),
            ))
        }
    };
    if initial_file.is_some() && !matches!(cfg.initial_kind, InitialKind::Profile(_)) {
        return Err(invalid("initial_file", "only used with initial_kind = from_file"));
    }
    cfg.validate()?;
    Ok(RunConfig {
        flow: cfg,
        initial_file,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path.parent())
}

/// Every resolved key with its value, in a form [`parse_config`] accepts.
pub fn resolved_pairs(rc: &RunConfig) -> BTreeMap<String, String> {
    let c = &rc.flow;
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put("kahler_class", format!("{:?}, {:?}", c.a0(), c.b0()));
    put(
        "initial_kind",
        match c.initial_kind {
            InitialKind::Parabola => "parabola",
            InitialKind::CaoKoisoPerturbed => "cao_koiso_perturbed",
            InitialKind::Profile(_) => "from_file",
        }
        .into(),
    );
    if let Some(p) = &rc.initial_file {
        put("initial_file", p.display().to_string());
    }
    put("grid_n", c.grid_n.to_string());
    put("grading", format!("{:?}", c.grading));
    put("cfl", format!("{:?}", c.cfl));
    put("stop_tau", format!("{:?}", c.stop_tau));
    put(
        "engine",
        match c.engine {
            EngineKind::Unscaled => "unscaled",
            EngineKind::Dilated => "dilated",
            EngineKind::Both => "both",
        }
        .into(),
    );
    put("remesh_interval", c.remesh_interval.to_string());
    put("barrier_delta", format!("{:?}", c.barrier_delta));
    put("perturbation_eps", format!("{:?}", c.perturbation_eps));
    put("anchor_f_ref", format!("{:?}", c.anchor_f_ref));
    put(
        "outer_bc",
        match c.outer_bc {
            OuterBc::PinnedExact => "pinned_exact",
            OuterBc::FromUnscaled => "from_unscaled",
        }
        .into(),
    );
    put("phi_cut", format!("{:?}", c.phi_cut));
    put("window_phi", format!("{:?}", c.window_phi));
    put("record_dtau", format!("{:?}", c.record_dtau));
    put(
        "snapshot_taus",
        c.snapshot_taus
            .iter()
            .map(|t| format!("{t:?}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    m
}

/// The resolved configuration as config-file text.
pub fn render_config(rc: &RunConfig) -> String {
    let mut s = String::new();
    for (k, v) in resolved_pairs(rc) {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_when_empty() {
        let rc = parse_config("", None).unwrap();
        assert_eq!(rc.flow, FlowConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config("grid_n = 256\nfoo = 1\n", None).unwrap_err();
        assert_eq!(e.key(), Some("foo"));
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn class_below_threshold_is_rejected() {
        let e = parse_config("kahler_class = 1, 2.9\n", None).unwrap_err();
        assert_eq!(e.key(), Some("kahler_class"));
        assert!(e.to_string().contains("requires b > 3a"));
    }

    #[test]
    fn shipped_canonical_config_is_the_default_run() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/canonical.cfg");
        let rc = load_config(&path).unwrap();
        let expect = FlowConfig {
            snapshot_taus: vec![2.0, 4.0, 6.0],
            ..FlowConfig::default()
        };
        assert_eq!(rc.flow, expect);
    }

    #[test]
    fn render_round_trips() {
        let text = "kahler_class = (1, 12)\ngrid_n = 512\nengine = unscaled\nsnapshot_taus = 1, 2.5\n# note\n";
        let rc = parse_config(text, None).unwrap();
        let again = parse_config(&render_config(&rc), None).unwrap();
        assert_eq!(rc, again);
        assert_eq!(again.flow.snapshot_taus, vec![1.0, 2.5]);
    }
}
