use std::path::Path;
use std::process::{Command, Output};

use krf::report::{ManifestStatus, RatesJson, RunManifest};

fn krf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krf")).args(args).output().expect("spawn krf")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn meta_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .to_string()
}

#[test]
fn soliton_fik_prints_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fik.csv");
    let o = krf(&["soliton", "--family", "fik", "--n", "2048", "--f-max", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(meta_value(&text, "C"), "1.4142135624");
    assert_eq!(meta_value(&text, "family"), "fik");
    let meta = std::fs::read_to_string(out.with_extension("meta")).unwrap();
    assert_eq!(meta, text);
    let p = krf::io::read_radial_csv(&out).unwrap();
    assert_eq!(p.f().len(), 2048);
    assert!((p.f()[2047] - 50.0).abs() < 1e-12);
}

#[test]
fn soliton_cao_koiso_constant_in_range() {
    let o = krf(&["soliton", "--family", "cao-koiso", "--n", "1024"]);
    assert_eq!(o.status.code(), Some(0));
    let c: f64 = meta_value(&stdout(&o), "C").parse().unwrap();
    assert!(c > 0.5 && c < 1.0);
    assert_eq!(meta_value(&stdout(&o), "f_max"), "3");
}

#[test]
fn soliton_rejects_small_node_count() {
    let o = krf(&["soliton", "--family", "fik", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("node count below minimum"));
}

#[test]
fn unknown_family_and_level_are_usage_errors() {
    assert_eq!(krf(&["soliton", "--family", "bryant"]).status.code(), Some(2));
    assert_eq!(krf(&["verify", "--level", "thorough"]).status.code(), Some(2));
    assert_eq!(krf(&["evolve"]).status.code(), Some(2));
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn evolve_rejects_class_below_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "kahler_class = 1, 2.9\n");
    let out = dir.path().join("out");
    let o = krf(&["evolve", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("requires b > 3a"), "{}", stderr(&o));
    assert!(stderr(&o).contains("kahler_class"));
}

#[test]
fn evolve_names_unknown_and_invalid_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "grid_n = 512\ntimestep = 0.1\n");
    let o = krf(&["evolve", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`timestep`"));
    let cfg = write_config(dir.path(), "cfl = 0.9\n");
    let o = krf(&["evolve", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`cfl`"));
}

#[test]
fn evolve_writes_artifacts_and_reproduces_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "kahler_class = 1, 10\ngrid_n = 256\nstop_tau = 6.5\nengine = both\nsnapshot_taus = 1, 3\n",
    );
    let out1 = dir.path().join("one");
    let o = krf(&["evolve", "--config", &cfg, "--out-dir", out1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let manifest: RunManifest = krf::report::read_json(&out1.join("manifest.json")).unwrap();
    assert_eq!(manifest.status, ManifestStatus::Completed);
    assert_eq!(manifest.config["grid_n"], "256");
    assert_eq!(manifest.config.len(), 16);
    assert!(manifest.cross_engine_max.is_some());
    for name in &manifest.artifacts {
        assert!(out1.join(name).is_file(), "missing {name}");
    }
    for name in ["series.csv", "dilated_series.csv", "violations.csv", "anchors.csv"] {
        assert!(manifest.artifacts.iter().any(|a| a == name), "{name} not listed");
    }
    assert_eq!(manifest.artifacts.iter().filter(|a| a.starts_with("snap_tau")).count(), 6);

    // The echoed configuration reproduces the series byte for byte.
    let out2 = dir.path().join("two");
    let echoed = out1.join("config.resolved");
    let o = krf(&["evolve", "--config", echoed.to_str().unwrap(), "--out-dir", out2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["series.csv", "dilated_series.csv"] {
        assert_eq!(std::fs::read(out1.join(name)).unwrap(), std::fs::read(out2.join(name)).unwrap());
    }

    let report = dir.path().join("report.json");
    let o = krf(&[
        "analyze",
        "--series",
        out1.join("series.csv").to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--window",
        "5,6.5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rates: RatesJson = krf::report::read_json(&report).unwrap();
    assert_eq!(rates.window, [5.0, 6.5]);
    assert!((rates.limit_r_times_tt - (4.0 - 2.0 * 2f64.sqrt())).abs() < 0.1);
    assert!(stdout(&o).contains("target 1.171573"));
}

/// Series of an exactly self-similar FIK solution: T = 1, C(τ) = (√2 − 1)τ.
fn stationary_series(path: &Path, taus: impl Iterator<Item = f64>) {
    let s2 = 2f64.sqrt();
    let rows: Vec<_> = taus
        .enumerate()
        .map(|(i, tau)| {
            let a = (-tau).exp();
            krf_core::analysis::SeriesRecord {
                step: i as u64,
                t: 1.0 - a,
                tau,
                a,
                b: 10.0 - 3.0 * (1.0 - a),
                r_sigma0: (4.0 - 2.0 * s2) / a,
                lambda2_sigma0: (1.0 - s2) / a,
                sup_err_c0: 0.1 * (-tau).exp(),
                sup_err_c1: 0.0,
                max_f: 0.5,
                min_yphi: -1.0,
                max_yphi: 1.0,
                gauge_c: (s2 - 1.0) * tau + 0.25,
                max_rm: 4.0,
                dt: 1e-3,
            }
        })
        .collect();
    krf::io::write_series_csv(path, &rows).unwrap();
}

#[test]
fn analyze_recovers_stationary_gauge_slope() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("series.csv");
    stationary_series(&series, (0..=60).map(|k| 0.1 * k as f64));
    let report = dir.path().join("report.json");
    let o = krf(&["analyze", "--series", series.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: RatesJson = krf::report::read_json(&report).unwrap();
    assert!((r.gauge_slope - (2f64.sqrt() - 1.0)).abs() < 1e-9);
    assert!((r.limit_lambda2_times_tt - (1.0 - 2f64.sqrt())).abs() < 1e-9);
    assert!((r.decay_rate_delta0 - 1.0).abs() < 1e-6);
}

#[test]
fn analyze_fails_on_empty_or_truncated_series() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = krf(&["analyze", "--series", empty.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let short = dir.path().join("short.csv");
    stationary_series(&short, (0..5).map(|k| 0.1 * k as f64));
    let o = krf(&["analyze", "--series", short.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let full = dir.path().join("full.csv");
    stationary_series(&full, (0..=30).map(|k| 0.1 * k as f64));
    let text = std::fs::read_to_string(&full).unwrap();
    let cut = dir.path().join("cut.csv");
    std::fs::write(&cut, &text[..text.len() - 40]).unwrap();
    let o = krf(&["analyze", "--series", cut.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!report.exists());
}
