use krf_core::analysis::blowup_rates;
use krf_core::flow::reference::ReferenceEngine;
use krf_core::flow::*;
use krf_core::soliton::find_cao_koiso_constant;
use krf_core::KahlerClass;

#[test]
fn reference_engine_moves_endpoints_like_the_class() {
    let mut e = ReferenceEngine::parabola(1.0, 10.0, (-14.0, 14.0), 1121);
    e.advance_to(0.5, 1e-4);
    let (lo, hi) = e.endpoint_values();
    assert!((lo - 0.5).abs() < 1e-4, "φ(r₀) = {lo}");
    assert!((hi - 8.5).abs() < 1e-4, "φ(r₁) = {hi}");
    assert!(e.to_log_profile().unwrap().validate().unwrap().is_valid());
}

#[test]
fn unscaled_endpoints_are_exact() {
    let cfg = FlowConfig {
        grid_n: 256,
        engine: EngineKind::Unscaled,
        stop_tau: -(0.5f64).ln(),
        snapshot_taus: vec![-(0.5f64).ln()],
        ..FlowConfig::default()
    };
    let out = run_flow(&cfg).unwrap();
    assert!(out.status.is_completed());
    let snap = out.snapshots.last().unwrap();
    let f = snap.radial.f();
    assert!((f[0] - 0.5).abs() < 1e-14);
    assert!((f[f.len() - 1] - 8.5).abs() < 1e-13);
    for r in &out.series {
        assert!((r.a - (1.0 - r.t)).abs() < 1e-14);
        assert!((r.b - (10.0 - 3.0 * r.t)).abs() < 1e-13);
    }
}

#[test]
fn cao_koiso_gauge_grows_at_constant_minus_one() {
    // Self-similar shrinking of a soliton with constant C moves the gauge at rate C − 1.
    let cfg = FlowConfig {
        kahler_class: KahlerClass::new(1.0, 3.0).unwrap(),
        initial_kind: InitialKind::CaoKoisoPerturbed,
        grid_n: 512,
        engine: EngineKind::Unscaled,
        stop_tau: 2.5,
        ..FlowConfig::default()
    };
    let out = run_flow(&cfg).unwrap();
    assert!(out.status.is_completed());
    let rates = blowup_rates(&out.series, Some((1.0, 2.5)), None).unwrap();
    let target = find_cao_koiso_constant() - 1.0;
    assert!(((rates.gauge_slope - target) / target).abs() < 0.05, "slope {} vs {target}", rates.gauge_slope);
}

#[test]
fn invalid_configurations_are_rejected() {
    let bad_grid = FlowConfig { grid_n: 64, ..FlowConfig::default() };
    assert!(matches!(run_flow(&bad_grid), Err(FlowError::Config { key: "grid_n", .. })));
    let bad_delta = FlowConfig { barrier_delta: 1e-5, ..FlowConfig::default() };
    assert!(matches!(make_initial(&bad_delta), Err(FlowError::Config { key: "barrier_delta", .. })));
}

#[test]
fn class_c_is_required_of_initial_data() {
    let d = make_initial(&FlowConfig::default()).unwrap();
    assert!(d.class_c_margin > 0.0);
    assert_eq!(d.state.profile.f()[0], 1.0);
    assert_eq!(*d.state.profile.f().last().unwrap(), 10.0);
}
