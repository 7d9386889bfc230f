use krf_core::geometry::*;

/// φ = e^r + e^{2r} with ψ and the eigenvalues in closed form.
fn exact(r: f64) -> (f64, f64, f64, f64) {
    let (e1, e2) = (r.exp(), (2.0 * r).exp());
    let phi = e1 + e2;
    let pr = e1 + 2.0 * e2;
    let prr = e1 + 4.0 * e2;
    let prrr = e1 + 8.0 * e2;
    let psi = 2.0 - pr / phi - prr / pr;
    let psi_r = -(prr * phi - pr * pr) / (phi * phi) - (prrr * pr - prr * prr) / (pr * pr);
    (phi, pr, psi / phi, psi_r / pr)
}

fn max_error(n: usize) -> f64 {
    let r: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
    let phi: Vec<f64> = r.iter().map(|&x| exact(x).0).collect();
    let phi_r: Vec<f64> = r.iter().map(|&x| exact(x).1).collect();
    let log = LogProfile::with_derivative(r.clone(), phi, phi_r).unwrap();
    let radial = to_radial(&log).unwrap();
    let c = curvature(&radial).unwrap();
    // Interior nodes only: the ends use one-sided stencils.
    (2..n - 2)
        .map(|i| {
            let (_, _, l1, l2) = exact(r[i]);
            (c.lambda1[i] - l1).abs().max((c.lambda2[i] - l2).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn chain_rule_curvature_is_second_order() {
    let (coarse, fine) = (max_error(101), max_error(201));
    assert!(fine < 1e-3, "error {fine:e}");
    let order = (coarse / fine).log2();
    assert!(order > 1.8, "observed order {order}");
}

#[test]
fn log_and_radial_round_trip() {
    let n = 400;
    let f: Vec<f64> = (0..n).map(|i| 1.0 + 9.0 * i as f64 / (n - 1) as f64).collect();
    let p = RadialProfile::from_fn(f, |x| (x - 1.0) * (10.0 - x) / 9.0).unwrap();
    let log = to_log(&p, 4.0, 0.0).unwrap();
    assert_eq!(log.len(), n - 2);
    let back = to_radial(&log).unwrap();
    for (a, b) in back.u().iter().zip(&p.u()[1..n - 1]) {
        assert!((a - b).abs() < 1e-12);
    }
    // The parabola is φ = (1 + 10e^{r−r₀})/(1 + e^{r−r₀}) in r.
    let k = n / 3;
    let (r, phi) = (log.r()[k], log.phi()[k]);
    let r0 = -((4.0f64 - 1.0) / (10.0 - 4.0)).ln();
    let expect = (1.0 + 10.0 * (r - r0).exp()) / (1.0 + (r - r0).exp());
    assert!((phi - expect).abs() < 1e-6, "{phi} vs {expect}");
}

#[test]
fn parabola_class_shrinks_linearly() {
    let k = KahlerClass::new(1.0, 10.0).unwrap();
    assert!(k.singular_regime());
    assert_eq!(k.singular_time(), 1.0);
    assert_eq!((k.a_at(0.5), k.b_at(0.5)), (0.5, 8.5));
    assert!(KahlerClass::new(0.0, 1.0).is_err());
}
