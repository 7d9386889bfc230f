use krf_core::barriers::*;
use krf_core::soliton::fik;
use proptest::prelude::*;

/// E[y] written out from the dilated equation, independent of the split.
fn e_direct(phi: f64, y: f64, yp: f64, ypp: f64) -> f64 {
    y * ypp - yp * yp + 2.0 * yp - y * y / (phi * phi) + y - phi * yp
}

/// (∂_τ − E)[𝒴 + sλ(τ)φ²] with a central difference in τ and analytic φ-jets.
fn residual_oracle(phi: f64, lambda: impl Fn(f64) -> f64, tau: f64, sign: f64) -> f64 {
    let h = 1e-5;
    let y = |t: f64| fik(phi).0 + sign * lambda(t) * phi * phi;
    let dtau = (y(tau + h) - y(tau - h)) / (2.0 * h);
    let (f0, f1, f2) = fik(phi);
    let l = sign * lambda(tau);
    dtau - e_direct(phi, f0 + l * phi * phi, f1 + 2.0 * l * phi, f2 + 2.0 * l)
}

proptest! {
    #[test]
    fn split_matches_direct_operator(phi in 1.0f64..1e3, a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let e = OperatorSplit::e(phi, (a, b, c));
        let d = e_direct(phi, a, b, c);
        prop_assert!((e - d).abs() <= 1e-9 * (1.0 + d.abs()));
        // E[y + s] = E[y] + E[s] + M(y, s) with s quadratic.
        let s = (c * phi * phi, 2.0 * c * phi, 2.0 * c);
        let y = (a, b, 0.5 * c);
        let sum = (y.0 + s.0, y.1 + s.1, y.2 + s.2);
        let lhs = OperatorSplit::e(phi, sum);
        let rhs = OperatorSplit::e(phi, y) + OperatorSplit::e(phi, s) + OperatorSplit::m(phi, y, s);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn closed_residuals_match_oracle(phi in 1.0f64..100.0, l0 in 1e-3f64..1.0, tau in 0.0f64..10.0, delta in 1e-9f64..1e-6) {
        let sub = barrier_residual_sub(phi, l0 * (-delta * tau).exp(), delta);
        let sub_oracle = residual_oracle(phi, |t| l0 * (-delta * t).exp(), tau, -1.0);
        prop_assert!((sub - sub_oracle).abs() <= 1e-6 * (1.0 + sub.abs()));
        let sup = barrier_residual_super(phi, l0 * (-0.5 * tau).exp());
        let sup_oracle = residual_oracle(phi, |t| l0 * (-0.5 * t).exp(), tau, 1.0);
        prop_assert!((sup - sup_oracle).abs() <= 1e-6 * (1.0 + sup.abs()));
        let split = barrier_residual_split(phi, l0, 0.5, 1.0);
        prop_assert!((split - barrier_residual_super(phi, l0)).abs() <= 1e-9 * (1.0 + split.abs()));
    }

    #[test]
    fn certificates_hold(phi in 1.0f64..1e4, tau in 0.0f64..20.0, l0 in 1e-3f64..0.3) {
        let p = BarrierParams::new(1e-7, l0).unwrap();
        prop_assert!(barrier_residual_sub(phi, p.lambda_sub(tau), 1e-7) < 0.0);
        prop_assert!(barrier_residual_super(phi, p.lambda_super(tau)) > 0.0);
        prop_assert!(barrier_y1(phi, tau, &p) < fik(phi).0);
        prop_assert!(barrier_y2(phi, tau, &p) > fik(phi).0);
    }
}

fn history(phi: &[f64], taus: &[f64], g: impl Fn(f64, f64) -> f64) -> ProfileHistory {
    let mut h = ProfileHistory::new(phi.to_vec());
    for &t in taus {
        h.push(t, phi.iter().map(|&p| g(p, t)).collect());
    }
    h
}

#[test]
fn interior_crossing_is_located() {
    let phi: Vec<f64> = (0..41).map(|i| 1.0 + 0.05 * i as f64).collect();
    let taus: Vec<f64> = (0..21).map(|k| 0.1 * k as f64).collect();
    let lo = history(&phi, &taus, |p, _| fik(p).0);
    let hi = history(&phi, &taus, |p, t| fik(p).0 + 0.05 - 0.1 * t * (-(p - 2.0).powi(2) * 20.0).exp());
    let v = comparison_check(&lo, &hi, 1.0, &ALPHA_LADDER).unwrap();
    assert!(!v.ordered && v.initially_ordered && v.boundary_ordered);
    let c = v.first_crossing.unwrap();
    assert!((c.phi - 2.0).abs() < 0.2 && c.tau > 0.5 - 1e-12);
    assert!(v.per_alpha.iter().all(|a| !a.1));
}

#[test]
fn mismatched_grids_are_rejected() {
    let lo = history(&[1.0, 2.0, 3.0, 4.0], &[0.0], |p, _| p);
    let hi = history(&[1.0, 2.0, 3.0, 5.0], &[0.0], |p, _| p);
    assert!(comparison_check(&lo, &hi, 1.0, &ALPHA_LADDER).is_err());
    assert!(comparison_check(&lo, &lo, 1.0, &[]).is_err());
}

#[test]
fn class_c_margin_is_attained_at_the_section() {
    let phi: Vec<f64> = (0..200).map(|i| 1.0 + 0.05 * i as f64).collect();
    let y: Vec<f64> = phi.iter().map(|&p| fik(p).0 - 0.1 * p * p).collect();
    let (inside, margin) = class_c_check(&phi, &y);
    assert!(inside);
    assert!((margin - 0.1).abs() < 1e-12);
}
