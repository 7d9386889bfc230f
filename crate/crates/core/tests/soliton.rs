use krf_core::soliton::*;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[test]
fn fik_quadrature_matches_closed_form() {
    let p = fik_profile(2048, 50.0).unwrap();
    assert!((p.c - SQRT_2).abs() < 1e-10);
    let worst = p
        .profile
        .f()
        .iter()
        .zip(p.profile.u())
        .map(|(&f, &u)| (u - fik(f).0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "max deviation {worst:e}");
}

#[test]
fn cao_koiso_profile_closes_with_unit_slopes() {
    let p = cao_koiso_profile(1024).unwrap();
    let (f, u) = (p.profile.f(), p.profile.u());
    assert_eq!((f[0], *f.last().unwrap()), (1.0, 3.0));
    assert!(u[1..u.len() - 1].iter().all(|&v| v > 0.0));
    let uf_end = soliton_uf(p.c, 3.0, 0.0);
    assert!((uf_end + 1.0).abs() < 1e-6, "slope at Σ∞ {uf_end}");
    assert!(p.residual() < 1e-4);
    let k = p.kahler_class().unwrap();
    assert_eq!((k.a(), k.b()), (1.0, 3.0));
}

#[test]
fn cao_koiso_constant_closed_agrees() {
    let c = find_cao_koiso_constant();
    assert!((c - cao_koiso_constant_closed()).abs() < 1e-10);
    assert!(cao_koiso_equation(c).abs() < 1e-9);
}

#[test]
fn shooting_recovers_cao_koiso_constant() {
    let c = shoot_cao_koiso_constant(0.5, 0.6).unwrap();
    assert!((c - find_cao_koiso_constant()).abs() < 1e-6, "shot {c}");
}

#[test]
fn quadrature_integral_matches_closed_tail() {
    for c in [0.5, 1.0, SQRT_2, 2.0] {
        let q = soliton_integral(c, None, CONSTANT_QUAD_TOL).value;
        assert!((q - fik_integral_closed(c)).abs() < 1e-12);
    }
}

#[test]
fn small_node_counts_are_rejected() {
    assert!(fik_profile(8, 50.0).is_err());
    assert!(cao_koiso_profile(MIN_SOLITON_NODES - 1).is_err());
}
