use std::f64::consts::PI;

use weaktype::constants::{kp, DEFAULT_SERIES_TOL};
use weaktype::special_u_orth::{conformal_strip_to_half, orth_property_suite, OrthContext};
use weaktype::Exponent;

fn ctx(p: f64) -> OrthContext {
    OrthContext::new(&Exponent::new(p).unwrap()).unwrap()
}

/// Composite Simpson rule for (2/pi)^{p+1} int |s|^p e^s / (e^{2s} + 1) ds,
/// the origin value written as a single integral over the real line.
fn origin_by_simpson(p: f64) -> f64 {
    let (a, b, n) = (-60.0, 60.0, 240_000);
    let h = (b - a) / n as f64;
    let f = |s: f64| s.abs().powf(p) / (2.0 * s.cosh());
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (2.0 / PI).powf(p + 1.0) * sum * h / 3.0
}

#[test]
fn origin_value_matches_sharp_constant() {
    for &p in &[1.0, 1.25, 1.5, 1.75, 2.0] {
        let c = ctx(p);
        let u = c.u_orth(0.0, 0.0).unwrap();
        let k = kp(&Exponent::new(p).unwrap(), DEFAULT_SERIES_TOL).unwrap().value;
        assert!((u * k.powf(p) - 1.0).abs() < 1e-6, "p={p}");
        let simpson = origin_by_simpson(p);
        assert!((u - simpson).abs() < 1e-8, "p={p}: {u} vs {simpson}");
    }
}

#[test]
fn quadratic_case_matches_closed_form() {
    // E|B^1_tau|^2 = x^2 + E tau = x^2 + 1 - y^2
    let c = ctx(2.0);
    for i in -20..=20 {
        for j in -49..=49 {
            let (x, y) = (i as f64 * 0.15, j as f64 * 0.02);
            let u = c.u_orth(x, y).unwrap();
            assert!((u - (x * x + 1.0 - y * y)).abs() < 1e-6, "({x}, {y}): {u}");
        }
    }
}

#[test]
fn boundary_limit_of_poisson_integral() {
    for &p in &[1.0, 1.5, 2.0] {
        let c = ctx(p);
        for i in 1..40 {
            let t = -4.0 + i as f64 * 0.2;
            if t.abs() < 1e-9 {
                continue;
            }
            let w = c.poisson_w(t, 1e-8).unwrap();
            let limit = (2.0 / PI).powf(p) * t.abs().ln().abs().powf(p);
            assert!((w - limit).abs() < 1e-5, "p={p} t={t}: {w} vs {limit}");
        }
    }
}

#[test]
fn approaches_outer_branch_at_strip_edge() {
    for &p in &[1.0, 1.25, 1.5, 1.75, 2.0] {
        let c = ctx(p);
        for &x in &[0.0, 0.3, 1.0, 2.5, -1.7] {
            for &y in &[1.0 - 1e-6, -(1.0 - 1e-6)] {
                let gap = (c.u_orth(x, y).unwrap() - f64::abs(x).powf(p)).abs();
                assert!(gap < 1e-4, "p={p} ({x}, {y}): {gap}");
            }
        }
    }
}

#[test]
fn harmonic_inside_the_strip() {
    // nine-point Laplacian, whose truncation error vanishes to sixth order
    // on harmonic functions; kept away from the corners (0, +-1), where the
    // boundary data |x|^p is not smooth
    let c = OrthContext::with_tolerance(&Exponent::new(1.5).unwrap(), 1e-11).unwrap();
    let h = 0.05;
    for i in 0..10 {
        for j in 0..7 {
            let (x, y) = (-2.0 + 0.4 * i as f64, -0.6 + 0.2 * j as f64);
            let u = |a: f64, b: f64| c.u_orth(x + a, y + b).unwrap();
            let axis = u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h);
            let diag = u(h, h) + u(h, -h) + u(-h, h) + u(-h, -h);
            let lap = (4.0 * axis + diag - 20.0 * u(0.0, 0.0)) / 6.0;
            assert!(lap.abs() < 1e-8, "({x}, {y}): {lap}");
        }
    }
}

#[test]
fn modulus_of_conformal_map() {
    for i in 0..50 {
        let (x, y) = (-3.0 + 0.12 * i as f64, -0.98 + 0.039 * i as f64);
        let (a, b) = conformal_strip_to_half(x, y).unwrap();
        assert!(b > 0.0);
        assert!((a.hypot(b) / (PI * x / 2.0).exp() - 1.0).abs() < 1e-14);
        assert!((b.atan2(a) - PI / 2.0 * (1.0 + y)).abs() < 1e-12);
    }
}

#[test]
fn property_suite_passes() {
    for &p in &[1.0, 1.5, 2.0] {
        for check in orth_property_suite(&ctx(p), 300, 17, 1e-7).unwrap() {
            assert!(check.passed, "{}", check.line());
        }
    }
}

#[test]
fn outer_value_fails_plain_majorization_at_corner() {
    // U(0, 1) = 0 < 1 = V(0, 1), so U >= V cannot hold as stated; the
    // rescaled form 1 - K_p^p U >= V does
    let c = ctx(1.5);
    assert!(c.u_orth(0.0, 1.0).unwrap() < c.v_value(0.0, 1.0));
    assert!(c.majorization_gap(0.0, 1.0).unwrap() >= 0.0);
}
