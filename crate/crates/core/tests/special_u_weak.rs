use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weaktype::special_u_weak::{BoundaryPair, Region, UWContext};
use weaktype::{Exponent, HalfPlanePoint};

fn ctx(p: f64) -> UWContext {
    UWContext::new(&Exponent::new(p).unwrap()).unwrap()
}

fn pt(x: f64, y: f64) -> HalfPlanePoint {
    HalfPlanePoint { x, y }
}

/// Random points at least `r` away from every region boundary.
fn interior_points(c: &UWContext, n: usize, r: f64, seed: u64) -> Vec<(HalfPlanePoint, Region)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let q = pt(rng.random_range(0.0..3.0), rng.random_range(-1.3..1.3));
        let region = c.classify(q).unwrap();
        let ok = [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r), (r, r), (-r, -r), (r, -r), (-r, r)]
            .iter()
            .all(|&(dx, dy)| {
                q.x + dx >= 0.0 && c.classify(pt(q.x + dx, q.y + dy)).unwrap() == region
            });
        if ok {
            out.push((q, region));
        }
    }
    out
}

#[test]
fn gradient_matches_finite_differences() {
    for &p in &[2.5, 3.0, 4.0] {
        let c = ctx(p);
        let e = 1e-6;
        for (q, region) in interior_points(&c, 3000, 1e-3, 1) {
            let u = |dx: f64, dy: f64| c.u_value(pt(q.x + dx, q.y + dy)).unwrap();
            let fx = (u(e, 0.0) - u(-e, 0.0)) / (2.0 * e);
            let fy = (u(0.0, e) - u(0.0, -e)) / (2.0 * e);
            let (phi, psi) = c.u_gradient_ext(q).unwrap();
            let tol = 1e-5 * phi.abs().max(psi.abs()).max(1.0);
            assert!((phi - fx).abs() < tol, "p={p} {region} {q:?}: phi {phi} vs {fx}");
            assert!((psi - fy).abs() < tol, "p={p} {region} {q:?}: psi {psi} vs {fy}");
        }
    }
}

#[test]
fn second_derivatives_match_finite_differences() {
    for &p in &[2.5, 3.0, 4.0] {
        let c = ctx(p);
        let e = 1e-4;
        for (q, region) in interior_points(&c, 2000, 1e-3, 2) {
            let u = |dx: f64, dy: f64| c.u_value(pt(q.x + dx, q.y + dy)).unwrap();
            let u0 = u(0.0, 0.0);
            let fxx = (u(e, 0.0) - 2.0 * u0 + u(-e, 0.0)) / (e * e);
            let fyy = (u(0.0, e) - 2.0 * u0 + u(0.0, -e)) / (e * e);
            let fxy = (u(e, e) - u(e, -e) - u(-e, e) + u(-e, -e)) / (4.0 * e * e);
            let (uxx, uxy, uyy) = c.u_second_derivs(q).unwrap();
            let tol = 1e-4 * (uxx.abs() + uyy.abs()).max(1.0);
            for (name, a, b) in [("xx", uxx, fxx), ("xy", uxy, fxy), ("yy", uyy, fyy)] {
                assert!((a - b).abs() < tol, "p={p} {region} {q:?}: U_{name} {a} vs {b}");
            }
        }
    }
}

#[test]
fn one_sided_conventions() {
    let c = ctx(3.0);
    // on the D3/D4 segment the D4 side is used
    let q = pt(0.2, 0.8);
    assert_eq!(c.classify(q).unwrap(), Region::D4);
    let e = 1e-7;
    let right = (c.u_value(pt(0.2 + e, 0.8)).unwrap() - c.u_value(q).unwrap()) / e;
    assert!((c.u_gradient_ext(q).unwrap().0 - right).abs() < 1e-5);
    // on y = 1 the D0 side: psi = 0
    let (phi, psi) = c.u_gradient_ext(pt(0.3, 1.0)).unwrap();
    assert_eq!(psi, 0.0);
    assert!((phi + 3f64.powi(4) / 16.0 * 0.09).abs() < 1e-14);
}

#[test]
fn diagonal_gap_at_the_d3_d4_crossing() {
    for &p in &[2.5, 3.0, 4.0] {
        let c = ctx(p);
        let target = -p * p / (2.0 * (p - 1.0));
        for i in 1..20 {
            let x = i as f64 / 20.0 / p;
            // the diagonal through (x, 1 - x) crosses the segment there
            let at = c.diagonal_gap(x, 1.0 - x, 0.0).unwrap();
            let before = c.diagonal_gap(x, 1.0 - x, -1e-11).unwrap();
            assert!((at - target).abs() < 1e-9, "p={p} x={x}: {at}");
            assert!((before - target).abs() < 1e-6, "p={p} x={x}: {before}");
        }
    }
}

#[test]
fn diagonal_monotone_inside_d7() {
    let c = ctx(3.0);
    let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
    assert!(c.diagonal_monotone_check(2.0, -0.4, &ts).unwrap());
    assert!(c.diagonal_monotone_check(0.5, 1.0, &ts).is_err());
    assert!(c.diagonal_monotone_check(0.5, 0.8, &ts).is_err());
}

#[test]
fn tangent_examples() {
    let c = ctx(3.0);
    assert!(c.tangent_check(0.0, 0.0, 1.0, 1.0).unwrap());
    assert!(c.tangent_check(0.4, 0.3, 0.0, 0.0).unwrap());
    assert!(c.tangent_check(0.4, 0.3, 0.1, 0.2).is_err());
    assert!(c.tangent_check(0.4, 0.3, -0.5, 0.1).is_err());
}

#[test]
fn majorization_examples() {
    let c = ctx(3.0);
    assert!(c.majorization_check(pt(0.0, 1.5)).unwrap());
    assert_eq!(c.u_value(pt(0.0, 1.5)).unwrap(), c.v_value(pt(0.0, 1.5)));
    let q = pt(0.2, 0.0);
    assert!((c.u_value(q).unwrap() - c.v_value(q)).abs() < 1e-15);
}

#[test]
fn symmetric_in_y() {
    let c = ctx(4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let (x, y) = (rng.random_range(0.0..3.0), rng.random_range(0.0..1.5));
        assert_eq!(c.u_value(pt(x, y)).unwrap(), c.u_value(pt(x, -y)).unwrap());
        assert_eq!(c.v_value(pt(x, y)), c.v_value(pt(x, -y)));
        let (a, b) = (c.u_gradient_ext(pt(x, y)).unwrap(), c.u_gradient_ext(pt(x, -y)).unwrap());
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, -b.1);
    }
}

#[test]
fn discontinuity_only_at_the_corner_point() {
    let c = ctx(3.0);
    // U jumps at (0, 1): D3 gives 0 along x = 0, D0 gives 1
    assert_eq!(c.u_value(pt(0.0, 1.0)).unwrap(), 1.0);
    assert_eq!(c.u_value(pt(0.0, 1.0 - 1e-9)).unwrap(), 0.0);
    for pair in BoundaryPair::ALL {
        let q = c.boundary_point(pair, 0.5, 4.0).unwrap();
        let (a, b) = pair.regions();
        let gap = (c.branch_value(a, q).unwrap() - c.branch_value(b, q).unwrap()).abs();
        assert!(gap < 1e-9, "{}: {gap}", pair.label());
    }
}
