use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weaktype::ode_g::{
    build_g_bessel, build_g_rk, riccati_rhs, BesselK, GSolution, HSolution, DEFAULT_STEP,
};
use weaktype::Exponent;

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

/// Derivative at `xs[m]` of the polynomial interpolating `(xs, ys)`.
fn lagrange_derivative(xs: &[f64], ys: &[f64], m: usize) -> f64 {
    let n = xs.len();
    let mut d = 0.0;
    for j in 0..n {
        let weight = if j == m {
            (0..n).filter(|&k| k != m).map(|k| 1.0 / (xs[m] - xs[k])).sum::<f64>()
        } else {
            let num: f64 = (0..n)
                .filter(|&k| k != j && k != m)
                .map(|k| xs[m] - xs[k])
                .product();
            let den: f64 = (0..n).filter(|&k| k != j).map(|k| xs[j] - xs[k]).product();
            num / den
        };
        d += weight * ys[j];
    }
    d
}

/// ODE residual at every interior node, with `G'` estimated from the
/// tabulated `G` values alone (five-point stencil).
fn max_node_residual(sol: &GSolution) -> f64 {
    let (t, g) = (sol.grid(), sol.g_values());
    let mut worst: f64 = 0.0;
    for i in 2..t.len() - 2 {
        let d = lagrange_derivative(&t[i - 2..=i + 2], &g[i - 2..=i + 2], 2);
        let r = (d - riccati_rhs(sol.p(), t[i], g[i])).abs();
        worst = worst.max(r);
    }
    worst
}

#[test]
fn rk_satisfies_invariants_and_residual() {
    for &p in &[2.5, 3.0, 4.0, 6.0] {
        let sol = build_g_rk(&e(p), 10.0, DEFAULT_STEP).unwrap();
        let (t, g, gp) = (sol.grid(), sol.g_values(), sol.gprime_values());
        for i in 0..t.len() {
            assert!(g[i] < t[i] + 1.0);
            assert!(gp[i] >= 1.0, "p={p} t={} G'={}", t[i], gp[i]);
            if i > 0 {
                assert!(g[i] > g[i - 1]);
            }
        }
        let res = max_node_residual(&sol);
        assert!(res < 1e-8, "p={p}: residual {res}");
    }
}

#[test]
fn rk_residual_at_random_points() {
    let sol = build_g_rk(&e(3.0), 10.0, DEFAULT_STEP).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let t = rng.random_range(sol.t_min()..sol.t_max());
        let r = (sol.g_prime(t).unwrap() - riccati_rhs(3.0, t, sol.g(t).unwrap())).abs();
        assert!(r < 1e-8, "t={t}: {r}");
    }
}

#[test]
fn rk_and_bessel_agree() {
    for &p in &[2.5, 3.0, 4.0, 6.0] {
        let rk = build_g_rk(&e(p), 10.0, DEFAULT_STEP).unwrap();
        let k = BesselK::new(&e(p)).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &t) in rk.grid().iter().enumerate().skip(1) {
            let (g, _) = k.g_and_prime(t).unwrap();
            worst = worst.max((g - rk.g_values()[i]).abs());
        }
        assert!(worst < 1e-6, "p={p}: sup |G_rk - G_bessel| = {worst}");
        let table = build_g_bessel(&e(p), 10.0).unwrap();
        assert_eq!(table.g_values()[0], 1.0);
    }
}

#[test]
fn step_refinement_is_stable() {
    let coarse = build_g_rk(&e(3.0), 10.0, 1e-3).unwrap();
    let fine = build_g_rk(&e(3.0), 10.0, 5e-4).unwrap();
    let worst = coarse
        .grid()
        .iter()
        .zip(coarse.g_values())
        .map(|(&t, &g)| (fine.g(t).unwrap() - g).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "refinement changed G by {worst}");
}

#[test]
fn bessel_k_solves_linear_equation() {
    // y k'' + (2 - p) k' - (p/2)^{p+1} y^{p-1} k = 0 by central differences
    let p = 3.0;
    let k = BesselK::new(&e(p)).unwrap();
    let c = (0.5 * p).powf(p + 1.0);
    for i in 0..50 {
        let y = 2.0 / p + 0.05 + i as f64 * 0.08;
        let f = |x: f64| k.k(x).unwrap();
        let d = |h: f64| {
            let (fm, f0, fp) = (f(y - h), f(y), f(y + h));
            ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
        };
        let (a1, a2) = d(2e-3);
        let (b1, b2) = d(1e-3);
        let d1 = (4.0 * b1 - a1) / 3.0;
        let d2 = (4.0 * b2 - a2) / 3.0;
        let k0 = f(y);
        let res = y * d2 + (2.0 - p) * d1 - c * y.powf(p - 1.0) * k0;
        let scale = (y * d2).abs() + ((2.0 - p) * d1).abs() + (c * y.powf(p - 1.0) * k0).abs();
        assert!(res.abs() / scale < 1e-6, "y={y}: relative residual {}", res / scale);
        // analytic derivative agrees with the difference quotient
        assert!((k.k_prime(y).unwrap() - d1).abs() / d1 < 1e-7);
        assert!(k0 > 0.0 && d1 > 0.0 && d2 > 0.0);
    }
}

#[test]
fn h_inverts_g() {
    for &p in &[2.5, 3.0, 4.0] {
        let g = Arc::new(build_g_rk(&e(p), 10.0, DEFAULT_STEP).unwrap());
        let h = HSolution::new(g.clone());
        assert_eq!(h.h(1.0).unwrap(), 2.0 / p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (_, s_max) = h.domain();
        for _ in 0..500 {
            let s = rng.random_range(1.0..s_max);
            let t = h.h(s).unwrap();
            assert!((g.g(t).unwrap() - s).abs() < 1e-9);
            assert!(t > s - 1.0);
            let hp = h.h_prime(s).unwrap();
            assert!(hp > 0.0 && hp <= 1.0, "h'({s}) = {hp}");
        }
    }
}

#[test]
fn h_slope_at_one() {
    let p = 3.0;
    let h = HSolution::new(Arc::new(build_g_rk(&e(p), 10.0, DEFAULT_STEP).unwrap()));
    for &ds in &[1e-3, 1e-4, 1e-5] {
        let q = (h.h(1.0 + ds).unwrap() - h.h(1.0).unwrap()) / ds;
        assert!((q - 2.0 / p).abs() < 5.0 * ds, "ds={ds}: {q}");
        assert!((h.h_prime(1.0 + ds).unwrap() - 2.0 / p).abs() < 5.0 * ds);
    }
}

#[test]
fn h_prime_matches_differences() {
    let h = HSolution::new(Arc::new(build_g_rk(&e(3.0), 10.0, DEFAULT_STEP).unwrap()));
    let mut s = 1.01;
    while s < 10.0 {
        let eps = 1e-4;
        let fd = (h.h(s + eps).unwrap() - h.h(s - eps).unwrap()) / (2.0 * eps);
        assert!((fd - h.h_prime(s).unwrap()).abs() < 1e-5, "s={s}");
        s += 0.173;
    }
}
