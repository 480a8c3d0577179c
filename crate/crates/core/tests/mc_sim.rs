use weaktype::extremal::resolve_params;
use weaktype::mc_sim::{
    harmonic_rectangle_check, random_subordinate_pair_check, rectangle_exit, extremal_chain_check,
    strip_exit_moment, strip_exit_refinement, weak_type_orth_check, SimConfig, Status,
};

#[test]
fn bit_identical_across_worker_counts() {
    let base = SimConfig::new(11, 3000).with_dt(1e-2);
    let one = strip_exit_moment(1.5, (0.2, -0.3), &base.clone().with_workers(1)).unwrap();
    let three = strip_exit_moment(1.5, (0.2, -0.3), &base.clone().with_workers(3)).unwrap();
    assert_eq!(one, three);
    let a = random_subordinate_pair_check(3.0, 200, &SimConfig::new(5, 20).with_workers(1)).unwrap();
    let b = random_subordinate_pair_check(3.0, 200, &SimConfig::new(5, 20).with_workers(2)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn std_error_scales_like_root_n() {
    let small = strip_exit_moment(2.0, (0.0, 0.0), &SimConfig::new(3, 20_000).with_dt(1e-2)).unwrap();
    let big = strip_exit_moment(2.0, (0.0, 0.0), &SimConfig::new(4, 40_000).with_dt(1e-2)).unwrap();
    let ratio = small.std_error / big.std_error;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");
}

#[test]
fn quadratic_moment_is_expected_exit_time() {
    let cfg = SimConfig::new(8, 100_000).with_dt(2e-3);
    let e = strip_exit_moment(2.0, (0.0, 0.0), &cfg).unwrap();
    assert!((e.mean - 1.0).abs() < 3.0 * e.std_error, "{e:?}");
    // from (x, y): x^2 + 1 - y^2
    let e = strip_exit_moment(2.0, (0.5, 0.6), &cfg).unwrap();
    assert!((e.mean - 0.89).abs() < 3.0 * e.std_error, "{e:?}");
}

#[test]
fn start_next_to_the_edge() {
    let cfg = SimConfig::new(9, 20_000).with_dt(1e-4);
    let e = strip_exit_moment(2.0, (0.0, 0.999), &cfg).unwrap();
    // E tau = 1 - y^2 ~ 0.002
    assert!(e.mean < 0.005, "{e:?}");
}

#[test]
fn halving_the_step_moves_less_than_one_std_error() {
    let cfg = SimConfig::new(42, 1_000_000).with_dt(1e-2);
    let r = strip_exit_refinement(2.0, (0.0, 0.0), &cfg).unwrap();
    assert!((r.fine.mean - r.coarse.mean).abs() < r.coarse.std_error, "{r:?}");
}

#[test]
fn orthogonal_sharpness_identity() {
    for &p in &[1.0, 1.5, 2.0] {
        let r = weak_type_orth_check(p, &SimConfig::new(21, 50_000).with_dt(2e-3)).unwrap();
        assert!(r.margin_sigma.abs() < 3.0, "{}", r.line());
        assert_eq!(r.bound, 1.0);
    }
}

#[test]
fn random_pairs_respect_the_weak_bounds() {
    for &p in &[0.5, 3.0] {
        for r in random_subordinate_pair_check(p, 2000, &SimConfig::new(2, 100)).unwrap() {
            assert!(r.margin_sigma <= 4.0, "{}", r.line());
        }
    }
}

#[test]
fn sampled_chain_matches_atoms() {
    let par = resolve_params(3.0, 1.0 / 24.0, 1.5).unwrap();
    let r = extremal_chain_check(&par, &SimConfig::new(6, 200_000)).unwrap();
    assert!(r.margin_sigma.abs() < 3.0, "{}", r.line());
}

#[test]
fn rectangle_boundary_moments() {
    let cfg = SimConfig::new(13, 20_000).with_dt(1e-2);
    let c = constant_boundary_data(&cfg);
    assert_eq!(c.moment.mean, 1.5f64.powf(1.3));
    assert_eq!(c.moment.std_error, 0.0);
    for r in harmonic_rectangle_check(2.0, 20.0, 0.1, &SimConfig::new(14, 50_000)).unwrap() {
        assert_eq!(r.status, Status::Pass, "{}", r.line());
    }
}

fn constant_boundary_data(cfg: &SimConfig) -> weaktype::mc_sim::RectangleExit {
    rectangle_exit(|_, _| 1.5, 1.3, 6.0, cfg).unwrap()
}

#[test]
fn json_report_fields() {
    let r = weak_type_orth_check(2.0, &SimConfig::new(1, 1000).with_dt(1e-2)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["check", "p", "n", "estimate", "std_error", "bound", "margin_sigma", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
