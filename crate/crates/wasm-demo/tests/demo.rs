use weaktype_wasm_demo::{g_curve, orth_field, region_grid, DemoError, MAX_CELLS};

#[test]
fn region_grid_shape_and_labels() {
    let (nx, ny) = (40, 25);
    let map = region_grid(3.0, 3.0, 2.0, nx, ny).unwrap();
    assert_eq!(map.len(), nx * ny);
    assert!(map.iter().all(|&r| r <= 7));
    let distinct: std::collections::BTreeSet<u8> = map.iter().copied().collect();
    assert!(distinct.len() >= 4, "{distinct:?}");
    // Bottom-left corner is the origin.
    let origin = map[(ny - 1) * nx];
    assert_eq!(Some(origin as usize), region_at(0.0, 0.0));
}

#[test]
fn g_curve_is_increasing() {
    let pts = g_curve(3.0, 200).unwrap();
    assert_eq!(pts.len(), 400);
    for w in pts.chunks(2).collect::<Vec<_>>().windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][1] >= w[0][1]);
    }
}

#[test]
fn orth_field_origin_is_one() {
    // 3 x 3 grid centred on the origin.
    let f = orth_field(1.5, -1.0, 1.0, 0.5, 3, 3).unwrap();
    assert!((f[4] - 1.0).abs() < 1e-6, "{}", f[4]);
    let quad = orth_field(2.0, -1.0, 1.0, 0.5, 3, 3).unwrap();
    // p = 2: K_2 = 1 and U = x^2 + 1 - y^2.
    assert!((quad[0] - (1.0 + 1.0 - 0.25)).abs() < 1e-6);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(matches!(region_grid(3.0, -1.0, 1.0, 2, 2), Err(DemoError::Range(..))));
    assert!(matches!(g_curve(3.0, MAX_CELLS + 1), Err(DemoError::Grid(_))));
    assert!(matches!(orth_field(3.0, -1.0, 1.0, 0.5, 2, 2), Err(DemoError::Library(_))));
    assert!(matches!(region_grid(1.5, 1.0, 1.0, 2, 2), Err(DemoError::Library(_))));
}

fn region_at(x: f64, y: f64) -> Option<usize> {
    use weaktype::special_u_weak::UWContext;
    let ctx = UWContext::new(&weaktype::Exponent::new(3.0).ok()?).ok()?;
    Some(ctx.classify(weaktype::HalfPlanePoint::new(x, y).ok()?).ok()?.index())
}
