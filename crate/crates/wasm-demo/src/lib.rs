//! Three operations for the static page in `www/`: the region map of the
//! `p > 2` special function, the Riccati curve `G`, and the orthogonal
//! function `U` on a grid over the strip.
//!
//! The plain functions are what the tests exercise; the `#[wasm_bindgen]`
//! wrappers only convert errors.

use thiserror::Error;
use wasm_bindgen::prelude::*;
use weaktype::ode_g::{build_g_rk, default_t_max, DEFAULT_STEP};
use weaktype::special_u_orth::OrthContext;
use weaktype::special_u_weak::UWContext;
use weaktype::{Exponent, HalfPlanePoint};

/// Grids larger than this are refused to keep the page responsive.
pub const MAX_CELLS: usize = 250_000;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("grid must have between 1 and {MAX_CELLS} cells, got {0}")]
    Grid(usize),
    #[error("empty range [{0}, {1}]")]
    Range(f64, f64),
    #[error(transparent)]
    Library(#[from] weaktype::Error),
}

fn axis(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, DemoError> {
    if !(lo < hi) {
        return Err(DemoError::Range(lo, hi));
    }
    Ok(match n {
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    })
}

fn cells(nx: usize, ny: usize) -> Result<usize, DemoError> {
    let n = nx.saturating_mul(ny);
    if n == 0 || n > MAX_CELLS {
        return Err(DemoError::Grid(n));
    }
    Ok(n)
}

/// Region index `0..=7` at each grid point, row-major with `y` descending
/// (first row is `y_max`), over the quadrant `[0, x_max] x [0, y_max]`.
pub fn region_grid(
    p: f64,
    x_max: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<u8>, DemoError> {
    let n = cells(nx, ny)?;
    let ctx = UWContext::new(&Exponent::new(p)?)?;
    let xs = axis(0.0, x_max, nx)?;
    let ys = axis(0.0, y_max, ny)?;
    let mut out = Vec::with_capacity(n);
    for &y in ys.iter().rev() {
        for &x in &xs {
            out.push(ctx.classify(HalfPlanePoint::new(x, y)?)?.index() as u8);
        }
    }
    Ok(out)
}

/// `[t_0, G(t_0), t_1, G(t_1), ...]` at `n` points over the default range.
pub fn g_curve(p: f64, n: usize) -> Result<Vec<f64>, DemoError> {
    cells(n, 1)?;
    let e = Exponent::new(p)?;
    let sol = build_g_rk(&e, default_t_max(p), DEFAULT_STEP)?;
    let ts = axis(sol.t_min(), sol.t_max(), n)?;
    let mut out = Vec::with_capacity(2 * n);
    for t in ts {
        out.push(t);
        out.push(sol.g(t)?);
    }
    Ok(out)
}

/// `K_p^p U(x, y)` for `1 <= p <= 2`, row-major with `y` descending over
/// `[-y_max, y_max]`.
pub fn orth_field(
    p: f64,
    x_min: f64,
    x_max: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, DemoError> {
    let n = cells(nx, ny)?;
    let ctx = OrthContext::new(&Exponent::new(p)?)?;
    let xs = axis(x_min, x_max, nx)?;
    let ys = axis(-y_max, y_max, ny)?;
    let mut out = Vec::with_capacity(n);
    for &y in ys.iter().rev() {
        for &x in &xs {
            out.push(ctx.kp_pow() * ctx.u_orth(x, y)?);
        }
    }
    Ok(out)
}

fn js(e: DemoError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = regionGrid)]
pub fn region_grid_js(p: f64, x_max: f64, y_max: f64, nx: usize, ny: usize) -> Result<Vec<u8>, JsError> {
    region_grid(p, x_max, y_max, nx, ny).map_err(js)
}

#[wasm_bindgen(js_name = gCurve)]
pub fn g_curve_js(p: f64, n: usize) -> Result<Vec<f64>, JsError> {
    g_curve(p, n).map_err(js)
}

#[wasm_bindgen(js_name = orthField)]
pub fn orth_field_js(
    p: f64,
    x_min: f64,
    x_max: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsError> {
    orth_field(p, x_min, x_max, y_max, nx, ny).map_err(js)
}
