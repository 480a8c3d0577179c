//! The special function `W` used for the `0 < p < 1` weak-type bound.
//!
//! `W(x, y) = 2x - x^2 + y^2` on `x + |y| <= 1` and `1` elsewhere, on the
//! half-plane `x >= 0`.

use serde::Serialize;

use crate::error::{domain, Result};

/// Rounding slack used by the inequality checks.
pub const W_SLACK: f64 = 1e-12;

/// A point of `[0, inf) x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() || !y.is_finite() {
            return domain(format!("point ({x}, {y}) is not in the closed half-plane x >= 0"));
        }
        Ok(Self { x, y })
    }

    /// The mirror image `(x, |y|)`.
    pub fn folded(self) -> Self {
        Self {
            x: self.x,
            y: self.y.abs(),
        }
    }
}

pub fn w_value(pt: HalfPlanePoint) -> f64 {
    let HalfPlanePoint { x, y } = pt;
    if x + y.abs() <= 1.0 {
        2.0 * x - x * x + y * y
    } else {
        1.0
    }
}

/// `(phi, psi)`: the partial derivatives of `W` off the line `x + |y| = 1`,
/// with the inner branch used on the line itself.
pub fn w_gradient_ext(pt: HalfPlanePoint) -> (f64, f64) {
    let HalfPlanePoint { x, y } = pt;
    if x + y.abs() <= 1.0 {
        (2.0 - 2.0 * x, 2.0 * y)
    } else {
        (0.0, 0.0)
    }
}

/// `W(x+h, y+k) <= W(x, y) + phi h + psi k` for `x, x+h >= 0`, `|k| <= |h|`.
///
/// The `y` increment is the one dominated by the `x` increment. With the
/// roles swapped the inequality fails, e.g. at `(0, -0.5)` with `h = 0`.
pub fn w_tangent_check(x: f64, y: f64, h: f64, k: f64) -> Result<bool> {
    let base = HalfPlanePoint::new(x, y)?;
    let moved = HalfPlanePoint::new(x + h, y + k)?;
    if k.abs() > h.abs() {
        return domain(format!("tangent inequality needs |k| <= |h|, got h={h}, k={k}"));
    }
    let (phi, psi) = w_gradient_ext(base);
    Ok(w_value(moved) <= w_value(base) + phi * h + psi * k + W_SLACK)
}

/// `W >= 1{x + |y| >= 1}` and, when `p` is given and `|y| <= x`,
/// `W <= (2x)^p`.
pub fn w_bounds_check(pt: HalfPlanePoint, p: Option<f64>) -> Result<bool> {
    let w = w_value(pt);
    let indicator = if pt.x + pt.y.abs() >= 1.0 { 1.0 } else { 0.0 };
    let mut ok = w >= indicator - W_SLACK;
    if let Some(p) = p {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("upper bound (2x)^p is checked for 0 < p < 1, got {p}"));
        }
        if pt.y.abs() <= pt.x {
            ok &= w <= (2.0 * pt.x).powf(p) + W_SLACK;
        }
    }
    Ok(ok)
}
