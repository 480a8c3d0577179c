//! The special function for orthogonal martingales, `1 <= p <= 2`.
//!
//! `U(x, y) = E|B^1_tau|^p` with `tau` the exit time of planar Brownian
//! motion from the strip `|y| < 1`. Inside the strip `U` is the Poisson
//! integral
//!
//! ```text
//! W(a, b) = 2^p / pi^{p+1} * int b |log|t||^p / ((a - t)^2 + b^2) dt
//! ```
//!
//! composed with the conformal map `z -> i exp(pi z / 2)` of the strip onto
//! the upper half-plane; outside it `U(x, y) = |x|^p`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{kp_pow, Exponent, Regime, DEFAULT_SERIES_TOL};
use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;
use crate::report::CheckReport;

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
const MAX_PANELS: usize = 4000;

/// `(alpha, beta)` with `alpha + i beta = i exp(pi (x + i y) / 2)`.
pub fn conformal_strip_to_half(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(y.abs() < 1.0) || !x.is_finite() {
        return domain(format!("({x}, {y}) is not in the strip |y| < 1"));
    }
    let r = (0.5 * PI * x).exp();
    let (s, c) = (0.5 * PI * y).sin_cos();
    Ok((-r * s, r * c))
}

/// `|x+h|^p + |x-h|^p <= 2|x|^p + 2|h|^p` (with `1e-12` relative slack).
pub fn scalar_inequality_check(p: &Exponent, x: f64, h: f64) -> Result<bool> {
    let pv = p.value();
    if !Regime::OrthRange.admits(pv) {
        return domain(format!("the two-point inequality needs 1 <= p <= 2, got {pv}"));
    }
    let lhs = (x + h).abs().powf(pv) + (x - h).abs().powf(pv);
    let rhs = 2.0 * x.abs().powf(pv) + 2.0 * h.abs().powf(pv);
    Ok(lhs <= rhs + 1e-12 * rhs.max(1.0))
}

#[derive(Debug, Clone)]
pub struct OrthContext {
    p: Exponent,
    pv: f64,
    quad_tol: f64,
    /// `K_p^p`
    kp_pow: f64,
}

impl OrthContext {
    pub fn new(p: &Exponent) -> Result<Self> {
        Self::with_tolerance(p, DEFAULT_QUAD_TOL)
    }

    pub fn with_tolerance(p: &Exponent, quad_tol: f64) -> Result<Self> {
        let pv = p.value();
        if !Regime::OrthRange.admits(pv) {
            return domain(format!("the orthogonal function needs 1 <= p <= 2, got {pv}"));
        }
        if !(quad_tol > 0.0) {
            return domain(format!("quadrature tolerance must be positive, got {quad_tol}"));
        }
        let (kp_pow, _) = kp_pow(pv, DEFAULT_SERIES_TOL)?;
        Ok(Self {
            p: *p,
            pv,
            quad_tol,
            kp_pow,
        })
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    pub fn p(&self) -> f64 {
        self.pv
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// `K_p^p`.
    pub fn kp_pow(&self) -> f64 {
        self.kp_pow
    }

    /// The Poisson integral `W(alpha, beta)`.
    ///
    /// Substituting `t = +-e^s` turns the two half-lines into one integral
    /// over `s`, split at the kink `s = 0` and at the kernel peak
    /// `s = ln|alpha|`. The range is cut at `[-S_lo, S_hi]` where explicit
    /// exponential bounds put each discarded tail below `quad_tol / 4`.
    pub fn poisson_w(&self, alpha: f64, beta: f64) -> Result<f64> {
        if !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return domain(format!("W needs beta > 0, got ({alpha}, {beta})"));
        }
        let p = self.pv;
        let pref = 2f64.powf(p) / PI.powf(p + 1.0);
        let r = alpha.hypot(beta);
        let tail_tol = 0.25 * self.quad_tol;
        // Beyond e^s >= 4r the integrand is <= 4 beta s^p e^{-s}; below
        // e^s <= r/4 it is <= 4 beta |s|^p e^s / r^2.
        let tail = |s: f64, scale: f64| {
            pref * 4.0 * beta * s.powf(p) * (-s).exp() / (scale * (1.0 - p / s))
        };
        let mut s_hi = (4.0 * r).ln().max(p + 2.0);
        while tail(s_hi, 1.0) > tail_tol {
            s_hi += 1.0;
        }
        let mut s_lo = (4.0 / r).ln().max(p + 2.0);
        while tail(s_lo, r * r) > tail_tol {
            s_lo += 1.0;
        }
        let f = |s: f64| {
            let e = s.exp();
            let minus = (alpha - e) * (alpha - e) + beta * beta;
            let plus = (alpha + e) * (alpha + e) + beta * beta;
            beta * s.abs().powf(p) * e * (1.0 / minus + 1.0 / plus)
        };
        let mut breaks = vec![0.0];
        if alpha != 0.0 {
            let peak = alpha.abs().ln();
            let width = beta / alpha.abs();
            breaks.extend([peak - 10.0 * width, peak, peak + 10.0 * width]);
        }
        let res = integrate(f, -s_lo, s_hi, &breaks, 0.5 * self.quad_tol / pref, MAX_PANELS)
            .map_err(|e| match e {
                Error::Quadrature(m) => {
                    Error::Quadrature(format!("W({alpha}, {beta}), p = {p}: {m}"))
                }
                other => other,
            })?;
        Ok(pref * res.value)
    }

    /// `U(x, y)`: `|x|^p` off the strip, the Poisson integral inside.
    pub fn u_orth(&self, x: f64, y: f64) -> Result<f64> {
        if y.abs() >= 1.0 {
            return Ok(x.abs().powf(self.pv));
        }
        let (a, b) = conformal_strip_to_half(x, y)?;
        self.poisson_w(a, b)
    }

    /// `1{|y| >= 1} - K_p^p |x|^p`.
    pub fn v_value(&self, x: f64, y: f64) -> f64 {
        let ind = if y.abs() >= 1.0 { 1.0 } else { 0.0 };
        ind - self.kp_pow * x.abs().powf(self.pv)
    }

    /// `V <= 1 - K_p^p U`, the rescaled form of `U <= |x|^p + K_p^{-p}` on
    /// the strip.
    pub fn majorization_gap(&self, x: f64, y: f64) -> Result<f64> {
        Ok(1.0 - self.kp_pow * self.u_orth(x, y)? - self.v_value(x, y))
    }
}

/// Randomised property checks of the orthogonal function with `n`
/// samples each. Finite-difference steps are `0.05`; second differences
/// are compared with `fd_tol` (not divided by the step squared).
pub fn orth_property_suite(
    ctx: &OrthContext,
    n: usize,
    seed: u64,
    fd_tol: f64,
) -> Result<Vec<CheckReport>> {
    let p = ctx.p();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let d = 0.05;
    let u00 = ctx.u_orth(0.0, 0.0)?;
    let q = 4.0 * ctx.quad_tol();
    let (mut concave, mut convex, mut mixed) = (Vec::new(), Vec::new(), Vec::new());
    let (mut lower, mut upper, mut symmetry, mut major) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..n {
        let x: f64 = r.random_range(-3.0..3.0);
        let y: f64 = r.random_range(-1.0 + d..1.0 - d);
        let u = |a: f64, b: f64| ctx.u_orth(a, b);
        let c = u(x, y)?;
        concave.push(u(x, y + d)? - 2.0 * c + u(x, y - d)?);
        convex.push(-(u(x + d, y)? - 2.0 * c + u(x - d, y)?));
        // open quadrant x > 0, 0 < y < 1
        let (qx, qy) = (x.abs() + d, y.abs().clamp(d, 1.0 - d));
        mixed.push(-(u(qx + d, qy + d)? - u(qx + d, qy - d)? - u(qx - d, qy + d)? + u(qx - d, qy - d)?));
        // |y| <= |x|, including points off the strip
        let yy = x * r.random_range(-1.0..=1.0);
        lower.push(u00 - u(x, yy)?);
        upper.push(c - x.abs().powf(p) - u00);
        let mirrored = [u(-x, y)?, u(x, -y)?, u(-x, -y)?];
        symmetry.push(mirrored.iter().map(|m| (m - c).abs()).fold(0.0, f64::max));
        let yo = r.random_range(-2.0..2.0);
        major.push(-ctx.majorization_gap(x, yo)?);
    }
    Ok(vec![
        CheckReport::from_excesses("concave in y", Some(p), fd_tol, concave),
        CheckReport::from_excesses("convex in x", Some(p), fd_tol, convex),
        CheckReport::from_excesses("U_xy >= 0 on the quadrant", Some(p), fd_tol, mixed),
        CheckReport::from_excesses("U >= U(0,0) on |y| <= |x|", Some(p), q, lower),
        CheckReport::from_excesses("U <= |x|^p + U(0,0) on the strip", Some(p), q, upper),
        CheckReport::from_excesses("four-fold symmetry", Some(p), q, symmetry),
        CheckReport::from_excesses("1 - K_p^p U >= V", Some(p), q, major),
    ])
}
