//! The increasing solution `G` of the Riccati equation
//!
//! ```text
//! G'(t) = (p/2)^{p+1} t^{p-2} (t + 1 - G(t))^2,   G(2/p) = 1,
//! ```
//!
//! on `[2/p, t_max]`, and its inverse `h = G^{-1}` on `[1, G(t_max)]`.
//!
//! Two independent constructions are provided: direct fourth-order
//! Runge–Kutta integration ([`build_g_rk`]) and the closed form through
//! modified Bessel functions ([`build_g_bessel`]). Both produce a
//! [`GSolution`] table evaluated by cubic Hermite interpolation.

use std::io::Write;
use std::sync::Arc;

use crate::bessel::bessel_i_scaled;
use crate::constants::{Exponent, Regime};
use crate::error::{domain, Error, Result};

/// Upper bound on `|Jacobian| * step`. The equation becomes stiff for
/// large `p` and `t`, so steps shrink to keep this product small.
const STIFFNESS_BOUND: f64 = 0.1;

pub const DEFAULT_STEP: f64 = 1e-3;

/// `max(10, 20/p)`.
pub fn default_t_max(p: f64) -> f64 {
    10f64.max(20.0 / p)
}

fn super_two(p: &Exponent) -> Result<f64> {
    let pv = p.value();
    if !Regime::SuperTwo.admits(pv) {
        return domain(format!("G is constructed for p > 2, got {pv}"));
    }
    Ok(pv)
}

/// Right-hand side of the Riccati equation.
#[inline]
pub fn riccati_rhs(p: f64, t: f64, g: f64) -> f64 {
    let u = t + 1.0 - g;
    (0.5 * p).powf(p + 1.0) * t.powf(p - 2.0) * u * u
}

#[inline]
fn jacobian_abs(p: f64, t: f64, g: f64) -> f64 {
    2.0 * (0.5 * p).powf(p + 1.0) * t.powf(p - 2.0) * (t + 1.0 - g).abs()
}

/// Tabulated `G` with its derivative on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct GSolution {
    p: f64,
    t: Vec<f64>,
    g: Vec<f64>,
    gp: Vec<f64>,
}

impl GSolution {
    fn from_table(p: f64, t: Vec<f64>, g: Vec<f64>, gp: Vec<f64>) -> Result<Self> {
        let sol = Self { p, t, g, gp };
        sol.check_invariants()?;
        Ok(sol)
    }

    fn check_invariants(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 || self.g.len() != n || self.gp.len() != n {
            return Err(Error::Construction("G table is malformed".into()));
        }
        for i in 0..n {
            let (t, g, gp) = (self.t[i], self.g[i], self.gp[i]);
            if !(g.is_finite() && gp.is_finite()) {
                return Err(Error::Construction(format!("non-finite G at t = {t}")));
            }
            if g >= t + 1.0 {
                return Err(Error::Construction(format!("G(t) >= t + 1 at t = {t}")));
            }
            if gp < 1.0 {
                return Err(Error::Construction(format!("G'(t) = {gp} < 1 at t = {t}")));
            }
            if i > 0 && (self.t[i] <= self.t[i - 1] || g <= self.g[i - 1]) {
                return Err(Error::Construction(format!("G not increasing at t = {t}")));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g
    }

    pub fn gprime_values(&self) -> &[f64] {
        &self.gp
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// `G(t_max)`, the right end of the domain of `h`.
    pub fn s_max(&self) -> f64 {
        *self.g.last().unwrap()
    }

    fn cell(&self, t: f64) -> Result<usize> {
        if !(t >= self.t_min() && t <= self.t_max()) {
            return Err(Error::Evaluation(format!(
                "t = {t} outside the tabulated range [{}, {}]",
                self.t_min(),
                self.t_max()
            )));
        }
        let i = self.t.partition_point(|&x| x <= t);
        Ok(i.saturating_sub(1).min(self.t.len() - 2))
    }

    fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (g0, g1, m0, m1) = (self.g[i], self.g[i + 1], self.gp[i], self.gp[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * g0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * g1
            + (s3 - s2) * h * m1;
        let deriv = (6.0 * s2 - 6.0 * s) * (g0 - g1) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (3.0 * s2 - 2.0 * s) * m1;
        (value, deriv)
    }

    /// Interpolated `G(t)`.
    pub fn g(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        Ok(self.hermite(i, t).0)
    }

    /// Interpolated `G'(t)`.
    pub fn g_prime(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        Ok(self.hermite(i, t).1)
    }

    /// Writes the table as CSV with columns `t,G,G'`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,G,G'")?;
        for i in 0..self.t.len() {
            writeln!(out, "{},{},{}", self.t[i], self.g[i], self.gp[i])?;
        }
        Ok(())
    }
}

/// Integrates the Riccati equation with classical RK4.
///
/// `step` is the largest step used; near the stiff part of the equation
/// the step is reduced so that `|J| h <= 0.1`.
pub fn build_g_rk(p: &Exponent, t_max: f64, step: f64) -> Result<GSolution> {
    let pv = super_two(p)?;
    let t0 = 2.0 / pv;
    if !(t_max > t0) || !t_max.is_finite() {
        return domain(format!("t_max must exceed 2/p = {t0}, got {t_max}"));
    }
    if !(step > 0.0 && step <= 1e-3) {
        return domain(format!("step must lie in (0, 1e-3], got {step}"));
    }
    let f = |t: f64, g: f64| riccati_rhs(pv, t, g);
    let mut ts = vec![t0];
    let mut gs = vec![1.0];
    let mut gps = vec![f(t0, 1.0)];
    let (mut t, mut g) = (t0, 1.0);
    while t < t_max {
        let mut h = step.min(STIFFNESS_BOUND / jacobian_abs(pv, t, g));
        if t + h > t_max || t_max - (t + h) < 1e-3 * h {
            h = t_max - t;
        }
        let k1 = f(t, g);
        let k2 = f(t + 0.5 * h, g + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, g + 0.5 * h * k2);
        let k4 = f(t + h, g + h * k3);
        g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = if h == t_max - t { t_max } else { t + h };
        if g >= t + 1.0 || !g.is_finite() {
            return Err(Error::Construction(format!(
                "integration left the region G < t + 1 at t = {t}"
            )));
        }
        ts.push(t);
        gs.push(g);
        gps.push(f(t, g));
    }
    GSolution::from_table(pv, ts, gs, gps)
}

/// The Bessel representation `k = a1 k1 + a2 k2` of the linearised
/// equation `y k'' + (2 - p) k' - (p/2)^{p+1} y^{p-1} k = 0`, with
/// `k1 = t^{(p-1)/2} I_{-(p-1)/p}(z)`, `k2 = t^{(p-1)/2} I_{(p-1)/p}(z)`
/// and `z = sqrt((p/2)^{p-1} t^p)`.
#[derive(Debug, Clone, Copy)]
pub struct BesselK {
    p: f64,
    nu: f64,
    a1: f64,
    a2: f64,
}

impl BesselK {
    /// Fixes `a1, a2` from `k(2/p) = 1`, `k'(2/p) = p^2/4`.
    pub fn new(p: &Exponent) -> Result<Self> {
        let pv = super_two(p)?;
        let nu = (pv - 1.0) / pv;
        let t0 = 2.0 / pv;
        let z = Self::z_of(pv, t0);
        let scale = (-z).exp(); // values below are scaled by exp(-z)
        let i_m = bessel_i_scaled(-nu, z)? / scale;
        let i_p = bessel_i_scaled(nu, z)? / scale;
        let i_1m = bessel_i_scaled(1.0 - nu, z)? / scale;
        let i_1p = bessel_i_scaled(1.0 + nu, z)? / scale;
        let a = 0.5 * (pv - 1.0);
        let gam = 0.5 * pv;
        let ta = t0.powf(a);
        let ta1 = t0.powf(a - 1.0);
        let (k1, k2) = (ta * i_m, ta * i_p);
        let (d1, d2) = (
            ta1 * gam * z * i_1m,
            ta1 * ((pv - 1.0) * i_p + gam * z * i_1p),
        );
        let det = k1 * d2 - k2 * d1;
        if det.abs() < 1e-14 * (k1 * d2).abs().max((k2 * d1).abs()) {
            return Err(Error::Construction("singular system for a1, a2".into()));
        }
        let rhs = (1.0, 0.25 * pv * pv);
        let a1 = (rhs.0 * d2 - k2 * rhs.1) / det;
        let a2 = (k1 * rhs.1 - d1 * rhs.0) / det;
        Ok(Self { p: pv, nu, a1, a2 })
    }

    fn z_of(p: f64, t: f64) -> f64 {
        ((0.5 * p).powf(p - 1.0) * t.powf(p)).sqrt()
    }

    pub fn coefficients(&self) -> (f64, f64) {
        (self.a1, self.a2)
    }

    /// `(exp(-z) k(t) t^{-(p-1)/2}, exp(-z) k'(t) t^{1-(p-1)/2})`: the
    /// scaled value and derivative, sharing a common positive factor.
    fn scaled(&self, t: f64) -> Result<(f64, f64)> {
        let (p, nu) = (self.p, self.nu);
        let z = Self::z_of(p, t);
        let gam = 0.5 * p;
        let i_m = bessel_i_scaled(-nu, z)?;
        let i_p = bessel_i_scaled(nu, z)?;
        let i_1m = bessel_i_scaled(1.0 - nu, z)?;
        let i_1p = bessel_i_scaled(1.0 + nu, z)?;
        let k = self.a1 * i_m + self.a2 * i_p;
        let dk = self.a1 * gam * z * i_1m + self.a2 * ((p - 1.0) * i_p + gam * z * i_1p);
        Ok((k, dk))
    }

    /// Unscaled `k(t)`; overflows once `z` exceeds about 700.
    pub fn k(&self, t: f64) -> Result<f64> {
        let z = Self::z_of(self.p, t);
        let (k, _) = self.scaled(t)?;
        Ok(k * z.exp() * t.powf(0.5 * (self.p - 1.0)))
    }

    /// Unscaled `k'(t)`.
    pub fn k_prime(&self, t: f64) -> Result<f64> {
        let z = Self::z_of(self.p, t);
        let (_, dk) = self.scaled(t)?;
        Ok(dk * z.exp() * t.powf(0.5 * (self.p - 1.0) - 1.0))
    }

    /// `k'(t) / k(t)`, valid for all `t > 0`; errors if `k` is not positive.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        let (k, dk) = self.scaled(t)?;
        if !(k > 0.0) {
            return Err(Error::Construction(format!("k(t) is not positive at t = {t}")));
        }
        if !(dk > 0.0) {
            return Err(Error::Construction(format!("k'(t) is not positive at t = {t}")));
        }
        Ok(dk / (k * t))
    }

    /// `(G(t), G'(t))` from `G = t + 1 - (2/p)^{p+1} k'/(k t^{p-2})`.
    pub fn g_and_prime(&self, t: f64) -> Result<(f64, f64)> {
        let p = self.p;
        let w = self.log_derivative(t)?;
        let c = (2.0 / p).powf(p + 1.0);
        let g = t + 1.0 - c * w * t.powf(2.0 - p);
        let gp = c * t.powf(2.0 - p) * w * w;
        Ok((g, gp))
    }
}

/// Tabulates the Bessel-form `G` on `[2/p, t_max]`.
///
/// The grid follows the same step rule as [`build_g_rk`] with the
/// default step, so both tables resolve the stiff region alike.
pub fn build_g_bessel(p: &Exponent, t_max: f64) -> Result<GSolution> {
    let pv = super_two(p)?;
    let t0 = 2.0 / pv;
    if !(t_max > t0) || !t_max.is_finite() {
        return domain(format!("t_max must exceed 2/p = {t0}, got {t_max}"));
    }
    let k = BesselK::new(p)?;
    let (mut ts, mut gs, mut gps) = (Vec::new(), Vec::new(), Vec::new());
    let mut t = t0;
    loop {
        let (g, gp) = if t == t0 {
            (1.0, 0.5 * pv)
        } else {
            k.g_and_prime(t)?
        };
        // k'' > 0 follows from k, k' > 0 through the linear equation
        ts.push(t);
        gs.push(g);
        gps.push(gp);
        if t >= t_max {
            break;
        }
        let mut h = DEFAULT_STEP.min(STIFFNESS_BOUND / jacobian_abs(pv, t, g));
        if t + h > t_max || t_max - (t + h) < 1e-3 * h {
            h = t_max - t;
        }
        t = if h == t_max - t { t_max } else { t + h };
    }
    GSolution::from_table(pv, ts, gs, gps)
}

/// The inverse `h = G^{-1}` on `[1, G(t_max)]`.
#[derive(Debug, Clone)]
pub struct HSolution {
    g: Arc<GSolution>,
}

impl HSolution {
    pub fn new(g: Arc<GSolution>) -> Self {
        Self { g }
    }

    pub fn source(&self) -> &GSolution {
        &self.g
    }

    pub fn p(&self) -> f64 {
        self.g.p
    }

    pub fn domain(&self) -> (f64, f64) {
        (1.0, self.g.s_max())
    }

    /// `h(s)`: the `t` with `G(t) = s`.
    pub fn h(&self, s: f64) -> Result<f64> {
        let g = &*self.g;
        if !(s >= 1.0 && s <= g.s_max()) {
            return Err(Error::Evaluation(format!(
                "h evaluated at s = {s}, outside [1, {}]",
                g.s_max()
            )));
        }
        if s == 1.0 {
            return Ok(2.0 / g.p);
        }
        let i = g
            .g
            .partition_point(|&v| v <= s)
            .saturating_sub(1)
            .min(g.t.len() - 2);
        let (mut lo, mut hi) = (g.t[i], g.t[i + 1]);
        // Newton on the Hermite cubic, safeguarded by bisection
        let mut t = lo + (hi - lo) * (s - g.g[i]) / (g.g[i + 1] - g.g[i]);
        for _ in 0..100 {
            let (v, d) = g.hermite(i, t);
            let r = v - s;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - r / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * t.abs().max(1.0) {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }

    /// `h'(s) = (2/p)^{p+1} h(s)^{2-p} (h(s) - s + 1)^{-2}` for `s > 1`.
    pub fn h_prime(&self, s: f64) -> Result<f64> {
        if !(s > 1.0) {
            return domain(format!("h' requires s > 1, got {s}"));
        }
        let p = self.g.p;
        let h = self.h(s)?;
        let gap = h - s + 1.0;
        Ok((2.0 / p).powf(p + 1.0) * h.powf(2.0 - p) / (gap * gap))
    }
}
