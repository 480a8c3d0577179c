//! The special function `U` and its majorant `V` for the weak-type bound
//! with `p > 2`.
//!
//! The half-plane `x >= 0` splits into regions `D0..D7`; `U` is given by a
//! separate formula on each. Everything is evaluated at `(x, |y|)`: `U`,
//! `V`, `U_xx`, `U_yy` and `phi` are even in `y`, while `psi` and `U_xy`
//! are odd.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::constants::{Exponent, Regime};
use crate::error::{domain, Error, Result};
use crate::ode_g::{build_g_rk, default_t_max, riccati_rhs, GSolution, HSolution, DEFAULT_STEP};
use crate::special_w::HalfPlanePoint;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;
/// Slack for the tangent, monotonicity and majorization checks.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    D0,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
}

impl Region {
    pub const ALL: [Region; 8] = [
        Region::D0,
        Region::D1,
        Region::D2,
        Region::D3,
        Region::D4,
        Region::D5,
        Region::D6,
        Region::D7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        ["D0", "D1", "D2", "D3", "D4", "D5", "D6", "D7"][self.index()]
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Adjacent region pairs, each with a parametrisation of its common
/// boundary in the upper half `y >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryPair {
    /// `y = 1`, `0 < x < 2/p`
    D0D4,
    /// `y = 1`, `x > 2/p`
    D0D6,
    /// `y = (p-1) x`, `x < 1/p`
    D1D2,
    /// `y = x + 1 - 2/p`, `x < 1/p`
    D1D3,
    /// `y = (p-2) x / 2`, `x < 2/p`
    D2D7,
    /// `y = 1 - x`, `1/p < x < 2/p`
    D2D5,
    /// `y = 1 - x`, `x < 1/p`
    D3D4,
    /// `y = x + 1 - 2/p`, `1/p < x < 2/p`
    D4D6,
    /// `h(x + y) = x - y + 1`
    D5D6,
    /// `h(x + y) = x`
    D5D7,
}

impl BoundaryPair {
    pub const ALL: [BoundaryPair; 10] = [
        BoundaryPair::D0D4,
        BoundaryPair::D0D6,
        BoundaryPair::D1D2,
        BoundaryPair::D1D3,
        BoundaryPair::D2D7,
        BoundaryPair::D2D5,
        BoundaryPair::D3D4,
        BoundaryPair::D4D6,
        BoundaryPair::D5D6,
        BoundaryPair::D5D7,
    ];

    pub fn regions(self) -> (Region, Region) {
        use Region::*;
        match self {
            BoundaryPair::D0D4 => (D0, D4),
            BoundaryPair::D0D6 => (D0, D6),
            BoundaryPair::D1D2 => (D1, D2),
            BoundaryPair::D1D3 => (D1, D3),
            BoundaryPair::D2D7 => (D2, D7),
            BoundaryPair::D2D5 => (D2, D5),
            BoundaryPair::D3D4 => (D3, D4),
            BoundaryPair::D4D6 => (D4, D6),
            BoundaryPair::D5D6 => (D5, D6),
            BoundaryPair::D5D7 => (D5, D7),
        }
    }

    pub fn label(self) -> String {
        let (a, b) = self.regions();
        format!("{a}/{b}")
    }
}

/// One point of a region boundary, for export.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundarySample {
    pub pair: BoundaryPair,
    pub x: f64,
    pub y: f64,
}

/// `-p^2/(2(p-1)) + 1/(2x) + p^p x^{p-1} / (2(p-1))`: the jump of the
/// directional slope of `U` across the segment shared by `D3` and `D4`,
/// per unit of `h + k`. Non-negative for `0 < x <= 2/p`.
pub fn corner_gap(p: f64, x: f64) -> f64 {
    -p * p / (2.0 * (p - 1.0)) + 0.5 / x + p.powf(p) * x.powf(p - 1.0) / (2.0 * (p - 1.0))
}

/// Evaluation context for `U` at a fixed `p > 2`.
#[derive(Debug, Clone)]
pub struct UWContext {
    p: Exponent,
    pv: f64,
    /// `p^p / (2^p (p-1))`
    c0: f64,
    h: HSolution,
    boundary_tol: f64,
    /// `U_xy = mixed_sign * (U_xx + U_yy) / 2` on each region, for `y > 0`.
    mixed_sign: [f64; 8],
}

impl UWContext {
    /// Builds `G` by Runge–Kutta with the default grid.
    pub fn new(p: &Exponent) -> Result<Self> {
        let g = build_g_rk(p, default_t_max(p.value()), DEFAULT_STEP)?;
        Self::from_solution(p, Arc::new(g))
    }

    pub fn from_solution(p: &Exponent, g: Arc<GSolution>) -> Result<Self> {
        let pv = p.value();
        if !Regime::SuperTwo.admits(pv) {
            return domain(format!("U is defined for p > 2, got {pv}"));
        }
        if g.p() != pv {
            return Err(Error::Construction(format!(
                "G was built for p = {}, context asks for p = {pv}",
                g.p()
            )));
        }
        let mut ctx = Self {
            p: *p,
            pv,
            c0: pv.powf(pv) / (2f64.powf(pv) * (pv - 1.0)),
            h: HSolution::new(g),
            boundary_tol: DEFAULT_BOUNDARY_TOL,
            mixed_sign: [0.0; 8],
        };
        ctx.probe_mixed_signs()?;
        Ok(ctx)
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> Self {
        self.boundary_tol = tol;
        self
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    pub fn p(&self) -> f64 {
        self.pv
    }

    pub fn g(&self) -> &GSolution {
        self.h.source()
    }

    pub fn h_solution(&self) -> &HSolution {
        &self.h
    }

    /// `p^p / (2^p (p-1))`.
    pub fn coefficient(&self) -> f64 {
        self.c0
    }

    /// `+1` if `U` is linear along `(1, -1)` on the region, `-1` if along
    /// `(1, 1)`, `0` on `D0` and `D7`.
    pub fn mixed_sign(&self, region: Region) -> f64 {
        self.mixed_sign[region.index()]
    }

    fn h_at(&self, s: f64, x: f64, y: f64) -> Result<f64> {
        let s = if s < 1.0 && s > 1.0 - 1e-12 { 1.0 } else { s };
        self.h.h(s).map_err(|e| {
            Error::Evaluation(format!("point ({x}, {y}) needs h({s}): {e}"))
        })
    }

    fn g_at(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        // absorb rounding on the line x - y + 1 = 2/p
        let t_min = self.h.source().t_min();
        let t = if t < t_min && t > t_min - 1e-12 { t_min } else { t };
        let g = self
            .h
            .source()
            .g(t)
            .map_err(|e| Error::Evaluation(format!("point ({x}, {y}) needs G({t}): {e}")))?;
        Ok((g, riccati_rhs(self.pv, t, g)))
    }

    pub fn classify(&self, pt: HalfPlanePoint) -> Result<Region> {
        self.classify_folded(pt.x, pt.y.abs())
    }

    fn classify_folded(&self, x: f64, y: f64) -> Result<Region> {
        let p = self.pv;
        if y >= 1.0 {
            return Ok(Region::D0);
        }
        let line = x + 1.0 - 2.0 / p;
        if (p - 1.0) * x <= y && y < line {
            return Ok(Region::D1);
        }
        if 0.5 * (p - 2.0) * x <= y && y < (1.0 - x).min((p - 1.0) * x) {
            return Ok(Region::D2);
        }
        if line <= y && y < 1.0 - x {
            return Ok(Region::D3);
        }
        if (1.0 - x).max(line) <= y {
            return Ok(Region::D4);
        }
        // same expression as the D2 and D3 upper bounds
        if y >= 1.0 - x {
            let s = (x + y).max(1.0);
            let h = self.h_at(s, x, y)?;
            // both D5 and D6 compare h with x - y + 1; computing that once
            // keeps rounding from leaving a gap between them
            let gap = h - (x - y + 1.0);
            if h >= x && gap < 0.0 {
                return Ok(Region::D5);
            }
            if gap >= 0.0 && y < line {
                return Ok(Region::D6);
            }
        }
        Ok(Region::D7)
    }

    pub fn u_value(&self, pt: HalfPlanePoint) -> Result<f64> {
        let region = self.classify(pt)?;
        self.branch_value(region, pt)
    }

    /// `1{D0} - c x^p` with `c = p^p / (2^p (p-1))`.
    pub fn v_value(&self, pt: HalfPlanePoint) -> f64 {
        let tail = self.c0 * pt.x.powf(self.pv);
        if pt.y.abs() >= 1.0 {
            1.0 - tail
        } else {
            -tail
        }
    }

    /// The formula for `U` on `region`, evaluated at `pt` whether or not
    /// `pt` lies in that region. Used to compare the two branches meeting
    /// at a boundary.
    pub fn branch_value(&self, region: Region, pt: HalfPlanePoint) -> Result<f64> {
        let (p, c0) = (self.pv, self.c0);
        let (x, y) = (pt.x, pt.y.abs());
        Ok(match region {
            Region::D0 => 1.0 - c0 * x.powf(p),
            Region::D1 => {
                let a = p.powf(p) / (2.0 * (p - 1.0) * (p - 2.0).powf(p - 2.0));
                a * x * (y - x).max(0.0).powf(p - 1.0)
            }
            Region::D2 => {
                (x + y).powf(p - 1.0) * ((p - 1.0) * y - 0.5 * (p * p - 2.0 * p + 2.0) * x)
                    / (p - 1.0)
            }
            Region::D3 => {
                x * (-(p - 2.0).powi(2) + p * p * (y - x)) / (2.0 * (p - 1.0) * (1.0 + x - y))
            }
            Region::D4 => {
                1.0 - p * p / (2.0 * (p - 1.0)) * (1.0 - y)
                    - c0 * (x + y - 1.0) * (x + 1.0 - y).powf(p - 1.0)
            }
            Region::D5 => {
                let h = self.h_at(x + y, x, y)?;
                c0 * h.powf(p - 1.0) * ((p - 1.0) * h - p * x)
            }
            Region::D6 => {
                let t = x - y + 1.0;
                let (g, _) = self.g_at(t, x, y)?;
                1.0 - 2.0 * (1.0 - y) / (2.0 + x - y - g)
                    - c0 * t.powf(p - 1.0) * (x - (p - 1.0) * (1.0 - y))
            }
            Region::D7 => -c0 * x.powf(p),
        })
    }

    /// `(phi, psi)`: the gradient of `U` with the one-sided conventions on
    /// `dD0` (the `D0` side) and on the segment shared by `D3` and `D4`
    /// (the `D4` side). Both conventions coincide with the first matching
    /// region, so this is the branch gradient of `classify(pt)`.
    pub fn u_gradient_ext(&self, pt: HalfPlanePoint) -> Result<(f64, f64)> {
        let region = self.classify(pt)?;
        self.branch_gradient(region, pt)
    }

    /// Gradient formula of `region` at `pt`, reflected for `y < 0`.
    pub fn branch_gradient(&self, region: Region, pt: HalfPlanePoint) -> Result<(f64, f64)> {
        let (p, c0) = (self.pv, self.c0);
        let (x, y) = (pt.x, pt.y.abs());
        let (ux, uy) = match region {
            Region::D0 | Region::D7 => (-p * c0 * x.powf(p - 1.0), 0.0),
            Region::D1 => {
                let b = p.powf(p) / (2.0 * (p - 2.0).powf(p - 2.0));
                let d = (y - x).max(0.0).powf(p - 2.0);
                (b / (p - 1.0) * d * (y - p * x), b * x * d)
            }
            Region::D2 => {
                let s = (x + y).powf(p - 2.0);
                (
                    p / (2.0 * (p - 1.0)) * s * ((p - 2.0) * y - (p * p - 2.0 * p + 2.0) * x),
                    0.5 * p * s * (2.0 * y - (p - 2.0) * x),
                )
            }
            Region::D3 => {
                let d = 1.0 + x - y;
                (
                    -p * p / (2.0 * (p - 1.0)) + 2.0 * (1.0 - y) / (d * d),
                    2.0 * x / (d * d),
                )
            }
            Region::D4 => {
                let b = (x + 1.0 - y).powf(p - 2.0);
                (
                    -c0 * b * (p * x - (p - 2.0) * (1.0 - y)),
                    p * p / (2.0 * (p - 1.0)) + c0 * b * ((p - 2.0) * x - p * (1.0 - y)),
                )
            }
            Region::D5 => {
                let s = x + y;
                let h = self.h_at(s, x, y)?;
                let d = h - s + 1.0;
                let common = 2.0 * (h - x) / (d * d);
                (common - p * c0 * h.powf(p - 1.0), common)
            }
            Region::D6 => {
                let t = x - y + 1.0;
                let (g, _) = self.g_at(t, x, y)?;
                let e = 2.0 + x - y - g;
                (
                    2.0 * (1.0 - y) / (e * e) - p * c0 * t.powf(p - 1.0),
                    2.0 * (1.0 + x - g) / (e * e),
                )
            }
        };
        Ok((ux, if pt.y < 0.0 { -uy } else { uy }))
    }

    /// `(U_xx, U_xy, U_yy)` of the region formula, without the interior
    /// check.
    pub fn branch_second_derivs(
        &self,
        region: Region,
        pt: HalfPlanePoint,
    ) -> Result<(f64, f64, f64)> {
        let (p, c0) = (self.pv, self.c0);
        let (x, y) = (pt.x, pt.y.abs());
        let (uxx, uyy) = match region {
            Region::D0 | Region::D7 => (-p * (p - 1.0) * c0 * x.powf(p - 2.0), 0.0),
            Region::D1 => {
                let b = p.powf(p) / (2.0 * (p - 2.0).powf(p - 2.0)) * (y - x).powf(p - 3.0);
                (b * (p * x - 2.0 * y), b * (p - 2.0) * x)
            }
            Region::D2 => {
                let b = -p * (x + y).powf(p - 3.0);
                (
                    b * (0.5 * (p * p - 2.0 * p + 2.0) * x + y),
                    b * (0.5 * (p * p - 4.0 * p + 2.0) * x - (p - 1.0) * y),
                )
            }
            Region::D3 => {
                let d3 = (1.0 + x - y).powi(3);
                (-4.0 * (1.0 - y) / d3, 4.0 * x / d3)
            }
            Region::D4 => {
                let b = (p / 2.0).powf(p) * (x + 1.0 - y).powf(p - 3.0);
                (
                    -b * (p * x + (p - 4.0) * (y - 1.0)),
                    b * (-(p - 4.0) * x + p * (1.0 - y)),
                )
            }
            Region::D5 => {
                let s = x + y;
                let h = self.h_at(s, x, y)?;
                let hp = self.h.h_prime(s)?;
                let d = h - s + 1.0;
                let a = 2.0 / (d * d);
                let b = 2.0 * (h - x) * (hp - 1.0) / d;
                (a * (-2.0 + hp - b), a * (hp - b))
            }
            Region::D6 => {
                let t = x - y + 1.0;
                let (g, gp) = self.g_at(t, x, y)?;
                let e = 2.0 + x - y - g;
                let common = -4.0 * (1.0 - y) * (1.0 - gp) / e.powi(3);
                (
                    common - p.powf(p + 1.0) / 2f64.powf(p) * t.powf(p - 2.0),
                    common + 2.0 * (2.0 - gp) / (e * e),
                )
            }
        };
        let mut uxy = self.mixed_sign[region.index()] * 0.5 * (uxx + uyy);
        if pt.y < 0.0 {
            uxy = -uxy;
        }
        Ok((uxx, uxy, uyy))
    }

    /// `(U_xx, U_xy, U_yy)` at a point at least `boundary_tol` away from
    /// every region boundary.
    pub fn u_second_derivs(&self, pt: HalfPlanePoint) -> Result<(f64, f64, f64)> {
        let region = self.classify(pt)?;
        if !self.is_interior(pt, region, self.boundary_tol)? {
            return Err(Error::Evaluation(format!(
                "({}, {}) is within {} of the boundary of {region}",
                pt.x, pt.y, self.boundary_tol
            )));
        }
        self.branch_second_derivs(region, pt)
    }

    /// Whether `pt` and the four points at distance `r` from it along the
    /// axes all lie in `region`, with `x, |y| >= r`.
    pub fn is_interior(&self, pt: HalfPlanePoint, region: Region, r: f64) -> Result<bool> {
        if pt.x < r || pt.y.abs() < r {
            return Ok(false);
        }
        for (dx, dy) in [(r, 0.0), (-r, 0.0), (0.0, r), (0.0, -r)] {
            let q = HalfPlanePoint { x: pt.x + dx, y: pt.y + dy };
            if self.classify(q)? != region {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Decides for each of `D1..D6` which of the two diagonal directions `U`
    /// is linear along, by comparing a finite-difference `U_xy` with
    /// `(U_xx + U_yy)/2` at one interior point.
    fn probe_mixed_signs(&mut self) -> Result<()> {
        const STEP: f64 = 1e-4;
        let mut found = [false; 8];
        found[Region::D0.index()] = true;
        found[Region::D7.index()] = true;
        'grid: for i in 1..400 {
            let x = i as f64 * 0.01;
            for j in 1..100 {
                let pt = HalfPlanePoint { x, y: j as f64 * 0.01 };
                let region = self.classify(pt)?;
                if found[region.index()] || !self.is_interior(pt, region, 0.01)? {
                    continue;
                }
                let u = |dx: f64, dy: f64| {
                    self.branch_value(region, HalfPlanePoint { x: x + dx, y: pt.y + dy })
                };
                let fd = (u(STEP, STEP)? - u(STEP, -STEP)? - u(-STEP, STEP)? + u(-STEP, -STEP)?)
                    / (4.0 * STEP * STEP);
                self.mixed_sign[region.index()] = 1.0;
                let (uxx, _, uyy) = self.branch_second_derivs(region, pt)?;
                let half = 0.5 * (uxx + uyy);
                let sign = if (fd - half).abs() <= (fd + half).abs() { 1.0 } else { -1.0 };
                if (fd - sign * half).abs() > 1e-4 * fd.abs().max(1.0) {
                    return Err(Error::Construction(format!(
                        "U_xy on {region} matches neither diagonal: {fd} vs +-{half}"
                    )));
                }
                self.mixed_sign[region.index()] = sign;
                found[region.index()] = true;
                if found.iter().all(|&f| f) {
                    break 'grid;
                }
            }
        }
        if let Some(r) = Region::ALL.iter().find(|r| !found[r.index()]) {
            return Err(Error::Construction(format!("no interior probe point found in {r}")));
        }
        Ok(())
    }

    /// `U(x+h, y+k) <= U(x, y) + phi h + psi k + slack` for `|k| <= |h|`.
    pub fn tangent_check(&self, x: f64, y: f64, h: f64, k: f64) -> Result<bool> {
        if k.abs() > h.abs() {
            return domain(format!("tangent inequality needs |k| <= |h|, got h={h}, k={k}"));
        }
        let base = HalfPlanePoint::new(x, y)?;
        let moved = HalfPlanePoint::new(x + h, y + k)?;
        let (phi, psi) = self.u_gradient_ext(base)?;
        Ok(self.u_value(moved)? <= self.u_value(base)? + phi * h + psi * k + CHECK_SLACK)
    }

    /// `t -> phi(x+t, y+t) - psi(x+t, y+t)`.
    pub fn diagonal_gap(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let (phi, psi) = self.u_gradient_ext(HalfPlanePoint::new(x + t, y + t)?)?;
        Ok(phi - psi)
    }

    /// Whether `diagonal_gap(x, y, .)` is non-increasing along `t_grid`.
    pub fn diagonal_monotone_check(&self, x: f64, y: f64, t_grid: &[f64]) -> Result<bool> {
        if !(x >= 0.0) || !(y.abs() < 1.0) {
            return domain(format!("diagonal check needs x >= 0 and |y| < 1, got ({x}, {y})"));
        }
        let mut ts = t_grid.to_vec();
        ts.sort_by(f64::total_cmp);
        let mut prev = f64::INFINITY;
        for &t in &ts {
            if !(x + t >= 0.0 && (y + t).abs() < 1.0) {
                return domain(format!("t = {t} leaves the domain for ({x}, {y})"));
            }
            let v = self.diagonal_gap(x, y, t)?;
            if v > prev + CHECK_SLACK {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    }

    /// `U >= V` at `pt`.
    pub fn majorization_check(&self, pt: HalfPlanePoint) -> Result<bool> {
        Ok(self.u_value(pt)? >= self.v_value(pt) - 1e-10)
    }

    /// A point on the `pair` boundary, `u in [0, 1]` running along it.
    /// The two boundaries built from `h` run over `s = x + y` in
    /// `[1, s_end]`.
    pub fn boundary_point(&self, pair: BoundaryPair, u: f64, s_end: f64) -> Result<HalfPlanePoint> {
        let p = self.pv;
        let lerp = |a: f64, b: f64| a + (b - a) * u;
        let (x, y) = match pair {
            BoundaryPair::D0D4 => (lerp(0.0, 2.0 / p), 1.0),
            BoundaryPair::D0D6 => (lerp(2.0 / p, 2.0 / p + (s_end - 1.0)), 1.0),
            BoundaryPair::D1D2 => {
                let x = lerp(0.0, 1.0 / p);
                (x, (p - 1.0) * x)
            }
            BoundaryPair::D1D3 => {
                let x = lerp(0.0, 1.0 / p);
                (x, x + 1.0 - 2.0 / p)
            }
            BoundaryPair::D2D7 => {
                let x = lerp(0.0, 2.0 / p);
                (x, 0.5 * (p - 2.0) * x)
            }
            BoundaryPair::D2D5 => {
                let x = lerp(1.0 / p, 2.0 / p);
                (x, 1.0 - x)
            }
            BoundaryPair::D3D4 => {
                let x = lerp(0.0, 1.0 / p);
                (x, 1.0 - x)
            }
            BoundaryPair::D4D6 => {
                let x = lerp(1.0 / p, 2.0 / p);
                (x, x + 1.0 - 2.0 / p)
            }
            BoundaryPair::D5D6 => {
                let s = lerp(1.0, s_end);
                let h = self.h.h(s)?;
                (0.5 * (s + h - 1.0), 0.5 * (s - h + 1.0))
            }
            BoundaryPair::D5D7 => {
                let s = lerp(1.0, s_end);
                let h = self.h.h(s)?;
                (h, s - h)
            }
        };
        HalfPlanePoint::new(x, y)
    }

    /// `n` points per boundary (endpoints included), upper half only.
    pub fn boundary_polylines(&self, n: usize, s_end: f64) -> Result<Vec<BoundarySample>> {
        let mut out = Vec::with_capacity(n * BoundaryPair::ALL.len());
        for pair in BoundaryPair::ALL {
            for i in 0..n {
                let u = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                let pt = self.boundary_point(pair, u, s_end)?;
                out.push(BoundarySample { pair, x: pt.x, y: pt.y });
            }
        }
        Ok(out)
    }

    /// CSV with columns `pair,x,y`.
    pub fn write_boundary_csv<W: Write>(&self, mut out: W, n: usize, s_end: f64) -> Result<()> {
        let io = |e: std::io::Error| Error::Evaluation(format!("write failed: {e}"));
        writeln!(out, "pair,x,y").map_err(io)?;
        for b in self.boundary_polylines(n, s_end)? {
            writeln!(out, "{},{},{}", b.pair.label(), b.x, b.y).map_err(io)?;
        }
        Ok(())
    }
}
