//! Exact atomic constructions of the extremal examples on `[0, 1]` with
//! Lebesgue measure.
//!
//! A process is stored as its initial constant and the list of its
//! increments; each increment is a piecewise-constant function supported on
//! a few intervals. The partition at step `n` is generated by all cut points
//! of the first `n` increments, so nestedness holds by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance of the conditional-average (martingale) test.
pub const MARTINGALE_TOL: f64 = 1e-12;

/// Slack used when comparing atom values with a threshold, since values are
/// accumulated sums of increments.
pub const ATOM_SLACK: f64 = 1e-9;

/// A constant `value` on the interval from `a` to `b`. Intervals are treated
/// as half-open; endpoints only matter through their measure.
///
/// The length is stored separately so that short atoms between two nearby
/// endpoints can carry a length computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub len: f64,
    pub value: f64,
}

impl Piece {
    pub fn new(a: f64, b: f64, value: f64) -> Self {
        Self { a, b, len: b - a, value }
    }

    pub fn with_len(a: f64, b: f64, len: f64, value: f64) -> Self {
        Self { a, b, len, value }
    }

    pub fn len(&self) -> f64 {
        self.len
    }
}

// Non-negative floats order like their bit patterns.
fn key(t: f64) -> u64 {
    t.to_bits()
}

fn unkey(k: u64) -> f64 {
    f64::from_bits(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicMartingale {
    initial: f64,
    increments: Vec<Vec<Piece>>,
}

impl AtomicMartingale {
    /// Validates the increments: pieces inside `[0, 1]`, non-degenerate and
    /// pairwise disjoint within each step. The martingale property is
    /// checked separately by [`AtomicMartingale::martingale_defect`].
    pub fn new(initial: f64, increments: Vec<Vec<Piece>>) -> Result<Self> {
        if !initial.is_finite() {
            return Err(Error::Construction(format!("initial value {initial}")));
        }
        for (n, step) in increments.iter().enumerate() {
            let mut sorted = step.clone();
            sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
            for piece in &sorted {
                if !(piece.a >= 0.0 && piece.b <= 1.0 && piece.a < piece.b)
                    || !piece.value.is_finite()
                    || !((piece.len - (piece.b - piece.a)).abs() <= 1e-14)
                {
                    return Err(Error::Construction(format!(
                        "step {}: bad piece {piece:?}",
                        n + 1
                    )));
                }
            }
            for w in sorted.windows(2) {
                if w[1].a < w[0].b {
                    return Err(Error::Construction(format!(
                        "step {}: atoms overlap at {}",
                        n + 1,
                        w[1].a
                    )));
                }
            }
        }
        Ok(Self {
            initial,
            increments,
        })
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    /// Index of the last step; steps run from `0` to `last_step()`.
    pub fn last_step(&self) -> usize {
        self.increments.len()
    }

    /// The increment `d_n` for `n >= 1`.
    pub fn increment(&self, n: usize) -> &[Piece] {
        &self.increments[n - 1]
    }

    /// `a * M + b`, stepwise.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self {
            initial: a * self.initial + b,
            increments: self
                .increments
                .iter()
                .map(|s| s.iter().map(|q| Piece { value: a * q.value, ..*q }).collect())
                .collect(),
        }
    }

    /// The process with increments multiplied by `signs[n - 1]`.
    pub fn transform(&self, initial: f64, signs: &[f64]) -> Result<Self> {
        if signs.len() != self.increments.len() {
            return Err(Error::Construction(format!(
                "{} signs for {} increments",
                signs.len(),
                self.increments.len()
            )));
        }
        Ok(Self {
            initial,
            increments: self
                .increments
                .iter()
                .zip(signs)
                .map(|(s, &e)| s.iter().map(|q| Piece { value: e * q.value, ..*q }).collect())
                .collect(),
        })
    }

    fn cuts_through(&self, n: usize) -> BTreeSet<u64> {
        let mut cuts: BTreeSet<u64> = [key(0.0), key(1.0)].into();
        for step in &self.increments[..n] {
            for q in step {
                cuts.insert(key(q.a));
                cuts.insert(key(q.b));
            }
        }
        cuts
    }

    /// The step-`n` function as a partition of `[0, 1]` into atoms.
    pub fn partition(&self, n: usize) -> Vec<Piece> {
        let cuts: Vec<f64> = self.cuts_through(n).into_iter().map(unkey).collect();
        // difference array over atom indices
        let mut diff = vec![0.0; cuts.len()];
        for step in &self.increments[..n] {
            for q in step {
                let i = cuts.partition_point(|&c| c < q.a);
                let j = cuts.partition_point(|&c| c < q.b);
                diff[i] += q.value;
                diff[j] -= q.value;
            }
        }
        let lengths: BTreeMap<(u64, u64), f64> = self.increments[..n]
            .iter()
            .flatten()
            .map(|q| ((key(q.a), key(q.b)), q.len))
            .collect();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(cuts.len() - 1);
        for (i, w) in cuts.windows(2).enumerate() {
            acc += diff[i];
            let len = lengths.get(&(key(w[0]), key(w[1]))).copied().unwrap_or(w[1] - w[0]);
            out.push(Piece::with_len(w[0], w[1], len, self.initial + acc));
        }
        out
    }

    /// The step-`n` value at `t`, where `t` is interior to an atom.
    pub fn value_at(&self, n: usize, t: f64) -> f64 {
        let mut v = self.initial;
        for step in &self.increments[..n] {
            for q in step {
                if q.a < t && t < q.b {
                    v += q.value;
                }
            }
        }
        v
    }

    /// Largest relative failure of the martingale property: for every step
    /// `n` and every atom of the step-`(n-1)` partition, the measure-weighted
    /// average of `d_n` over the atom, divided by the weighted average of
    /// `|d_n|` there.
    pub fn martingale_defect(&self) -> f64 {
        let mut cuts: BTreeSet<u64> = [key(0.0), key(1.0)].into();
        let mut worst = 0.0f64;
        for step in &self.increments {
            // atom (lower cut) -> (signed mass, absolute mass)
            let mut mass: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
            for q in step {
                let lower = *cuts.range(..=key(q.a)).next_back().unwrap_or(&key(0.0));
                let mut a = q.a;
                let mut lo = lower;
                // split the piece at cuts strictly inside it
                let inner: Vec<u64> = cuts.range(key(q.a) + 1..key(q.b)).copied().collect();
                if inner.is_empty() {
                    let e = mass.entry(lo).or_insert((0.0, 0.0));
                    e.0 += q.value * q.len;
                    e.1 += q.value.abs() * q.len;
                    continue;
                }
                for c in inner.into_iter().chain(std::iter::once(key(q.b))) {
                    let b = unkey(c);
                    let e = mass.entry(lo).or_insert((0.0, 0.0));
                    e.0 += q.value * (b - a);
                    e.1 += q.value.abs() * (b - a);
                    a = b;
                    lo = c;
                }
            }
            for (s, m) in mass.values() {
                if *m > 0.0 {
                    worst = worst.max(s.abs() / m);
                }
            }
            for q in step {
                cuts.insert(key(q.a));
                cuts.insert(key(q.b));
            }
        }
        worst
    }

    /// `Ok` when [`Self::martingale_defect`] is within [`MARTINGALE_TOL`].
    pub fn check_martingale(&self) -> Result<f64> {
        let d = self.martingale_defect();
        if d <= MARTINGALE_TOL {
            Ok(d)
        } else {
            Err(Error::Construction(format!("martingale defect {d:.3e}")))
        }
    }

    /// `(E|M_n|^p)^{1/p}`, computed as `m (sum (|v|/m)^p len)^{1/p}` with `m`
    /// the largest modulus, which is exact for a process of constant modulus.
    pub fn p_norm(&self, n: usize, p: f64) -> f64 {
        let atoms = self.partition(n);
        let m = atoms.iter().map(|q| q.value.abs()).fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = atoms.iter().map(|q| (q.value.abs() / m).powf(p) * q.len()).sum();
        m * s.powf(1.0 / p)
    }

    /// `sup_n ||M_n||_p`.
    pub fn sup_p_norm(&self, p: f64) -> f64 {
        (0..=self.last_step()).map(|n| self.p_norm(n, p)).fold(0.0, f64::max)
    }

    /// The running maximum `M* = max_{k <= n} |M_k|` as a partition.
    pub fn running_max(&self, n: usize) -> Vec<Piece> {
        let mut atoms = self.partition(n);
        for k in 0..n {
            for q in atoms.iter_mut() {
                let v = self.value_at(k, 0.5 * (q.a + q.b)).abs();
                q.value = q.value.abs().max(v);
            }
        }
        for q in atoms.iter_mut() {
            q.value = q.value.abs();
        }
        atoms
    }

    /// `sup_lambda lambda P(M* >= lambda)^{1/p}` over the whole run.
    pub fn weak_norm_running(&self, p: f64) -> f64 {
        weak_norm(&self.running_max(self.last_step()), p)
    }

    /// `sup_n sup_lambda lambda P(|M_n| >= lambda)^{1/p}`.
    pub fn weak_norm_fixed(&self, p: f64) -> f64 {
        (0..=self.last_step())
            .map(|n| weak_norm(&self.partition(n), p))
            .fold(0.0, f64::max)
    }
}

/// `sup_lambda lambda mu(|v| >= lambda)^{1/p}` for a step function; the
/// supremum is attained at one of the values.
pub fn weak_norm(atoms: &[Piece], p: f64) -> f64 {
    let mut v: Vec<(f64, f64)> = atoms.iter().map(|q| (q.value.abs(), q.len())).collect();
    v.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (mut best, mut mass, mut i) = (0.0f64, 0.0, 0);
    while i < v.len() {
        let level = v[i].0;
        while i < v.len() && v[i].0 == level {
            mass += v[i].1;
            i += 1;
        }
        best = best.max(level * mass.powf(1.0 / p));
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalParams {
    pub p: f64,
    pub x0: f64,
    pub delta: f64,
    pub n_steps: usize,
}

impl ExtremalParams {
    /// `x0 (1 + 2 delta / p)^N - 1/p`.
    pub fn residual(&self) -> f64 {
        self.x0 * (1.0 + 2.0 * self.delta / self.p).powi(self.n_steps as i32) - 1.0 / self.p
    }

    /// `(p - p delta + 4 delta) / ((p + 2 delta)(1 + delta))`, the survival
    /// factor over one pair of steps.
    pub fn ratio(&self) -> f64 {
        let (p, d) = (self.p, self.delta);
        (p - p * d + 4.0 * d) / ((p + 2.0 * d) * (1.0 + d))
    }

    /// The atom lengths `p_0, ..., p_{2N+1}`.
    pub fn weights(&self) -> Vec<f64> {
        let q = self.ratio();
        let mut out = Vec::with_capacity(2 * self.n_steps + 2);
        for n in 0..=self.n_steps {
            let even = q.powi(n as i32);
            out.push(even);
            out.push(even / (1.0 + self.delta));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.p > 2.0
            && self.p.is_finite()
            && self.x0 > 0.0
            && self.x0 < 1.0 / self.p
            && self.delta > 0.0
            && self.n_steps >= 1;
        if !ok {
            return Err(Error::Parameter(format!("invalid parameters {self:?}")));
        }
        if self.residual().abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "x (1 + 2 delta/p)^N != 1/p: residual {:.3e}",
                self.residual()
            )));
        }
        Ok(())
    }
}

/// Chooses `N` from `delta_hint` and solves for `delta` by bisection on
/// `(0, 10 delta_hint]`.
pub fn resolve_params(p: f64, x0: f64, delta_hint: f64) -> Result<ExtremalParams> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("the extremal chain needs p > 2, got {p}")));
    }
    if !(x0 > 0.0 && x0 < 1.0 / p) {
        return Err(Error::Parameter(format!("x0 must lie in (0, 1/p), got {x0}")));
    }
    if !(delta_hint > 0.0 && delta_hint.is_finite()) {
        return Err(Error::Parameter(format!("delta hint must be positive, got {delta_hint}")));
    }
    let target = (1.0 / (p * x0)).ln();
    let n = (target / (2.0 * delta_hint / p).ln_1p()).round().max(1.0);
    if !n.is_finite() || n > i32::MAX as f64 {
        return Err(Error::Parameter(format!("step count {n} out of range")));
    }
    let f = |d: f64| n * (2.0 * d / p).ln_1p() - target;
    let (mut lo, mut hi) = (0.0, 10.0 * delta_hint);
    if !(f(hi) >= 0.0) {
        return Err(Error::Parameter(format!(
            "no delta in (0, {hi}] solves the step equation for N = {n}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lo_params = ExtremalParams { p, x0, delta: lo, n_steps: n as usize };
    let hi_params = ExtremalParams { delta: hi, ..lo_params };
    let params = if lo > 0.0 && lo_params.residual().abs() < hi_params.residual().abs() {
        lo_params
    } else {
        hi_params
    };
    params.validate()?;
    Ok(params)
}

/// The extremal pair `(X, Y)` for `p > 2`.
pub fn build_extremal_pair(params: &ExtremalParams) -> Result<(AtomicMartingale, AtomicMartingale)> {
    params.validate()?;
    let ExtremalParams { p, x0, delta, n_steps } = *params;
    let w = params.weights();
    if w.iter().any(|&q| !(q > 0.0 && q <= 1.0)) {
        return Err(Error::Construction(format!(
            "atom lengths leave (0, 1] for delta = {delta}, p = {p}"
        )));
    }
    let growth = 1.0 + 2.0 * delta / p;
    let q = params.ratio();
    // lengths of the absorbed atoms as products, free of cancellation
    let to_axis = delta / (1.0 + delta);
    let to_line = delta * (p - 2.0) / ((p + 2.0 * delta) * (1.0 + delta));
    let mut incs = Vec::with_capacity(2 * n_steps + 1);
    for n in 0..n_steps {
        let active = x0 * growth.powi(n as i32);
        let (p0, p1, p2) = (w[2 * n], w[2 * n + 1], w[2 * n + 2]);
        let scale = q.powi(n as i32);
        incs.push(vec![
            Piece::new(0.0, p1, delta * active),
            Piece::with_len(p1, p0, scale * to_axis, -active),
        ]);
        incs.push(vec![
            Piece::new(0.0, p2, -(1.0 - 2.0 / p) * delta * active),
            Piece::with_len(p2, p1, scale * to_line, active * (1.0 + 4.0 * delta / p - delta)),
        ]);
    }
    let last = x0 * growth.powi(n_steps as i32);
    let pn = w[2 * n_steps];
    incs.push(vec![
        Piece::new(0.0, 0.5 * pn, last),
        Piece::with_len(0.5 * pn, pn, 0.5 * pn, -last),
    ]);
    let x = AtomicMartingale::new(x0, incs)?;
    let signs: Vec<f64> = (1..=x.last_step())
        .map(|n| if n % 2 == 1 { 1.0 } else { -1.0 })
        .collect();
    let y = x.transform((p - 1.0) * x0, &signs)?;
    x.check_martingale()?;
    Ok((x, y))
}

/// `X' = X / (1 - (p-2)x0)` and `Y' = (Y - (p-2)x0) / (1 - (p-2)x0)`.
pub fn primed(
    x: &AtomicMartingale,
    y: &AtomicMartingale,
    p: f64,
) -> (AtomicMartingale, AtomicMartingale) {
    let shift = (p - 2.0) * x.initial();
    let scale = 1.0 / (1.0 - shift);
    (x.affine(scale, 0.0), y.affine(scale, -shift * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalRatio {
    /// `P(Y_{2N+1} >= 1)`
    pub prob: f64,
    /// `E X_{2N+1}^p`
    pub moment: f64,
    pub ratio: f64,
    pub prob_primed: f64,
    pub moment_primed: f64,
    pub ratio_primed: f64,
}

fn terminal_ratio(x: &AtomicMartingale, y: &AtomicMartingale, p: f64) -> (f64, f64) {
    let n = x.last_step();
    let prob: f64 = y
        .partition(n)
        .iter()
        .filter(|q| q.value >= 1.0 - ATOM_SLACK)
        .map(Piece::len)
        .sum();
    let moment: f64 = x
        .partition(n)
        .iter()
        .map(|q| q.value.abs().powf(p) * q.len())
        .sum();
    (prob, moment)
}

/// Probability, moment and their ratio at the terminal step, for the
/// original and the primed processes, by summation over atoms.
pub fn evaluate_ratio(x: &AtomicMartingale, y: &AtomicMartingale, p: f64) -> ExtremalRatio {
    let (prob, moment) = terminal_ratio(x, y, p);
    let (xp, yp) = primed(x, y, p);
    let (prob_primed, moment_primed) = terminal_ratio(&xp, &yp, p);
    ExtremalRatio {
        prob,
        moment,
        ratio: prob / moment,
        prob_primed,
        moment_primed,
        ratio_primed: prob_primed / moment_primed,
    }
}

/// `p^p / (2^p (p-1) - 2^p p (p-2) x)`, the small-`delta` limit of the ratio.
pub fn limit_ratio(p: f64, x0: f64) -> f64 {
    p.powf(p) / (2f64.powf(p) * ((p - 1.0) - p * (p - 2.0) * x0))
}

/// The small-`delta` limit of the primed ratio.
pub fn limit_ratio_primed(p: f64, x0: f64) -> f64 {
    limit_ratio(p, x0) * (1.0 - (p - 2.0) * x0).powf(p)
}

/// One path of the pair through every step, for a terminal atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub a: f64,
    pub b: f64,
    pub points: Vec<(f64, f64)>,
}

/// One trajectory per atom of the terminal partition.
pub fn trajectories(x: &AtomicMartingale, y: &AtomicMartingale) -> Vec<Trajectory> {
    let n = x.last_step();
    x.partition(n)
        .iter()
        .map(|q| {
            let t = 0.5 * (q.a + q.b);
            Trajectory {
                a: q.a,
                b: q.b,
                points: (0..=n).map(|k| (x.value_at(k, t), y.value_at(k, t))).collect(),
            }
        })
        .collect()
}

/// CSV with header `trajectory,step,a,b,x,y`.
pub fn write_trajectories_csv<W: Write>(out: &mut W, paths: &[Trajectory]) -> std::io::Result<()> {
    writeln!(out, "trajectory,step,a,b,x,y")?;
    for (i, tr) in paths.iter().enumerate() {
        for (k, (x, y)) in tr.points.iter().enumerate() {
            writeln!(out, "{i},{k},{},{},{x},{y}", tr.a, tr.b)?;
        }
    }
    Ok(())
}

/// The two-step example for `0 < p < 1`: `f_0 = g_0 = 1/2` and
/// `df_1 = -dg_1 = -1/2` on `[0, 3/4]`, `3/2` on `(3/4, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepExample {
    pub f: AtomicMartingale,
    pub g: AtomicMartingale,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStepReport {
    pub p: f64,
    /// `||f_n||_p` for each step.
    pub f_step_norms: Vec<f64>,
    pub f_norm: f64,
    pub g_weak_norm: f64,
    pub g_weak_norm_fixed: f64,
    /// `||g||_{p,inf} == 2 ||f||_p`, compared exactly.
    pub identity_holds: bool,
}

pub fn build_p_lt1_example() -> Result<TwoStepExample> {
    let f = AtomicMartingale::new(
        0.5,
        vec![vec![
            Piece::new(0.0, 0.75, -0.5),
            Piece::new(0.75, 1.0, 1.5),
        ]],
    )?;
    let g = f.transform(0.5, &[-1.0])?;
    f.check_martingale()?;
    Ok(TwoStepExample { f, g })
}

impl TwoStepExample {
    pub fn report(&self, p: f64) -> Result<TwoStepReport> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("the two-step example needs 0 < p < 1, got {p}")));
        }
        let f_step_norms: Vec<f64> = (0..=self.f.last_step()).map(|n| self.f.p_norm(n, p)).collect();
        let f_norm = f_step_norms.iter().copied().fold(0.0, f64::max);
        let g_weak_norm = self.g.weak_norm_running(p);
        Ok(TwoStepReport {
            p,
            f_step_norms,
            f_norm,
            g_weak_norm,
            g_weak_norm_fixed: self.g.weak_norm_fixed(p),
            identity_holds: g_weak_norm == 2.0 * f_norm,
        })
    }
}

/// Exit probabilities `(left, right)` of Brownian motion from `(a, b)`
/// started at `xi`.
pub fn interval_exit_measure(a: f64, b: f64, xi: f64) -> Result<(f64, f64)> {
    if !(a <= xi && xi <= b && a < b) {
        return Err(Error::Domain(format!("{xi} is not in [{a}, {b}]")));
    }
    Ok(((b - xi) / (b - a), (xi - a) / (b - a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicRow {
    pub lambda: f64,
    /// The optimal subinterval (endpoints may sit on the closure of `D`).
    pub a: f64,
    pub b: f64,
    /// `mu(|v| >= lambda)`
    pub measure: f64,
    /// `lambda mu^{1/p}`
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub p: f64,
    /// `||u||_p = u(xi) = 1`
    pub u_norm: f64,
    pub rows: Vec<HarmonicRow>,
    pub sup: f64,
}

/// The one-dimensional example on `D = (-1, 3)`, `xi = 0`, `u = 1 + x`,
/// `v = 1 - x`. For each `lambda` the measure `mu(|v| >= lambda)` is
/// maximised over subintervals `(a, b)` containing `0`, taking as candidate
/// endpoints the ends of `D` and of the level set `{|v| >= lambda}`.
pub fn harmonic_1d_example(p: f64, lambda_grid: &[f64]) -> Result<HarmonicReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("the harmonic example needs 0 < p < 1, got {p}")));
    }
    let (lo, hi, xi) = (-1.0, 3.0, 0.0);
    let v = |t: f64| 1.0 - t;
    let mut rows = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        if !(lambda > 0.0 && lambda < 2.0) {
            return Err(Error::Domain(format!("lambda must lie in (0, 2), got {lambda}")));
        }
        let marks = [lo, hi, xi, 1.0 - lambda, 1.0 + lambda];
        let left: Vec<f64> = marks.iter().copied().filter(|&t| t >= lo && t <= xi).collect();
        let right: Vec<f64> = marks.iter().copied().filter(|&t| t >= xi && t <= hi).collect();
        let mut best = HarmonicRow { lambda, a: lo, b: hi, measure: 0.0, weighted: 0.0 };
        for &a in &left {
            for &b in &right {
                if a == b {
                    continue;
                }
                let (ma, mb) = interval_exit_measure(a, b, xi)?;
                let hit = |t: f64| v(t).abs() >= lambda;
                let measure = if hit(a) { ma } else { 0.0 } + if hit(b) { mb } else { 0.0 };
                if measure > best.measure {
                    best = HarmonicRow {
                        lambda,
                        a,
                        b,
                        measure,
                        weighted: lambda * measure.powf(1.0 / p),
                    };
                }
            }
        }
        rows.push(best);
    }
    let sup = rows.iter().map(|r| r.weighted).fold(0.0, f64::max);
    Ok(HarmonicReport { p, u_norm: 1.0 + xi, rows, sup })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlapping_atoms() {
        let bad = AtomicMartingale::new(
            0.0,
            vec![vec![
                Piece::new(0.0, 0.6, 1.0),
                Piece::new(0.5, 1.0, -1.0),
            ]],
        );
        assert!(matches!(bad, Err(Error::Construction(_))));
    }

    #[test]
    fn defect_detects_drift() {
        let m = AtomicMartingale::new(
            0.0,
            vec![vec![Piece::new(0.0, 0.5, 1.0), Piece::new(0.5, 1.0, -0.9)]],
        )
        .unwrap();
        assert!(m.check_martingale().is_err());
    }

    #[test]
    fn weak_norm_of_step_function() {
        let atoms = [
            Piece::new(0.0, 0.5, 2.0),
            Piece::new(0.5, 1.0, -1.0),
        ];
        // max(2 * 0.5^2, 1 * 1^2) at p = 1/2
        assert_eq!(weak_norm(&atoms, 0.5), 1.0);
    }

    #[test]
    fn degenerate_start_is_rejected() {
        assert!(matches!(resolve_params(3.0, 1.0 / 3.0, 0.1), Err(Error::Parameter(_))));
        assert!(resolve_params(2.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn lambda_outside_range() {
        assert!(harmonic_1d_example(0.5, &[2.0]).is_err());
        assert!(harmonic_1d_example(0.5, &[0.0]).is_err());
        assert!(harmonic_1d_example(1.5, &[1.0]).is_err());
    }
}
