//! Sharp constants of the weak-type and moment inequalities.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Default truncation tolerance for the alternating series in `K_p`.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Which family of inequalities an exponent is being used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `0 < p < 1`
    SubOne,
    /// `1 <= p <= 2`
    OrthRange,
    /// `p > 2`
    SuperTwo,
    /// `1 < p < infinity`
    General,
}

impl Regime {
    pub fn admits(self, p: f64) -> bool {
        match self {
            Regime::SubOne => p > 0.0 && p < 1.0,
            Regime::OrthRange => (1.0..=2.0).contains(&p),
            Regime::SuperTwo => p > 2.0 && p.is_finite(),
            Regime::General => p > 1.0 && p.is_finite(),
        }
    }
}

/// An exponent `p > 0` tagged with the regime it is used in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent {
    p: f64,
    regime: Regime,
}

impl Exponent {
    /// Tags `p` with its natural regime: `SubOne`, `OrthRange` or `SuperTwo`.
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return domain(format!("exponent must be positive and finite, got {p}"));
        }
        let regime = if p < 1.0 {
            Regime::SubOne
        } else if p <= 2.0 {
            Regime::OrthRange
        } else {
            Regime::SuperTwo
        };
        Ok(Self { p, regime })
    }

    pub fn with_regime(p: f64, regime: Regime) -> Result<Self> {
        if !regime.admits(p) {
            return domain(format!("p = {p} is not in the {regime:?} regime"));
        }
        Ok(Self { p, regime })
    }

    pub fn value(&self) -> f64 {
        self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `p* = max(p, p/(p-1))`, defined for `p > 1`.
    pub fn conjugate_max(&self) -> Option<f64> {
        (self.p > 1.0).then(|| self.p.max(self.p / (self.p - 1.0)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpConstant {
    pub value: f64,
    pub name: String,
    pub p: f64,
    /// Number of series terms summed; zero for closed forms.
    pub series_terms_used: usize,
}

impl SharpConstant {
    fn closed(name: &str, p: f64, value: f64) -> Self {
        Self {
            value,
            name: name.to_string(),
            p,
            series_terms_used: 0,
        }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments (Lanczos, g = 7).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires a positive finite argument, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Dirichlet beta `sum_k (-1)^k (2k+1)^{-s}` summed until the next term
/// drops below `tol`. Returns the value and the number of terms used.
///
/// The returned value is the midpoint of the last two partial sums, so
/// the truncation error is at most half the first omitted term.
pub fn dirichlet_beta(s: f64, tol: f64) -> Result<(f64, usize)> {
    if !(s > 0.0) {
        return domain(format!("dirichlet beta needs s > 0, got {s}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let mut sum = 0.0;
    let mut k: usize = 0;
    loop {
        let term = ((2 * k + 1) as f64).powf(-s);
        if term < tol {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            return Ok((sum + 0.5 * sign * term, k));
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
}

/// The orthogonal-case weak-type constant `K_p`, `1 <= p <= 2`.
pub fn kp(p: &Exponent, tol: f64) -> Result<SharpConstant> {
    let pv = p.value();
    if !(1.0..=2.0).contains(&pv) {
        return domain(format!("K_p is defined for 1 <= p <= 2, got {pv}"));
    }
    let kpp = kp_pow(pv, tol)?;
    Ok(SharpConstant {
        value: kpp.0.powf(1.0 / pv),
        name: "K_p (orthogonal weak type)".into(),
        p: pv,
        series_terms_used: kpp.1,
    })
}

/// `K_p^p` together with the number of series terms.
pub(crate) fn kp_pow(p: f64, tol: f64) -> Result<(f64, usize)> {
    let numerator = PI * PI / 8.0;
    let (denominator, terms) = dirichlet_beta(p + 1.0, tol)?;
    let gamma_p1 = gamma(p + 1.0)?;
    Ok(((PI / 2.0).powf(p - 1.0) * numerator / (gamma_p1 * denominator), terms))
}

/// Weak-type constant for non-negative dominating martingales:
/// `2` for `0 < p < 1` and `(p/2)(p-1)^{-1/p}` for `p >= 2`.
pub fn weak_constant_nonneg(p: &Exponent) -> Result<SharpConstant> {
    let pv = p.value();
    if pv < 1.0 {
        Ok(SharpConstant::closed("weak type, non-negative, p < 1", pv, 2.0))
    } else if pv >= 2.0 {
        Ok(SharpConstant::closed(
            "weak type, non-negative, p >= 2",
            pv,
            0.5 * pv * (pv - 1.0).powf(-1.0 / pv),
        ))
    } else {
        domain(format!(
            "no sharp non-negative weak-type constant for 1 <= p < 2 (got {pv})"
        ))
    }
}

/// `p^p / (2^p (p-1))`, the p-th power of the non-negative weak constant.
pub fn weak_constant_pth_power(p: &Exponent) -> Result<f64> {
    let pv = p.value();
    if pv < 2.0 {
        return domain(format!("p-th power weak constant needs p >= 2, got {pv}"));
    }
    Ok((0.5 * pv).powf(pv) / (pv - 1.0))
}

/// Optimal moment constant `C_p` for non-negative `f`, `1 < p < infinity`.
pub fn moment_constant_nonneg(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("C_p needs 1 < p < infinity, got {p}"));
    }
    let low = 1.0 / (p - 1.0);
    let high = (p * (p - 1.0) / 2.0).powf(1.0 / p);
    if p == 2.0 && (low - high).abs() > 1e-15 {
        return Err(Error::Evaluation(format!(
            "C_p branches disagree at p = 2: {low} vs {high}"
        )));
    }
    Ok(if p <= 2.0 { low } else { high })
}

/// All classical constants that apply at `p`, each labelled with its source.
pub fn reference_constants(p: &Exponent) -> Vec<SharpConstant> {
    let pv = p.value();
    let mut out = Vec::new();
    if (1.0..=2.0).contains(&pv) {
        out.push(SharpConstant::closed(
            "weak type, general, 2/Gamma(p+1)",
            pv,
            2.0 / gamma_unchecked(pv + 1.0),
        ));
    }
    if let Some(pstar) = p.conjugate_max() {
        out.push(SharpConstant::closed("moment, general, p*-1", pv, pstar - 1.0));
        if let Ok(c) = moment_constant_nonneg(pv) {
            out.push(SharpConstant::closed("moment, non-negative, C_p", pv, c));
        }
    }
    if pv >= 2.0 {
        out.push(SharpConstant::closed(
            "weak type, general, (p^(p-1)/2)^(1/p)",
            pv,
            (pv.powf(pv - 1.0) / 2.0).powf(1.0 / pv),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    #[test]
    fn gamma_recurrence_on_grid() {
        // Gamma(x+1) = x Gamma(x) across [0.5, 10]
        let mut x = 0.5;
        while x < 10.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(((lhs - rhs) / lhs).abs() < 1e-13, "x = {x}");
            x += 0.0137;
        }
    }

    #[test]
    fn exponent_regimes() {
        assert_eq!(e(0.3).regime(), Regime::SubOne);
        assert_eq!(e(1.0).regime(), Regime::OrthRange);
        assert_eq!(e(2.0).regime(), Regime::OrthRange);
        assert_eq!(e(2.5).regime(), Regime::SuperTwo);
        assert!(Exponent::new(0.0).is_err());
        assert!(Exponent::with_regime(1.5, Regime::SuperTwo).is_err());
        assert!(Exponent::with_regime(3.0, Regime::General).is_ok());
        assert_eq!(e(3.0).conjugate_max(), Some(3.0));
        assert_eq!(e(1.5).conjugate_max(), Some(3.0));
    }

    #[test]
    fn kp_at_two_is_one() {
        let k = kp(&e(2.0), DEFAULT_SERIES_TOL).unwrap();
        assert!((k.value - 1.0).abs() < 1e-9);
        assert!(k.series_terms_used > 0);
    }

    #[test]
    fn kp_domain() {
        assert!(kp(&e(0.5), 1e-12).is_err());
        assert!(kp(&e(2.5), 1e-12).is_err());
    }

    #[test]
    fn weak_constants() {
        assert_eq!(weak_constant_nonneg(&e(0.5)).unwrap().value, 2.0);
        assert_eq!(weak_constant_nonneg(&e(2.0)).unwrap().value, 1.0);
        let w4 = weak_constant_nonneg(&e(4.0)).unwrap().value;
        assert!((w4 - 2.0 * 3f64.powf(-0.25)).abs() < 1e-15);
        assert!(weak_constant_nonneg(&e(1.5)).is_err());
        assert_eq!(weak_constant_pth_power(&e(2.0)).unwrap(), 1.0);
        assert!((weak_constant_pth_power(&e(3.0)).unwrap() - 27.0 / 16.0).abs() < 1e-15);
        assert!((weak_constant_pth_power(&e(4.0)).unwrap() - 256.0 / 48.0).abs() < 1e-14);
        assert!(weak_constant_pth_power(&e(1.9)).is_err());
    }

    #[test]
    fn reference_constants_collapse_at_two() {
        let cs = reference_constants(&e(2.0));
        assert_eq!(cs.len(), 4);
        for c in cs {
            assert!((c.value - 1.0).abs() < 1e-14, "{}", c.name);
        }
    }

    #[test]
    fn reference_constants_at_three() {
        let cs = reference_constants(&e(3.0));
        let general = cs.iter().find(|c| c.name.contains("p^(p-1)")).unwrap();
        assert!((general.value - 4.5f64.cbrt()).abs() < 1e-14);
        assert!((general.value - 1.650_963_624_447_313).abs() < 1e-12);
        let cp = cs.iter().find(|c| c.name.contains("C_p")).unwrap();
        assert!((cp.value - 3f64.cbrt()).abs() < 1e-14);
        assert!(!cs.iter().any(|c| c.name.contains("Gamma")));
    }

    #[test]
    fn moment_constant_continuous_at_two() {
        let below = moment_constant_nonneg(2.0 - 1e-9).unwrap();
        let above = moment_constant_nonneg(2.0 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-8);
        assert_eq!(moment_constant_nonneg(2.0).unwrap(), 1.0);
    }
}
