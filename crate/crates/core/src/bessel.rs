//! Modified Bessel functions of the first kind for real order `alpha > -1`.

use crate::constants::gamma_unchecked;
use crate::error::{domain, Result};

/// Above this argument the scaled function switches from the power series
/// to the large-argument expansion.
const ASYMPTOTIC_SWITCH: f64 = 30.0;

fn check_args(alpha: f64, z: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return domain(format!("Bessel order must satisfy alpha > -1, got {alpha}"));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return domain(format!("Bessel argument must be non-negative, got {z}"));
    }
    Ok(())
}

/// `I_alpha(z) = sum_k (z/2)^{2k+alpha} / (k! Gamma(alpha+k+1))`.
///
/// All terms are positive for `alpha > -1`, so the plain series keeps full
/// relative accuracy until it overflows (around `z = 700`).
pub fn bessel_i(alpha: f64, z: f64) -> Result<f64> {
    check_args(alpha, z)?;
    Ok(series(alpha, z))
}

/// `exp(-z) I_alpha(z)`, usable for arbitrarily large `z`.
pub fn bessel_i_scaled(alpha: f64, z: f64) -> Result<f64> {
    check_args(alpha, z)?;
    if z <= ASYMPTOTIC_SWITCH {
        Ok(series(alpha, z) * (-z).exp())
    } else {
        Ok(asymptotic_scaled(alpha, z))
    }
}

fn series(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if alpha == 0.0 {
            1.0
        } else if alpha > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let half = 0.5 * z;
    let q = half * half;
    let mut term = half.powf(alpha) / gamma_unchecked(alpha + 1.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + alpha));
        sum += term;
        if k > half && term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

fn asymptotic_scaled(alpha: f64, z: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = term * (odd * odd - mu) / (8.0 * k * z);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct term-by-term evaluation with an explicit factorial and
    /// Gamma, independent of the recurrence used above.
    fn brute(alpha: f64, z: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 0..terms {
            if k > 0 {
                fact *= k as f64;
            }
            sum += (z / 2.0).powf(2.0 * k as f64 + alpha)
                / (fact * gamma_unchecked(alpha + k as f64 + 1.0));
        }
        sum
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(0.7, 0.0).unwrap(), 0.0);
        assert!(bessel_i(-1.0, 1.0).is_err());
        assert!(bessel_i(0.5, -1.0).is_err());
    }

    #[test]
    fn half_order_against_brute_series() {
        let v = bessel_i(0.5, 1.0).unwrap();
        let b = brute(0.5, 1.0, 50);
        assert!(((v - b) / b).abs() < 1e-12, "{v} vs {b}");
        // closed form sqrt(2/(pi z)) sinh z
        let closed = (2.0 / std::f64::consts::PI).sqrt() * 1f64.sinh();
        assert!((v - closed).abs() < 1e-14);
    }

    #[test]
    fn negative_order_against_brute_series() {
        for &(a, z) in &[(-2.0 / 3.0, 0.5), (-0.8, 3.0), (-0.5, 7.0), (1.25, 12.0)] {
            let v = bessel_i(a, z).unwrap();
            let b = brute(a, z, 80);
            assert!(((v - b) / b).abs() < 1e-12, "alpha={a} z={z}: {v} vs {b}");
        }
    }

    #[test]
    fn large_argument_matches_series() {
        for &a in &[-0.75, -2.0 / 3.0, 0.0, 0.25, 0.8333, 1.25] {
            for &z in &[30.5, 35.0, 42.0, 50.0] {
                let s = series(a, z) * (-z).exp();
                let asy = asymptotic_scaled(a, z);
                assert!(((s - asy) / s).abs() < 1e-12, "a={a} z={z}: {s} vs {asy}");
            }
        }
    }

    #[test]
    fn satisfies_modified_bessel_equation() {
        // z^2 I'' + z I' - (z^2 + a^2) I = 0 by Richardson-extrapolated
        // central differences
        for &a in &[-0.8, -0.5, 0.0, 0.3, 0.75, 1.5] {
            let f = |x: f64| bessel_i(a, x).unwrap();
            let mut z = 0.4;
            while z < 10.0 {
                let d = |h: f64| {
                    let (fm, f0, fp) = (f(z - h), f(z), f(z + h));
                    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
                };
                let step = 0.01 * z.min(2.0);
                let (a1, a2) = d(step);
                let (b1, b2) = d(0.5 * step);
                let d1 = (4.0 * b1 - a1) / 3.0;
                let d2 = (4.0 * b2 - a2) / 3.0;
                let f0 = f(z);
                let res = z * z * d2 + z * d1 - (z * z + a * a) * f0;
                let scale = (z * z * d2).abs() + (z * d1).abs() + ((z * z + a * a) * f0).abs();
                assert!(res.abs() / scale < 1e-8, "a={a} z={z} res={res}");
                z += 0.37;
            }
        }
    }
}
