//! Serialisable results of the property suites and Monte Carlo checks.

use serde::Serialize;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub p: Option<f64>,
    pub samples: usize,
    pub violations: usize,
    /// Largest observed excess (or error, for comparisons) over all samples.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    /// A check that counts samples whose excess is above `tolerance`.
    pub fn from_excesses(
        check: impl Into<String>,
        p: Option<f64>,
        tolerance: f64,
        excesses: impl IntoIterator<Item = f64>,
    ) -> Self {
        let (mut samples, mut violations, mut worst) = (0, 0, f64::NEG_INFINITY);
        for e in excesses {
            samples += 1;
            if !(e <= tolerance) {
                violations += 1;
            }
            if e > worst || e.is_nan() {
                worst = e;
            }
        }
        Self {
            check: check.into(),
            p,
            samples,
            violations,
            worst,
            tolerance,
            passed: violations == 0 && samples > 0,
        }
    }

    /// A single comparison `|value - expected| <= tolerance`.
    pub fn comparison(
        check: impl Into<String>,
        p: Option<f64>,
        value: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        Self::from_excesses(check, p, tolerance, [(value - expected).abs()])
    }

    pub fn line(&self) -> String {
        let p = self.p.map(|p| format!(" p={p}")).unwrap_or_default();
        format!(
            "[{}] {}{}: {} samples, {} violations, worst {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            p,
            self.samples,
            self.violations,
            self.worst,
            self.tolerance
        )
    }
}

/// A named group of checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, seed: u64, checks: Vec<CheckReport>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            suite: suite.into(),
            seed,
            checks,
            passed,
        }
    }

    /// One line per check as CSV, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,p,samples,violations,worst,tolerance,passed\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.suite,
                c.check,
                c.p.map(|p| p.to_string()).unwrap_or_default(),
                c.samples,
                c.violations,
                c.worst,
                c.tolerance,
                c.passed
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_counting() {
        let r = CheckReport::from_excesses("x", Some(3.0), 1e-9, [0.0, -1.0, 2e-9]);
        assert_eq!((r.samples, r.violations, r.passed), (3, 1, false));
        assert_eq!(r.worst, 2e-9);
        let nan = CheckReport::from_excesses("x", None, 1.0, [0.0, f64::NAN]);
        assert!(!nan.passed);
        assert!(!CheckReport::from_excesses("x", None, 1.0, []).passed);
    }

    #[test]
    fn csv_shape() {
        let s = SuiteReport::new("w", 1, vec![CheckReport::comparison("c", None, 1.0, 1.0, 0.0)]);
        assert!(s.passed);
        assert_eq!(s.to_csv().lines().count(), 2);
        assert!(s.checks[0].line().starts_with("[PASS] c:"));
    }
}
