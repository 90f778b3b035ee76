//! Verification reports: a flat list of named checks with a pass/fail/
//! inconclusive status each, serialized as deterministic JSON.

use mesodefect_core::dist::PairingReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured value (quadrature, contour integral, ...); absent when the
    /// measurement itself failed.
    pub lhs: Option<f64>,
    /// Predicted value.
    pub rhs: Option<f64>,
    pub abs_err: Option<f64>,
    pub tol: f64,
    pub status: CheckStatus,
}

impl Check {
    pub fn compare(name: String, lhs: f64, rhs: f64, tol: f64) -> Check {
        let abs_err = (lhs - rhs).abs();
        let status = if abs_err.is_finite() && abs_err <= tol {
            CheckStatus::Pass
        } else if abs_err.is_finite() {
            CheckStatus::Fail
        } else {
            CheckStatus::Inconclusive
        };
        Check {
            name,
            lhs: Some(lhs).filter(|v| v.is_finite()),
            rhs: Some(rhs).filter(|v| v.is_finite()),
            abs_err: Some(abs_err).filter(|v| v.is_finite()),
            tol,
            status,
        }
    }

    pub fn pass(name: String) -> Check {
        Check {
            name,
            lhs: None,
            rhs: None,
            abs_err: None,
            tol: 0.0,
            status: CheckStatus::Pass,
        }
    }

    pub fn fail(name: String) -> Check {
        Check {
            name,
            lhs: None,
            rhs: None,
            abs_err: None,
            tol: 0.0,
            status: CheckStatus::Fail,
        }
    }

    pub fn inconclusive(name: String) -> Check {
        Check {
            name,
            lhs: None,
            rhs: None,
            abs_err: None,
            tol: 0.0,
            status: CheckStatus::Inconclusive,
        }
    }
}

impl From<PairingReport> for Check {
    fn from(r: PairingReport) -> Check {
        let effective_tol = (r.tolerance * r.predicted_value.abs()).max(r.tol_abs);
        let status = if !r.abs_error.is_finite() {
            CheckStatus::Inconclusive
        } else if r.pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name: r.label,
            lhs: Some(r.quadrature_value).filter(|v| v.is_finite()),
            rhs: Some(r.predicted_value).filter(|v| v.is_finite()),
            abs_err: Some(r.abs_error).filter(|v| v.is_finite()),
            tol: effective_tol,
            status,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Report {
        let pass = checks.iter().all(|c| c.status == CheckStatus::Pass);
        Report { checks, pass }
    }

    /// 0 all pass, 1 any failure, 3 inconclusive only.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == CheckStatus::Fail) {
            1
        } else if self
            .checks
            .iter()
            .any(|c| c.status == CheckStatus::Inconclusive)
        {
            3
        } else {
            0
        }
    }

    /// Deterministic JSON: field order is fixed by the struct definitions and
    /// float formatting is the shortest round-trip form.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_statuses() {
        assert_eq!(
            Check::compare("a".into(), 1.0, 1.0 + 1e-9, 1e-8).status,
            CheckStatus::Pass
        );
        assert_eq!(
            Check::compare("b".into(), 1.0, 2.0, 1e-8).status,
            CheckStatus::Fail
        );
        assert_eq!(
            Check::compare("c".into(), f64::NAN, 0.0, 1e-8).status,
            CheckStatus::Inconclusive
        );
    }

    #[test]
    fn exit_codes() {
        let pass = Report::new(vec![Check::pass("x".into())]);
        assert_eq!(pass.exit_code(), 0);
        assert!(pass.pass);
        let fail = Report::new(vec![Check::pass("x".into()), Check::fail("y".into())]);
        assert_eq!(fail.exit_code(), 1);
        let inc = Report::new(vec![Check::inconclusive("z".into())]);
        assert_eq!(inc.exit_code(), 3);
        assert!(!inc.pass);
    }

    #[test]
    fn json_is_deterministic_and_finite() {
        let r = Report::new(vec![
            Check::compare("a".into(), 0.5, 0.5, 1e-8),
            Check::inconclusive("b".into()),
        ]);
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"status\": \"inconclusive\""));
        assert!(!a.contains("NaN"));
        serde_json::from_str::<serde_json::Value>(&a).unwrap();
    }
}
