use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `passed` is derived: `residual <= tolerance`. A NaN residual fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        assert!(tolerance > 0.0, "tolerance must be positive");
        // Non-finite residuals are clamped to f64::MAX so the report stays valid JSON.
        let residual = if residual.is_finite() { residual.abs() } else { f64::MAX };
        Check {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    /// Recompute the verdict from the stored numbers.
    pub fn recheck(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Named checks with their residuals, plus the run parameters that produced them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.push(Check::new(name, residual, tolerance));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.metadata.extend(other.metadata);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_tracks_residual() {
        assert!(Check::new("a", 1e-9, 1e-8).passed);
        assert!(Check::new("b", 1e-8, 1e-8).passed);
        assert!(!Check::new("c", 2e-8, 1e-8).passed);
        assert!(!Check::new("d", f64::NAN, 1e-8).passed);
        assert_eq!(Check::new("e", -3.0, 5.0).residual, 3.0);
    }

    #[test]
    fn json_round_trip_keeps_verdicts() {
        let mut r = VerificationReport::new();
        r.check("x", 0.1 + 0.2, 0.5);
        r.check("y", 1.0, 0.5);
        r.metadata.insert("n".into(), serde_json::json!(256));
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(back.checks.iter().all(|c| c.recheck() == c.passed));
        assert!(!back.all_passed());
        assert_eq!(back.passed_count(), 1);
    }
}
