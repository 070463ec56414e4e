//! The run summary written next to every command's outputs.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::ErrorRecord;
use crate::scenario::Scenario;
use crate::tolerances::Tolerances;

/// One recorded number and the inclusive bounds it was held to. `passed` is
/// computed from these fields alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `null` when the quantity could not be computed.
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let value = value.is_finite().then_some(value);
        let passed = value.is_some_and(|v| !lower.is_some_and(|a| v < a) && !upper.is_some_and(|b| v > b));
        Self { name: name.into(), value, lower, upper, passed }
    }

    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, None, Some(limit))
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, Some(limit), None)
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Some(lo), Some(hi))
    }

    pub fn failed(name: impl Into<String>) -> Self {
        Self { name: name.into(), value: None, lower: None, upper: None, passed: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario_name: Option<String>,
    /// The scenario with every default filled in.
    pub scenario: Option<Scenario>,
    pub resolved_defaults: Vec<String>,
    pub tolerance_profile: &'static str,
    pub tolerances: Tolerances,
    pub seeds: BTreeMap<String, u64>,
    pub checks: Vec<Check>,
    /// Per-command reports, keyed by section name.
    pub sections: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub passed: bool,
    pub error: Option<ErrorRecord>,
}

impl RunSummary {
    pub fn new(command: &str, profile: &'static str, tolerances: Tolerances) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            scenario_name: None,
            scenario: None,
            resolved_defaults: Vec::new(),
            tolerance_profile: profile,
            tolerances,
            seeds: BTreeMap::new(),
            checks: Vec::new(),
            sections: BTreeMap::new(),
            outputs: Vec::new(),
            passed: false,
            error: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Stores any serialisable report; non-finite floats become `null`.
    pub fn section<T: Serialize>(&mut self, name: &str, value: &T) {
        let v = serde_json::to_value(value).expect("report serialises");
        self.sections.insert(name.to_string(), v);
    }

    pub fn finish(&mut self) {
        self.passed = self.error.is_none() && self.checks.iter().all(|c| c.passed);
    }

    /// 0 when every check passed, 1 on a tolerance failure, 2 on an error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.checks.iter().all(|c| c.passed) {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_follow_their_recorded_numbers() {
        assert!(Check::at_most("a", 1e-9, 1e-8).passed);
        assert!(!Check::at_most("a", 2e-8, 1e-8).passed);
        assert!(!Check::at_most("a", f64::NAN, 1e-8).passed);
        assert_eq!(Check::at_most("a", f64::INFINITY, 1.0).value, None);
        assert!(Check::at_least("b", 0.2, 0.1).passed);
        assert!(!Check::at_least("b", 0.05, 0.1).passed);
        assert!(!Check::failed("d").passed);
        assert!(Check::within("c", 2.0, 1.9, 2.1).passed);
        assert!(!Check::within("c", 2.2, 1.9, 2.1).passed);
    }

    #[test]
    fn exit_codes() {
        let mut s = RunSummary::new("verify", "default", Tolerances::default());
        s.check(Check::at_most("a", 0.0, 1.0));
        s.finish();
        assert_eq!(s.exit_code(), 0);
        s.check(Check::at_most("b", 2.0, 1.0));
        s.finish();
        assert!(!s.passed);
        assert_eq!(s.exit_code(), 1);
        s.error = Some(ErrorRecord { kind: "io".into(), message: "x".into() });
        assert_eq!(s.exit_code(), 2);
    }
}
