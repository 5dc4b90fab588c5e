//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

use crate::qgmap::DilatationStats;

/// JSON schema version written into every report.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub n: usize,
    /// Signed slack of the inequality, in nats unless the check says otherwise.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub gamma: f64,
    pub delta: f64,
    pub checks: Vec<Check>,
    pub overall: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dilatation: Vec<DilatationStats>,
}

impl VerificationReport {
    pub fn new(gamma: f64, delta: f64) -> Self {
        VerificationReport {
            schema: SCHEMA_VERSION,
            gamma,
            delta,
            checks: Vec::new(),
            overall: true,
            dilatation: Vec::new(),
        }
    }

    /// Records a check; `pass` is decided by the caller's tolerance rule.
    pub fn push(&mut self, name: &str, n: usize, margin: f64, pass: bool) {
        // JSON has no NaN or infinities.
        let margin = if margin.is_nan() {
            f64::MIN
        } else {
            margin.clamp(f64::MIN, f64::MAX)
        };
        self.overall &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            n,
            margin,
            pass,
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.overall &= c.pass;
            self.checks.push(c);
        }
        self.dilatation.extend(other.dilatation);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.failures().next()
    }

    pub fn checks_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }

    /// True when every check with this name passed (vacuously true if none ran).
    pub fn family_passes(&self, name: &str) -> bool {
        self.checks_named(name).all(|c| c.pass)
    }

    pub fn min_margin(&self, name: &str) -> Option<f64> {
        self.checks_named(name).map(|c| c.margin).reduce(f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
