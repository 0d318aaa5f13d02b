use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

/// One named check with the measured quantity and the tolerance it was held to.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Structured record of a verification or certification run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
}

impl RunReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            passed: true,
            checks: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    /// Records `value <= tolerance` as a check.
    pub fn check_le(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> bool {
        let passed = value <= tolerance && value.is_finite();
        self.push(name, value, tolerance, passed, None);
        passed
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        passed: bool,
        note: Option<String>,
    ) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            passed,
            note,
        });
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.data.insert(key.into(), value.into());
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
