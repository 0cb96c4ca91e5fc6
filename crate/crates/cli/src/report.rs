//! The JSON report document shared by every subcommand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "sympow";

/// The full input configuration of a run. Fields a command does not use stay empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u64,
    /// N: p-adic precision.
    pub prec_p: u32,
    /// M: T-adic truncation.
    pub prec_t: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps_p: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slack: Option<i64>,
    /// Command-specific parameters, keyed by flag name.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Valuation of the discrepancy; None when it vanished at the stated precision.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_valuation: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precision: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, residual_valuation: None, precision: None, detail: None }
    }

    pub fn residual(mut self, valuation: Option<i64>, precision: Option<i64>) -> Self {
        self.residual_valuation = valuation;
        self.precision = precision;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: Tool,
    pub command: String,
    pub config: RunConfig,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Wall-clock milliseconds per phase; not part of the deterministic payload.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum SchemaError {
    Parse(String),
    Version(u32),
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemaError::Parse(e) => write!(f, "malformed report: {e}"),
            SchemaError::Version(v) => write!(f, "schema version {v} is not supported (expected {SCHEMA_VERSION})"),
        }
    }
}

impl std::error::Error for SchemaError {}

impl ReportDocument {
    pub fn new(command: impl Into<String>, config: RunConfig) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: Tool { name: TOOL_NAME.into(), version: env!("CARGO_PKG_VERSION").into() },
            command: command.into(),
            config,
            sections: Vec::new(),
            checks: Vec::new(),
            passed: true,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn section<T: Serialize>(&mut self, name: &str, payload: &T) {
        let payload = serde_json::to_value(payload).expect("report payloads serialize");
        self.sections.push(Section { name: name.into(), payload });
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn time(&mut self, phase: &str, start: std::time::Instant) {
        self.timings_ms.insert(phase.into(), start.elapsed().as_millis() as u64);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.sections.iter().find(|s| s.name == name).map(|s| &s.payload)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// The report without timings, as pretty JSON.
    pub fn payload_json(&self) -> String {
        let mut d = self.clone();
        d.timings_ms.clear();
        d.to_json()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SchemaError> {
        let v: Value = serde_json::from_str(s).map_err(|e| SchemaError::Parse(e.to_string()))?;
        let version = v.get("schema_version").and_then(Value::as_u64).ok_or_else(|| SchemaError::Parse("no schema_version".into()))?;
        if version != SCHEMA_VERSION as u64 {
            return Err(SchemaError::Version(version as u32));
        }
        serde_json::from_value(v).map_err(|e| SchemaError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_fold_into_the_verdict() {
        let mut d = ReportDocument::new("x", RunConfig::default());
        d.check(Check::new("a", true));
        assert!(d.passed);
        d.check(Check::new("b", false).residual(Some(2), Some(6)));
        assert!(!d.passed);
        assert_eq!(d.failed_checks().count(), 1);
    }

    #[test]
    fn schema_round_trip_and_mismatch() {
        let mut d = ReportDocument::new("x", RunConfig { p: 5, prec_p: 6, prec_t: 20, ..Default::default() });
        d.section("numbers", &vec![1, 2, 3]);
        d.timings_ms.insert("all".into(), 12);
        let back = ReportDocument::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(!d.payload_json().contains("timings_ms"));
        let bumped = d.to_json().replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert_eq!(ReportDocument::from_json(&bumped), Err(SchemaError::Version(9)));
    }
}
