//! Structured check results and their JSON, CSV and table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// A target value, or a closed interval; a missing end is unbounded and
/// serializes as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Scalar(f64),
    Interval([Option<f64>; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub name: String,
    pub status: Status,
    pub value: Value,
    pub expected: Option<Expected>,
    pub tolerance: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl CheckReport {
    fn base(name: &str, status: Status, value: Value) -> Self {
        Self {
            schema: SCHEMA,
            name: name.to_string(),
            status,
            value,
            expected: None,
            tolerance: None,
            samples: 0,
            seed: 0,
            runtime_ms: 0,
            detail: None,
        }
    }

    /// Pass iff `|value − expected| ≤ tolerance`.
    pub fn near(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        let mut r = Self::base(name, status((value - expected).abs() <= tolerance), Value::Scalar(value));
        r.expected = Some(Expected::Scalar(expected));
        r.tolerance = Some(tolerance);
        r
    }

    /// Pass iff `lo ≤ value ≤ hi`.
    pub fn within(name: &str, value: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let ok = lo.is_none_or(|l| value >= l) && hi.is_none_or(|h| value <= h);
        let mut r = Self::base(name, status(ok), Value::Scalar(value));
        r.expected = Some(Expected::Interval([lo, hi]));
        r
    }

    /// Pass iff `value < bound`.
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        let mut r = Self::within(name, value, None, Some(bound));
        r.status = status(value < bound);
        r
    }

    /// Pass iff `value > bound`.
    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        let mut r = Self::within(name, value, Some(bound), None);
        r.status = status(value > bound);
        r
    }

    /// A yes/no property, encoded as `1`/`0` against `1`.
    pub fn holds(name: &str, ok: bool) -> Self {
        Self::near(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn info(name: &str, value: Value) -> Self {
        Self::base(name, Status::Info, value)
    }

    /// A check that could not be evaluated.
    pub fn error(name: &str, message: &str) -> Self {
        Self::base(name, Status::Fail, Value::Scalar(f64::NAN)).with_detail(message)
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_vector(mut self, values: Vec<f64>) -> Self {
        self.value = Value::Vector(values);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Exit code for a finished run: 0 iff nothing failed.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(CheckReport::passed) {
        0
    } else {
        1
    }
}

pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
}

pub fn to_json(reports: &[CheckReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Scalar(x) => format!("{x:e}"),
        Value::Vector(xs) => xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";"),
    }
}

fn fmt_expected(e: &Option<Expected>) -> String {
    match e {
        None => String::new(),
        Some(Expected::Scalar(x)) => format!("{x:e}"),
        Some(Expected::Interval([lo, hi])) => format!(
            "[{}..{}]",
            lo.map(|x| format!("{x:e}")).unwrap_or_default(),
            hi.map(|x| format!("{x:e}")).unwrap_or_default()
        ),
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Info => "info",
    }
}

pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("name,status,value,expected,tolerance,samples,seed,runtime_ms\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.name,
            status_str(r.status),
            fmt_value(&r.value),
            fmt_expected(&r.expected),
            r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
            r.samples,
            r.seed,
            r.runtime_ms
        );
    }
    out
}

pub fn to_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:<6}  {:<24}  {}\n", "name", "status", "value", "expected");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:<6}  {:<24}  {}{}",
            r.name,
            status_str(r.status).to_uppercase(),
            fmt_value(&r.value),
            fmt_expected(&r.expected),
            r.detail.as_deref().map(|d| format!("  ({d})")).unwrap_or_default()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_tolerance() {
        assert_eq!(CheckReport::near("a", 1.0, 1.05, 0.1).status, Status::Pass);
        assert_eq!(CheckReport::near("a", 1.0, 1.2, 0.1).status, Status::Fail);
        assert_eq!(CheckReport::within("b", 0.5, Some(0.495), Some(0.505)).status, Status::Pass);
        assert_eq!(CheckReport::below("c", 0.0, 0.0).status, Status::Fail);
        assert_eq!(CheckReport::above("c", 1e-300, 0.0).status, Status::Pass);
        assert_eq!(CheckReport::holds("d", false).status, Status::Fail);
        let info = CheckReport::info("e", Value::Scalar(3.0));
        assert!(info.expected.is_none() && info.passed());
    }

    #[test]
    fn json_shape() {
        let r = vec![CheckReport::below("x", 1e-13, 1e-12).with_seed(7).with_samples(10)];
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        let obj = &v[0];
        for key in ["schema", "name", "status", "value", "expected", "tolerance", "samples", "seed", "runtime_ms"] {
            assert!(obj.get(key).is_some(), "{key}");
        }
        assert_eq!(obj["schema"], 1);
        assert_eq!(obj["status"], "pass");
        assert!(obj["expected"][0].is_null());
        let back: Vec<CheckReport> = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn exit_codes_and_csv() {
        let mut r = vec![CheckReport::holds("b", true), CheckReport::info("a", Value::Vector(vec![1.0, 2.0]))];
        assert_eq!(exit_code(&r), 0);
        sort_reports(&mut r);
        assert_eq!(r[0].name, "a");
        r.push(CheckReport::error("c", "stall"));
        assert_eq!(exit_code(&r), 1);
        let csv = to_csv(&r);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.contains("1e0;2e0"));
        assert!(to_table(&r).contains("(stall)"));
    }
}
