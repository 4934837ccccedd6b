use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "fdlab.report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Check { name: name.into(), value, stderr: None, pass }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    /// `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, value < bound)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Map<String, Value>,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Map<String, Value>>,
}

impl Report {
    pub fn new(command: &str, config: Map<String, Value>) -> Self {
        Report {
            schema: SCHEMA,
            version: fdlab_core::VERSION,
            command: command.to_string(),
            config,
            checks: Vec::new(),
            data: Value::Null,
            error: None,
            timings: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serialisable");
        s.push('\n');
        s
    }
}

/// Stable name for a library error.
pub fn error_kind(e: &fdlab_core::Error) -> &'static str {
    use fdlab_core::Error::*;
    match e {
        SingularPoint { .. } => "SINGULAR_POINT",
        DegenerateJacobian => "DEGENERATE_JACOBIAN",
        OnNonInjectiveSet => "ON_NONINJECTIVE_SET",
        InversionFailed { .. } => "INVERSION_FAILED",
        SingularMatrix { .. } => "SINGULAR_MATRIX",
        EmptyDomain => "EMPTY_DOMAIN",
        InsufficientSamples { .. } => "INSUFFICIENT_SAMPLES",
        InsufficientScales => "INSUFFICIENT_SCALES",
        GridTooCoarse => "GRID_TOO_COARSE",
        OutOfRange(_) => "OUT_OF_RANGE",
        DegenerateLevel => "DEGENERATE_LEVEL",
    }
}
