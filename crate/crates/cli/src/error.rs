use floerbound::io::IoError;
use floerbound::morse::ComplexError;
use serde_json::{json, Value};

/// A failure reported as `{"error": {"code", "message", "witness"}}`.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub witness: Value,
    pub exit: u8,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            witness: Value::Null,
            exit: 1,
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn unreadable(path: &str, err: std::io::Error) -> Self {
        Self {
            exit: 2,
            ..Self::new("unreadable_file", format!("cannot read `{path}`: {err}"))
                .with_witness(json!({ "path": path }))
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message, "witness": self.witness } })
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let message = e.to_string();
        match e {
            IoError::Json(err) => Self::new("malformed_json", message)
                .with_witness(json!({ "line": err.line(), "column": err.column() })),
            IoError::Schema(_) => Self::new("schema_violation", message),
            IoError::Module(_) => Self::new("schema_violation", message),
            IoError::Invalid(report) => {
                Self::new("invalid_module", message).with_witness(to_value(&report.violations))
            }
            IoError::Complex(c) => c.into(),
            IoError::InvalidCap(v) => {
                Self::new("invalid_cap_action", message).with_witness(to_value(&v))
            }
        }
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        let message = e.to_string();
        match e {
            ComplexError::Invalid(v) => {
                Self::new("invalid_complex", message).with_witness(to_value(&v))
            }
            ComplexError::Thresholds(_) => Self::new("invalid_thresholds", message),
        }
    }
}

pub fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}
