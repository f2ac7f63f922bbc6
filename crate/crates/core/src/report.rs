use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One verification outcome; `witness` holds a counterexample or a sample, `details` the numbers.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub instance: String,
    pub status: Status,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub details: Value,
}

impl CheckRecord {
    pub fn new(name: &str, instance: impl Into<String>, pass: bool, details: Value) -> Self {
        CheckRecord {
            name: name.to_string(),
            instance: instance.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            pass,
            reason: None,
            witness: None,
            details,
        }
    }

    pub fn skipped(name: &str, instance: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckRecord {
            name: name.to_string(),
            instance: instance.into(),
            status: Status::Skipped,
            pass: false,
            reason: Some(reason.into()),
            witness: None,
            details: Value::Null,
        }
    }

    /// A failed check caused by an error, typically a budget overrun.
    pub fn errored(name: &str, instance: impl Into<String>, err: &crate::Error) -> Self {
        let mut rec = CheckRecord::new(name, instance, false, Value::Null);
        rec.reason = Some(err.to_string());
        rec
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    /// Skipped checks do not count against the run.
    pub fn ok(&self) -> bool {
        self.status != Status::Fail
    }
}
