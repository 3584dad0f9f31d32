use serde::Serialize;
use serde_json::Value;

/// One named check of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_value: Option<Value>,
}

impl Check {
    pub fn new(name: &str, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            witness: None,
            measured_value: None,
        }
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn measured(mut self, v: Value) -> Self {
        self.measured_value = Some(v);
        self
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub fn find<'a>(checks: &'a [Check], name: &str) -> Option<&'a Check> {
    checks.iter().find(|c| c.name == name)
}
