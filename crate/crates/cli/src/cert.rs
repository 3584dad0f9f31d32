use boxdim_core::report::Check;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = concat!("boxdim ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub claim: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub verdict: &'static str,
    pub result: Value,
    pub tool_version: &'static str,
}

impl Certificate {
    /// The verdict is the conjunction of the checks. A failing check without
    /// a witness gets its measured value as one, so every fail names something.
    pub fn new(claim: &str, inputs: Value, mut checks: Vec<Check>, result: Value) -> Self {
        for c in checks.iter_mut().filter(|c| !c.pass && c.witness.is_none()) {
            c.witness = Some(json!({"measured": c.measured_value.clone().unwrap_or(Value::Null)}));
        }
        let pass = checks.iter().all(|c| c.pass);
        Certificate {
            claim: claim.into(),
            inputs,
            checks,
            verdict: if pass { "pass" } else { "fail" },
            result,
            tool_version: TOOL_VERSION,
        }
    }

    pub fn pass(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Writes to `out` through a sibling temporary file and a rename, or to
/// standard output.
pub fn emit(cert: &Certificate, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(cert).map_err(std::io::Error::other)?;
    text.push('\n');
    match out {
        None => std::io::stdout().lock().write_all(text.as_bytes()),
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p)
        }
    }
}
