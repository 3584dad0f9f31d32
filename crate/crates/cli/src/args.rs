use crate::CliError;
use boxdim_core::chains::{Lattice, SubgroupChain};
use boxdim_core::dynamics::{build_odometer, odometer_lattice, FiniteAction};
use boxdim_core::group::{Element, GroupSpec};
use clap::Args;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;
use std::path::Path;

/// Reads a JSON file. A certificate written by this tool is unwrapped to its
/// `result` block so outputs can be fed back in.
pub fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    match (v.get("claim"), v.get("result")) {
        (Some(_), Some(r)) => Ok(r.clone()),
        _ => Ok(v),
    }
}

pub fn in_file(path: &str, e: boxdim_core::Error) -> CliError {
    CliError::Usage(format!("{path}: {e}"))
}

pub fn group(s: &str) -> Result<GroupSpec, CliError> {
    if s.ends_with(".json") || Path::new(s).is_file() {
        let v = read_json(s)?;
        return GroupSpec::from_json(&v).map_err(|e| in_file(s, e));
    }
    GroupSpec::preset(s).map_err(|e| CliError::Usage(format!("--group: {e}")))
}

/// `[1,2,3]` or `1,2,3`.
pub fn element(spec: &GroupSpec, s: &str, what: &str) -> Result<Element, CliError> {
    let t = s.trim();
    let body = if t.starts_with('[') { t.to_string() } else { format!("[{t}]") };
    let e: Element = serde_json::from_str(&body).map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    spec.check(&e).map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    Ok(e)
}

pub fn elements_file(spec: &GroupSpec, path: &str) -> Result<Vec<Element>, CliError> {
    let v = read_json(path)?;
    let list: Vec<Element> = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    for (i, x) in list.iter().enumerate() {
        spec.check(x).map_err(|e| CliError::Usage(format!("{path}: [{i}]: {e}")))?;
    }
    Ok(list)
}

pub fn divisors(s: &str, what: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<BigInt>().map_err(|e| CliError::Usage(format!("{what}: {p:?}: {e}"))))
        .collect()
}

pub fn lattice(spec: &GroupSpec, s: &str, what: &str) -> Result<Lattice, CliError> {
    Lattice::new(spec, divisors(s, what)?).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

pub fn rational(s: &str, what: &str) -> Result<BigRational, CliError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| CliError::Usage(format!("{what}: {s:?}: {e}")))
}

/// Chain presets `factorial`, `scaled`, `congruence`, `constant:D1,D2,…`,
/// or a chain JSON file.
pub fn chain(spec: &GroupSpec, s: &str, first: usize, last: usize) -> Result<SubgroupChain, CliError> {
    let usage = |e: boxdim_core::Error| CliError::Usage(format!("--chain: {e}"));
    if s.ends_with(".json") || Path::new(s).is_file() {
        let v = read_json(s)?;
        let c: SubgroupChain = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{s}: {e}")))?;
        if c.group() != spec {
            return Err(CliError::Usage(format!("{s}: group: differs from --group")));
        }
        return Ok(c);
    }
    if let Some(d) = s.strip_prefix("constant:") {
        return SubgroupChain::constant(spec.clone(), divisors(d, "--chain")?, last + 1).map_err(usage);
    }
    let kind = match s {
        "factorial" => boxdim_core::chains::ChainKind::FactorialAbelian,
        "scaled" => boxdim_core::chains::ChainKind::ScaledUnitriangular,
        "congruence" => boxdim_core::chains::ChainKind::CongruenceUnitriangular,
        other => {
            return Err(CliError::Usage(format!(
                "--chain: unknown preset {other:?} (use factorial, scaled, congruence, constant:D,… or a file)"
            )))
        }
    };
    SubgroupChain::new(spec.clone(), kind, first, last).map_err(usage)
}

/// Where a finite action comes from: a file, a chain stage, or a lattice.
#[derive(Args, Clone, Debug)]
pub struct ActionArgs {
    /// Group preset (z, z2, …, u3) or GroupSpec file.
    #[arg(long, default_value = "z")]
    pub group: String,
    /// Chain preset or chain file.
    #[arg(long)]
    pub chain: Option<String>,
    /// Stage of the chain defining the action.
    #[arg(long)]
    pub stage: Option<usize>,
    /// Lattice divisors, comma separated, defining G/Γ.
    #[arg(long)]
    pub lattice: Option<String>,
    /// FiniteAction file.
    #[arg(long)]
    pub action: Option<String>,
}

impl ActionArgs {
    pub fn build(&self, cap: usize) -> Result<FiniteAction, CliError> {
        if let Some(p) = &self.action {
            let v = read_json(p)?;
            return FiniteAction::from_json(&v).map_err(|e| in_file(p, e));
        }
        let g = group(&self.group)?;
        match (&self.chain, self.stage, &self.lattice) {
            (Some(c), Some(m), None) => {
                let chain = chain(&g, c, 0, m)?;
                Ok(build_odometer(&chain, m, cap)?)
            }
            (None, None, Some(l)) => Ok(odometer_lattice(&g, &lattice(&g, l, "--lattice")?, cap)?),
            _ => Err(CliError::Usage(
                "give --action FILE, --chain with --stage, or --lattice".into(),
            )),
        }
    }

    pub fn provenance(&self) -> Value {
        serde_json::json!({
            "group": self.group,
            "chain": self.chain,
            "stage": self.stage,
            "lattice": self.lattice,
            "action": self.action,
        })
    }
}
