use crate::covers::{BaseSet, PeriodStage};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::json::{frac_value, Frac};
use crate::scalar::Scalar;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Decay functions μ^(l): G → [0,1], one per colour, supported on the base
/// set U^(l) and summing to one over all right translates by the period.
///
/// Values are stored for every support point when `complete`, and otherwise
/// only at the points a verification window needs (the period
/// representatives of window points and their shifts by `scale_m`).
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFamily<S: Scalar> {
    pub group: GroupSpec,
    pub period: PeriodStage,
    pub supports: Vec<BaseSet>,
    pub values: Vec<BTreeMap<Element, S>>,
    pub complete: bool,
    pub tolerance_eps: S,
    pub scale_m: Vec<Element>,
    /// Lebesgue scale of the source cover, 0 when unknown.
    pub source_r: u32,
}

impl<S: Scalar> DecayFamily<S> {
    pub fn s(&self) -> usize {
        self.supports.len().saturating_sub(1)
    }

    /// μ^(l)(u); zero off the support, an error when u is in the support but
    /// its value was not materialized.
    pub fn value(&self, l: usize, u: &Element) -> Result<S> {
        if let Some(v) = self.values[l].get(u) {
            return Ok(v.clone());
        }
        let inside = match &self.supports[l] {
            BaseSet::Brick(b) => BaseSet::in_brick(b, u),
            BaseSet::Points(p) => self.complete || p.contains(u),
        };
        if inside && !self.complete {
            return Err(Error::WindowTooSmall(format!("μ^({l}) at {u} was not materialized")));
        }
        Ok(S::zero())
    }

    pub fn with_tolerance(mut self, eps: S) -> Self {
        self.tolerance_eps = eps;
        self
    }

    /// Number of stored values.
    pub fn stored(&self) -> usize {
        self.values.iter().map(BTreeMap::len).sum()
    }

    pub fn to_json(&self) -> Value {
        let functions: Vec<Value> = self
            .values
            .iter()
            .map(|m| {
                Value::Array(
                    m.iter()
                        .map(|(e, v)| {
                            let q = v.to_rational();
                            let f = Frac::from(&q);
                            json!({"element": e, "numerator": f.num, "denominator": f.den})
                        })
                        .collect(),
                )
            })
            .collect();
        json!({
            "group": self.group.to_json(),
            "period_stage": self.period.to_json(),
            "eps": frac_value(&self.tolerance_eps.to_rational()),
            "M": self.scale_m,
            "complete": self.complete,
            "source_R": self.source_r,
            "supports": self.supports.iter().map(BaseSet::to_json).collect::<Vec<_>>(),
            "functions": functions,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Invalid(format!("{k}: missing")));
        let group = GroupSpec::from_json(field("group")?)?;
        let period = PeriodStage::from_json(field("period_stage")?, &group)?;
        let eps: Frac = serde_json::from_value(field("eps")?.clone()).map_err(|e| Error::Invalid(format!("eps: {e}")))?;
        let eps = eps.to_rational().map_err(|e| Error::Invalid(format!("eps: {e}")))?;
        let scale_m: Vec<Element> =
            serde_json::from_value(field("M")?.clone()).map_err(|e| Error::Invalid(format!("M: {e}")))?;
        for (i, g) in scale_m.iter().enumerate() {
            group.check(g).map_err(|e| Error::Invalid(format!("M[{i}]: {e}")))?;
        }
        let complete = field("complete")?
            .as_bool()
            .ok_or_else(|| Error::Invalid("complete: not a boolean".into()))?;
        let source_r = v.get("source_R").and_then(Value::as_u64).unwrap_or(0) as u32;
        let supports = field("supports")?
            .as_array()
            .ok_or_else(|| Error::Invalid("supports: not an array".into()))?
            .iter()
            .enumerate()
            .map(|(l, s)| BaseSet::from_json(s, group.dim(), &format!("supports[{l}]")))
            .collect::<Result<Vec<_>>>()?;
        let funcs = field("functions")?
            .as_array()
            .ok_or_else(|| Error::Invalid("functions: not an array".into()))?;
        if funcs.len() != supports.len() {
            return Err(Error::Invalid(format!(
                "functions: {} colours but {} supports",
                funcs.len(),
                supports.len()
            )));
        }
        let mut values = Vec::new();
        for (l, f) in funcs.iter().enumerate() {
            let entries = f
                .as_array()
                .ok_or_else(|| Error::Invalid(format!("functions[{l}]: not an array")))?;
            let mut m = BTreeMap::new();
            for (i, e) in entries.iter().enumerate() {
                let at = format!("functions[{l}][{i}]");
                let el: Element = serde_json::from_value(e.get("element").cloned().unwrap_or(Value::Null))
                    .map_err(|err| Error::Invalid(format!("{at}.element: {err}")))?;
                group.check(&el).map_err(|err| Error::Invalid(format!("{at}.element: {err}")))?;
                let frac: Frac = serde_json::from_value(json!({
                    "num": e.get("numerator").cloned().unwrap_or(Value::Null),
                    "den": e.get("denominator").cloned().unwrap_or(Value::Null),
                }))
                .map_err(|err| Error::Invalid(format!("{at}: {err}")))?;
                let q = frac.to_rational().map_err(|err| Error::Invalid(format!("{at}: {err}")))?;
                m.insert(el, S::from_ratio(q.numer(), q.denom()));
            }
            values.push(m);
        }
        Ok(DecayFamily {
            group,
            period,
            supports,
            values,
            complete,
            tolerance_eps: S::from_ratio(eps.numer(), eps.denom()),
            scale_m,
            source_r,
        })
    }
}
