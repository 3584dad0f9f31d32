use super::lattice::Lattice;
use crate::error::{invalid, Error, Result};
use crate::group::GroupSpec;
use crate::json::{ints, unints, Int};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// G_n = n!·ℤ^m.
    FactorialAbelian,
    /// H_n = α_{(n+1)!}(G).
    ScaledUnitriangular,
    /// Every entry divisible by n!.
    CongruenceUnitriangular,
    /// Explicit divisor vectors, stage n = entry n.
    Custom(Vec<Vec<BigInt>>),
}

impl ChainKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChainKind::FactorialAbelian => "factorial-abelian",
            ChainKind::ScaledUnitriangular => "scaled-unitriangular",
            ChainKind::CongruenceUnitriangular => "congruence-unitriangular",
            ChainKind::Custom(_) => "custom",
        }
    }
}

/// A decreasing chain of finite-index lattice subgroups, materialized on the
/// stage range `first..=last`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupChain {
    group: GroupSpec,
    kind: ChainKind,
    first: usize,
    last: usize,
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

impl SubgroupChain {
    pub fn new(group: GroupSpec, kind: ChainKind, first: usize, last: usize) -> Result<Self> {
        if first > last {
            return invalid(format!("empty stage range {first}..{last}"));
        }
        match &kind {
            ChainKind::FactorialAbelian if !group.is_free_abelian() => {
                return invalid("factorial-abelian chains need a free abelian group")
            }
            ChainKind::Custom(stages) if last >= stages.len() => {
                return invalid(format!(
                    "custom chain has {} stages, range asks for stage {last}",
                    stages.len()
                ))
            }
            _ => {}
        }
        let chain = SubgroupChain {
            group,
            kind,
            first,
            last,
        };
        for n in first..=last {
            chain.stage(n)?;
        }
        chain.check_decreasing()?;
        Ok(chain)
    }

    pub fn factorial_abelian(group: GroupSpec, first: usize, last: usize) -> Result<Self> {
        Self::new(group, ChainKind::FactorialAbelian, first, last)
    }

    pub fn scaled_unitriangular(group: GroupSpec, first: usize, last: usize) -> Result<Self> {
        Self::new(group, ChainKind::ScaledUnitriangular, first, last)
    }

    pub fn congruence_unitriangular(group: GroupSpec, first: usize, last: usize) -> Result<Self> {
        Self::new(group, ChainKind::CongruenceUnitriangular, first, last)
    }

    pub fn custom(group: GroupSpec, stages: Vec<Vec<BigInt>>) -> Result<Self> {
        let last = stages.len().checked_sub(1).ok_or_else(|| Error::Invalid("custom chain needs at least one stage".into()))?;
        Self::new(group, ChainKind::Custom(stages), 0, last)
    }

    /// The same lattice at every stage (a non-separating chain, for controls).
    pub fn constant(group: GroupSpec, divisors: Vec<BigInt>, stages: usize) -> Result<Self> {
        Self::custom(group, vec![divisors; stages.max(1)])
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn kind(&self) -> &ChainKind {
        &self.kind
    }

    pub fn range(&self) -> (usize, usize) {
        (self.first, self.last)
    }

    pub fn stages(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn stage(&self, n: usize) -> Result<Lattice> {
        let g = &self.group;
        match &self.kind {
            ChainKind::FactorialAbelian | ChainKind::CongruenceUnitriangular => {
                Lattice::uniform(g, &factorial(n))
            }
            ChainKind::ScaledUnitriangular => Lattice::scaled(g, &factorial(n + 1)),
            ChainKind::Custom(stages) => match stages.get(n) {
                Some(d) => Lattice::new(g, d.clone()),
                None => invalid(format!("custom chain has no stage {n}")),
            },
        }
    }

    pub fn is_normal(&self, n: usize) -> Result<bool> {
        Ok(self.stage(n)?.is_normal(&self.group))
    }

    fn check_decreasing(&self) -> Result<()> {
        for n in self.first..self.last {
            if !self.stage(n + 1)?.is_subgroup_of(&self.stage(n)?) {
                return invalid(format!("stage {} is not contained in stage {n}", n + 1));
            }
        }
        Ok(())
    }

    /// `z` / `u3` presets combined with a chain kind name.
    pub fn preset(group: &str, kind: &str, first: usize, last: usize) -> Result<Self> {
        let g = GroupSpec::preset(group)?;
        match kind {
            "factorial" | "factorial-abelian" => Self::factorial_abelian(g, first, last),
            "scaled" | "scaled-unitriangular" => Self::scaled_unitriangular(g, first, last),
            "congruence" | "congruence-unitriangular" => Self::congruence_unitriangular(g, first, last),
            other => invalid(format!("unknown chain preset {other:?} (use factorial, scaled, congruence)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    group: GroupSpec,
    kind: String,
    stages: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    divisors: Option<Vec<Vec<Int>>>,
}

impl Serialize for SubgroupChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let divisors = match &self.kind {
            ChainKind::Custom(st) => Some(st.iter().map(|d| ints(d)).collect()),
            _ => None,
        };
        ChainJson {
            group: self.group.clone(),
            kind: self.kind.name().into(),
            stages: [self.first, self.last],
            divisors,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubgroupChain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ChainJson::deserialize(d)?;
        let kind = match raw.kind.as_str() {
            "factorial-abelian" => ChainKind::FactorialAbelian,
            "scaled-unitriangular" => ChainKind::ScaledUnitriangular,
            "congruence-unitriangular" => ChainKind::CongruenceUnitriangular,
            "custom" => ChainKind::Custom(
                raw.divisors
                    .ok_or_else(|| D::Error::custom("chain.divisors: required for custom chains"))?
                    .into_iter()
                    .map(unints)
                    .collect(),
            ),
            other => return Err(D::Error::custom(format!("chain.kind: unknown kind {other:?}"))),
        };
        SubgroupChain::new(raw.group, kind, raw.stages[0], raw.stages[1]).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stages_of_builtin_chains() {
        let z = GroupSpec::free_abelian(1).unwrap();
        let c = SubgroupChain::factorial_abelian(z, 0, 5).unwrap();
        assert_eq!(c.stage(3).unwrap().divisors(), &[BigInt::from(6)]);
        let u3 = GroupSpec::unitriangular(3).unwrap();
        let s = SubgroupChain::scaled_unitriangular(u3.clone(), 0, 3).unwrap();
        assert_eq!(s.stage(1).unwrap().index(), BigInt::from(16));
        assert_eq!(s.stage(2).unwrap().divisors(), &[6.into(), 36.into(), 6.into()]);
        assert!(!s.is_normal(1).unwrap());
        let k = SubgroupChain::congruence_unitriangular(u3, 0, 4).unwrap();
        assert!(k.is_normal(3).unwrap());
    }

    #[test]
    fn custom_chain_must_decrease() {
        let z = GroupSpec::free_abelian(1).unwrap();
        let bad = vec![vec![BigInt::from(4)], vec![BigInt::from(6)]];
        assert!(SubgroupChain::custom(z.clone(), bad).is_err());
        let ok = SubgroupChain::constant(z, vec![BigInt::from(6)], 4).unwrap();
        assert_eq!(ok.range(), (0, 3));
    }

    #[test]
    fn chain_json_round_trip() {
        let c = SubgroupChain::preset("u3", "scaled", 1, 2).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["kind"], "scaled-unitriangular");
        let back: SubgroupChain = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
        let bad = serde_json::json!({"group": "z", "kind": "custom", "stages": [0, 0]});
        let err = serde_json::from_value::<SubgroupChain>(bad).unwrap_err().to_string();
        assert!(err.contains("chain.divisors"));
    }
}
