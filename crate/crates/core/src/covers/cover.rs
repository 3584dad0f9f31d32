use crate::chains::{Lattice, SubgroupChain};
use crate::error::{invalid, Error, Result};
use crate::group::{word_length, Element, GroupSpec};
use crate::json::{int_to_value, Int};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use std::collections::{HashMap, HashSet};

/// A finite base set: an explicit list of points or a coordinate brick
/// (product of closed integer intervals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSet {
    Points(Vec<Element>),
    Brick(Vec<(BigInt, BigInt)>),
}

impl BaseSet {
    pub fn brick_i64(bounds: &[(i64, i64)]) -> Self {
        BaseSet::Brick(bounds.iter().map(|&(a, b)| (a.into(), b.into())).collect())
    }

    pub fn points_i64(points: &[&[i64]]) -> Self {
        BaseSet::Points(points.iter().map(|p| Element::from_i64s(p)).collect())
    }

    pub fn in_brick(bounds: &[(BigInt, BigInt)], x: &Element) -> bool {
        x.0.iter().zip(bounds).all(|(c, (lo, hi))| lo <= c && c <= hi)
    }

    /// Number of points.
    pub fn size(&self) -> BigInt {
        match self {
            BaseSet::Points(p) => p.len().into(),
            BaseSet::Brick(b) => b
                .iter()
                .map(|(lo, hi)| (hi - lo + 1u32).max(BigInt::zero()))
                .product(),
        }
    }

    /// All points, refusing to enumerate more than `cap`.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Element>> {
        match self {
            BaseSet::Points(p) => Ok(p.clone()),
            BaseSet::Brick(b) => {
                if self.size() > BigInt::from(cap) {
                    return Err(Error::Cap { cap });
                }
                let mut out = vec![Element(Vec::new())];
                for (lo, hi) in b {
                    let mut next = Vec::new();
                    for p in &out {
                        let mut v = lo.clone();
                        while &v <= hi {
                            let mut q = p.clone();
                            q.0.push(v.clone());
                            next.push(q);
                            v += 1;
                        }
                    }
                    out = next;
                }
                Ok(out)
            }
        }
    }

    pub(crate) fn to_json(&self) -> Value {
        match self {
            BaseSet::Points(p) => serde_json::to_value(p).expect("serializable"),
            BaseSet::Brick(b) => json!({
                "brick": b.iter().map(|(lo, hi)| json!([int_to_value(lo), int_to_value(hi)])).collect::<Vec<_>>()
            }),
        }
    }

    pub(crate) fn from_json(v: &Value, dim: usize, at: &str) -> Result<Self> {
        let base = if let Some(obj) = v.as_object() {
            let raw = obj
                .get("brick")
                .ok_or_else(|| Error::Invalid(format!("{at}: expected a point list or {{\"brick\": ...}}")))?;
            let pairs: Vec<(Int, Int)> = serde_json::from_value(raw.clone())
                .map_err(|e| Error::Invalid(format!("{at}.brick: {e}")))?;
            BaseSet::Brick(pairs.into_iter().map(|(a, b)| (a.0, b.0)).collect())
        } else {
            let pts: Vec<Element> =
                serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("{at}: {e}")))?;
            BaseSet::Points(pts)
        };
        match &base {
            BaseSet::Points(p) => {
                if let Some(bad) = p.iter().find(|e| e.dim() != dim) {
                    return invalid(format!("{at}: element {bad} has {} coordinates, expected {dim}", bad.dim()));
                }
            }
            BaseSet::Brick(b) => {
                if b.len() != dim {
                    return invalid(format!("{at}.brick: {} intervals, expected {dim}", b.len()));
                }
            }
        }
        Ok(base)
    }
}

/// The subgroup G_n under whose right action every colour class is invariant,
/// optionally tied to a stage of a named chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodStage {
    pub lattice: Lattice,
    pub chain: Option<(SubgroupChain, usize)>,
}

impl PeriodStage {
    pub fn lattice(lattice: Lattice) -> Self {
        PeriodStage { lattice, chain: None }
    }

    pub fn from_chain(chain: &SubgroupChain, n: usize) -> Result<Self> {
        Ok(PeriodStage {
            lattice: chain.stage(n)?,
            chain: Some((chain.clone(), n)),
        })
    }

    pub(crate) fn to_json(&self) -> Value {
        let d: Vec<Value> = self.lattice.divisors().iter().map(int_to_value).collect();
        let mut v = json!({ "divisors": d });
        if let Some((c, n)) = &self.chain {
            v["chain"] = serde_json::to_value(c).expect("serializable");
            v["stage"] = json!(n);
        }
        v
    }

    pub(crate) fn from_json(v: &Value, group: &GroupSpec) -> Result<Self> {
        let at = "period_stage";
        if let Some(c) = v.get("chain") {
            let chain: SubgroupChain =
                serde_json::from_value(c.clone()).map_err(|e| Error::Invalid(format!("{at}.chain: {e}")))?;
            let n = v
                .get("stage")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Invalid(format!("{at}.stage: required with a chain")))? as usize;
            if chain.group() != group {
                return invalid(format!("{at}.chain: group differs from the cover group"));
            }
            return Self::from_chain(&chain, n);
        }
        let d: Vec<Int> = serde_json::from_value(
            v.get("divisors")
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("{at}.divisors: missing")))?,
        )
        .map_err(|e| Error::Invalid(format!("{at}.divisors: {e}")))?;
        Ok(PeriodStage::lattice(
            Lattice::new(group, d.into_iter().map(|i| i.0).collect())
                .map_err(|e| Error::Invalid(format!("{at}.divisors: {e}")))?,
        ))
    }
}

/// An (s+1)-coloured cover whose members are base·h for h in the period subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredCover {
    pub group: GroupSpec,
    pub period: PeriodStage,
    pub colors: Vec<Vec<BaseSet>>,
    pub scale_r: u32,
}

impl ColoredCover {
    pub fn new(group: GroupSpec, period: PeriodStage, colors: Vec<Vec<BaseSet>>, scale_r: u32) -> Result<Self> {
        let c = ColoredCover {
            group,
            period,
            colors,
            scale_r,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.colors.is_empty() {
            return invalid("cover has no colours");
        }
        Lattice::new(&self.group, self.period.lattice.divisors().to_vec())?;
        for (l, bases) in self.colors.iter().enumerate() {
            for (b, base) in bases.iter().enumerate() {
                BaseSet::from_json(&base.to_json(), self.group.dim(), &format!("colors[{l}][{b}]"))?;
            }
        }
        Ok(())
    }

    /// The two-colour cover of ℤ with period 8ℤ and bases {0..5}, {4..9}.
    pub fn period_eight_demo() -> Self {
        let g = GroupSpec::free_abelian(1).expect("rank 1");
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[8]).expect("8ℤ"));
        let base = |r: std::ops::RangeInclusive<i64>| BaseSet::Points(r.map(|i| Element::from_i64s(&[i])).collect());
        ColoredCover::new(g, p, vec![vec![base(0..=5)], vec![base(4..=9)]], 1).expect("valid demo cover")
    }

    /// s, the number of colours minus one.
    pub fn s(&self) -> usize {
        self.colors.len() - 1
    }

    pub fn is_brick_shaped(&self) -> bool {
        self.colors
            .iter()
            .flatten()
            .all(|b| matches!(b, BaseSet::Brick(_)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.to_json(),
            "period_stage": self.period.to_json(),
            "scale_R": self.scale_r,
            "colors": self.colors.iter().map(|c| c.iter().map(BaseSet::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupSpec::from_json(v.get("group").ok_or_else(|| Error::Invalid("group: missing".into()))?)?;
        let period = PeriodStage::from_json(
            v.get("period_stage")
                .ok_or_else(|| Error::Invalid("period_stage: missing".into()))?,
            &group,
        )?;
        let scale_r = v
            .get("scale_R")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Invalid("scale_R: missing or not a nonnegative integer".into()))?
            as u32;
        let colors_v = v
            .get("colors")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("colors: missing or not an array".into()))?;
        let mut colors = Vec::new();
        for (l, c) in colors_v.iter().enumerate() {
            let bases = c
                .as_array()
                .ok_or_else(|| Error::Invalid(format!("colors[{l}]: not an array")))?;
            colors.push(
                bases
                    .iter()
                    .enumerate()
                    .map(|(b, base)| BaseSet::from_json(base, group.dim(), &format!("colors[{l}][{b}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        ColoredCover::new(group, period, colors, scale_r)
    }

    /// Merge each colour's base sets into one (only meaningful when they are
    /// pairwise in distinct cosets, which disjointness guarantees).
    pub fn consolidated(&self, cap: usize) -> Result<ColoredCover> {
        let mut colors = Vec::new();
        for bases in &self.colors {
            if bases.len() == 1 {
                colors.push(bases.clone());
                continue;
            }
            let mut pts = Vec::new();
            for b in bases {
                pts.extend(b.enumerate(cap)?);
            }
            pts.sort();
            pts.dedup();
            colors.push(if pts.is_empty() { vec![] } else { vec![BaseSet::Points(pts)] });
        }
        ColoredCover::new(self.group.clone(), self.period.clone(), colors, self.scale_r)
    }

    /// A bound on the diameter of every member (exact for free abelian
    /// groups with standard generators and moderate base sets).
    pub fn diameter_bound(&self, cap: usize) -> Option<BigInt> {
        let mut best = BigInt::zero();
        for b in self.colors.iter().flatten() {
            best = best.max(diameter_bound(&self.group, b, cap)?);
        }
        Some(best)
    }
}

impl Serialize for ColoredCover {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColoredCover {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        ColoredCover::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &(&r * &r) < n {
        r + 1
    } else {
        r
    }
}

/// |Z^k| ≤ 6⌈√|k|⌉ in U_3 via commutators [X^p, Y^q] = Z^{pq}.
fn u3_center_bound(k: &BigInt) -> BigInt {
    ceil_sqrt(&k.abs()) * 6
}

/// Upper bound on |(a,c,b)| in U_3 from (a,c,b) = Z^{c−ab}·X^a·Y^b.
pub(crate) fn u3_length_bound(x: &Element) -> BigInt {
    let (a, c, b) = (&x.0[0], &x.0[1], &x.0[2]);
    a.abs() + b.abs() + u3_center_bound(&(c - a * b))
}

fn diameter_bound(group: &GroupSpec, base: &BaseSet, cap: usize) -> Option<BigInt> {
    let l1 = group.is_free_abelian() && group.has_default_generators();
    match base {
        BaseSet::Brick(b) if l1 => Some(b.iter().map(|(lo, hi)| (hi - lo).max(BigInt::zero())).sum()),
        BaseSet::Brick(b) if group.is_standard_u3() => {
            let m = |(lo, hi): &(BigInt, BigInt)| lo.abs().max(hi.abs());
            let (a, c, bb) = (m(&b[0]), m(&b[1]), m(&b[2]));
            let reach = &a + &bb + u3_center_bound(&(&c + &a * &bb));
            Some(reach * 2)
        }
        BaseSet::Brick(_) => {
            let pts = base.enumerate(cap).ok()?;
            diameter_bound(group, &BaseSet::Points(pts), cap)
        }
        BaseSet::Points(p) if p.is_empty() => Some(BigInt::zero()),
        BaseSet::Points(p) if l1 && p.len() <= 3000 => {
            let mut best = BigInt::zero();
            for (i, x) in p.iter().enumerate() {
                for y in &p[i + 1..] {
                    let d: BigInt = x.0.iter().zip(&y.0).map(|(a, b)| (a - b).abs()).sum();
                    best = best.max(d);
                }
            }
            Some(best)
        }
        BaseSet::Points(p) => {
            // right translation is an isometry: diam ≤ 2·max |u·u0⁻¹|
            let u0i = group.invert(&p[0]);
            let mut best = BigInt::zero();
            for u in p {
                let v = group.multiply(u, &u0i);
                let len = if group.is_standard_u3() {
                    u3_length_bound(&v)
                } else {
                    word_length(group, &v, cap).ok()?.into()
                };
                best = best.max(len);
            }
            Some(best * 2)
        }
    }
}

/// Membership structure for one colour: which base points lie in the
/// period coset of a given element.
pub(crate) struct ColorIndex<'a> {
    group: &'a GroupSpec,
    period: &'a Lattice,
    bases: &'a [BaseSet],
    sets: Vec<Option<HashSet<Element>>>,
    by_coset: HashMap<Element, Vec<(usize, Element)>>,
}

impl<'a> ColorIndex<'a> {
    pub(crate) fn new(group: &'a GroupSpec, period: &'a Lattice, bases: &'a [BaseSet]) -> Self {
        let mut sets = Vec::new();
        let mut by_coset: HashMap<Element, Vec<(usize, Element)>> = HashMap::new();
        for (b, base) in bases.iter().enumerate() {
            match base {
                BaseSet::Points(p) => {
                    for u in p {
                        by_coset
                            .entry(period.canonical(group, u))
                            .or_default()
                            .push((b, u.clone()));
                    }
                    sets.push(Some(p.iter().cloned().collect()));
                }
                BaseSet::Brick(_) => sets.push(None),
            }
        }
        ColorIndex {
            group,
            period,
            bases,
            sets,
            by_coset,
        }
    }

    /// All (b, u) with u ∈ base_b and u in the coset x·P; each is the member
    /// base_b·(u⁻¹x) containing x.
    pub(crate) fn members_at(&self, x: &Element) -> Vec<(usize, Element)> {
        let mut out = Vec::new();
        if !self.by_coset.is_empty() {
            if let Some(v) = self.by_coset.get(&self.period.canonical(self.group, x)) {
                out.extend(v.iter().cloned());
            }
        }
        for (b, base) in self.bases.iter().enumerate() {
            if let BaseSet::Brick(bounds) = base {
                let lo: Vec<BigInt> = bounds.iter().map(|p| p.0.clone()).collect();
                let hi: Vec<BigInt> = bounds.iter().map(|p| p.1.clone()).collect();
                for u in self.period.coset_points_in_box(self.group, x, &lo, &hi) {
                    out.push((b, u));
                }
            }
        }
        out
    }

    pub(crate) fn contains(&self, b: usize, y: &Element) -> bool {
        match (&self.bases[b], &self.sets[b]) {
            (_, Some(set)) => set.contains(y),
            (BaseSet::Brick(bounds), None) => BaseSet::in_brick(bounds, y),
            (BaseSet::Points(_), None) => unreachable!("point sets are indexed"),
        }
    }
}
