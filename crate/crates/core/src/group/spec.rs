use super::element::Element;
use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    FreeAbelian(usize),
    Unitriangular(usize),
    DirectProduct(Vec<GroupSpec>),
}

/// One factor of the flattened product, occupying `len` coordinates from `offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Block {
    Abelian { offset: usize, m: usize },
    Uni { offset: usize, d: usize },
}

/// Row-major position of the (i,j) entry (0-based, i<j) among the strictly
/// upper entries of a d×d matrix.
pub(crate) fn uni_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * (2 * d - i - 1) / 2 + (j - i - 1)
}

pub(crate) fn uni_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            v.push((i, j));
        }
    }
    v
}

/// A finitely generated group backend with a symmetric generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    generators: Vec<Element>,
    blocks: Vec<Block>,
    dim: usize,
    /// Weight of each coordinate: j−i for unitriangular entries, 1 otherwise.
    levels: Vec<u32>,
}

fn flatten(kind: &GroupKind, offset: &mut usize, out: &mut Vec<Block>) {
    match kind {
        GroupKind::FreeAbelian(m) => {
            out.push(Block::Abelian { offset: *offset, m: *m });
            *offset += m;
        }
        GroupKind::Unitriangular(d) => {
            out.push(Block::Uni { offset: *offset, d: *d });
            *offset += d * (d - 1) / 2;
        }
        GroupKind::DirectProduct(parts) => {
            for p in parts {
                flatten(&p.kind, offset, out);
            }
        }
    }
}

fn default_generators(kind: &GroupKind, dim: usize) -> Vec<Element> {
    match kind {
        GroupKind::FreeAbelian(m) => {
            let mut g = Vec::new();
            for i in 0..*m {
                for sign in [1i64, -1] {
                    let mut e = Element::zero(dim);
                    e.0[i] = BigInt::from(sign);
                    g.push(e);
                }
            }
            g
        }
        GroupKind::Unitriangular(d) => {
            let mut g = Vec::new();
            for i in 0..d - 1 {
                for sign in [1i64, -1] {
                    let mut e = Element::zero(dim);
                    e.0[uni_index(*d, i, i + 1)] = BigInt::from(sign);
                    g.push(e);
                }
            }
            g
        }
        GroupKind::DirectProduct(parts) => {
            let mut g = Vec::new();
            let mut off = 0;
            for p in parts {
                for s in &p.generators {
                    let mut e = Element::zero(dim);
                    e.0[off..off + p.dim].clone_from_slice(&s.0);
                    g.push(e);
                }
                off += p.dim;
            }
            g
        }
    }
}

impl GroupSpec {
    fn build(kind: GroupKind, generators: Option<Vec<Element>>) -> Result<Self> {
        match &kind {
            GroupKind::FreeAbelian(0) => return invalid("free-abelian rank must be ≥ 1"),
            GroupKind::Unitriangular(d) if *d < 2 => {
                return invalid("unitriangular size must be ≥ 2")
            }
            GroupKind::DirectProduct(p) if p.is_empty() => {
                return invalid("direct product needs at least one factor")
            }
            _ => {}
        }
        let mut blocks = Vec::new();
        let mut dim = 0;
        flatten(&kind, &mut dim, &mut blocks);
        let mut levels = vec![1u32; dim];
        for b in &blocks {
            if let Block::Uni { offset, d } = b {
                for (i, j) in uni_pairs(*d) {
                    levels[offset + uni_index(*d, i, j)] = (j - i) as u32;
                }
            }
        }
        let generators = match generators {
            Some(g) => g,
            None => default_generators(&kind, dim),
        };
        let spec = GroupSpec {
            kind,
            generators,
            blocks,
            dim,
            levels,
        };
        spec.check_generators()?;
        Ok(spec)
    }

    fn check_generators(&self) -> Result<()> {
        if self.generators.is_empty() {
            return invalid("generating set is empty");
        }
        let set: HashSet<&Element> = self.generators.iter().collect();
        if set.len() != self.generators.len() {
            return invalid("generating set has repeated elements");
        }
        for g in &self.generators {
            self.check(g)?;
            if g.is_identity() {
                return invalid("generating set contains the identity");
            }
            if !set.contains(&self.invert(g)) {
                return invalid(format!("generating set is not symmetric: missing inverse of {g}"));
            }
        }
        Ok(())
    }

    pub fn free_abelian(m: usize) -> Result<Self> {
        Self::build(GroupKind::FreeAbelian(m), None)
    }

    pub fn unitriangular(d: usize) -> Result<Self> {
        Self::build(GroupKind::Unitriangular(d), None)
    }

    pub fn direct_product(parts: Vec<GroupSpec>) -> Result<Self> {
        Self::build(GroupKind::DirectProduct(parts), None)
    }

    /// Same group, explicit generating set (must be symmetric, no identity).
    pub fn with_generators(&self, generators: Vec<Element>) -> Result<Self> {
        Self::build(self.kind.clone(), Some(generators))
    }

    /// `z`, `z2`, ..., `u3`, `u4`, ...
    pub fn preset(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        let (head, tail) = lower.split_at(1.min(lower.len()));
        let n = if tail.is_empty() {
            Some(1)
        } else {
            tail.parse::<usize>().ok()
        };
        match (head, n) {
            ("z", Some(m)) if (1..=16).contains(&m) => Self::free_abelian(m),
            ("u", Some(d)) if (2..=8).contains(&d) && !tail.is_empty() => Self::unitriangular(d),
            _ => invalid(format!("unknown group preset {name:?} (use z, z2..z16, u2..u8)")),
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn identity(&self) -> Element {
        Element::zero(self.dim)
    }

    pub fn has_default_generators(&self) -> bool {
        self.generators == default_generators(&self.kind, self.dim)
    }

    pub fn is_abelian(&self) -> bool {
        self.blocks.iter().all(|b| match b {
            Block::Abelian { .. } => true,
            Block::Uni { d, .. } => *d == 2,
        })
    }

    /// Whether every factor is free abelian (so coordinates add).
    pub fn is_free_abelian(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b, Block::Abelian { .. }))
    }

    /// The Heisenberg group U_3(ℤ) with its elementary generators.
    pub fn is_standard_u3(&self) -> bool {
        self.kind == GroupKind::Unitriangular(3) && self.has_default_generators()
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: a.dim(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        debug_assert_eq!(a.dim(), self.dim);
        debug_assert_eq!(b.dim(), self.dim);
        let mut out = Vec::with_capacity(self.dim);
        for blk in &self.blocks {
            match *blk {
                Block::Abelian { offset, m } => {
                    for k in offset..offset + m {
                        out.push(&a.0[k] + &b.0[k]);
                    }
                }
                Block::Uni { offset, d } => {
                    let a = &a.0[offset..];
                    let b = &b.0[offset..];
                    for i in 0..d {
                        for j in i + 1..d {
                            let k = uni_index(d, i, j);
                            let mut v = &a[k] + &b[k];
                            for m in i + 1..j {
                                let x = &a[uni_index(d, i, m)];
                                if !x.is_zero() {
                                    v += x * &b[uni_index(d, m, j)];
                                }
                            }
                            out.push(v);
                        }
                    }
                }
            }
        }
        Element(out)
    }

    /// Checked product.
    pub fn try_multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.multiply(a, b))
    }

    pub fn invert(&self, a: &Element) -> Element {
        let mut out = vec![BigInt::zero(); self.dim];
        for blk in &self.blocks {
            match *blk {
                Block::Abelian { offset, m } => {
                    for k in offset..offset + m {
                        out[k] = -&a.0[k];
                    }
                }
                Block::Uni { offset, d } => {
                    let x = &a.0[offset..];
                    // back-substitution by increasing j−i
                    for gap in 1..d {
                        for i in 0..d - gap {
                            let j = i + gap;
                            let mut v = -&x[uni_index(d, i, j)];
                            for m in i + 1..j {
                                let xm = &x[uni_index(d, i, m)];
                                if !xm.is_zero() {
                                    v -= xm * &out[offset + uni_index(d, m, j)];
                                }
                            }
                            out[offset + uni_index(d, i, j)] = v;
                        }
                    }
                }
            }
        }
        Element(out)
    }

    pub fn try_invert(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.invert(a))
    }

    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        let ab = self.multiply(a, b);
        let ai = self.invert(a);
        let bi = self.invert(b);
        self.multiply(&self.multiply(&ab, &ai), &bi)
    }

    /// For coordinate `k`, the pairs (p, q) such that
    /// (x·h)_k = x_k + h_k + Σ x_p·h_q.
    pub(crate) fn product_terms(&self, k: usize) -> Vec<(usize, usize)> {
        for blk in &self.blocks {
            if let Block::Uni { offset, d } = *blk {
                let len = d * (d - 1) / 2;
                if k >= offset && k < offset + len {
                    let (i, j) = uni_pairs(d)[k - offset];
                    return (i + 1..j)
                        .map(|m| (offset + uni_index(d, i, m), offset + uni_index(d, m, j)))
                        .collect();
                }
            }
        }
        Vec::new()
    }

    /// Coordinates sorted so that every coordinate comes after all those its
    /// product terms depend on.
    pub(crate) fn coords_by_level(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.dim).collect();
        v.sort_by_key(|&k| (self.levels[k], k));
        v
    }

    /// Hirsch length (number of coordinates).
    pub fn hirsch_length(&self) -> usize {
        self.dim
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    kind: String,
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Element>>,
}

impl GroupSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let (kind, params) = match &self.kind {
            GroupKind::FreeAbelian(m) => ("free-abelian", serde_json::json!(m)),
            GroupKind::Unitriangular(d) => ("unitriangular", serde_json::json!(d)),
            GroupKind::DirectProduct(p) => (
                "direct-product",
                serde_json::Value::Array(p.iter().map(|s| s.to_json()).collect()),
            ),
        };
        serde_json::to_value(SpecJson {
            kind: kind.into(),
            params,
            generators: Some(self.generators.clone()),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        if let Some(name) = v.as_str() {
            return Self::preset(name);
        }
        let raw: SpecJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Invalid(format!("group: {e}")))?;
        let size = |what: &str| -> Result<usize> {
            raw.params
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Invalid(format!("group.params: {what} expects a positive integer")))
        };
        let kind = match raw.kind.as_str() {
            "free-abelian" => GroupKind::FreeAbelian(size("free-abelian")?),
            "unitriangular" => GroupKind::Unitriangular(size("unitriangular")?),
            "direct-product" => {
                let parts = raw
                    .params
                    .as_array()
                    .ok_or_else(|| Error::Invalid("group.params: direct-product expects an array of groups".into()))?
                    .iter()
                    .map(Self::from_json)
                    .collect::<Result<Vec<_>>>()?;
                GroupKind::DirectProduct(parts)
            }
            other => return invalid(format!("group.kind: unknown kind {other:?}")),
        };
        Self::build(kind, raw.generators)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        GroupSpec::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Integer power helper used by scaling and chains.
pub(crate) fn pow(base: &BigInt, e: u32) -> BigInt {
    let mut r = BigInt::one();
    for _ in 0..e {
        r *= base;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u3() -> GroupSpec {
        GroupSpec::unitriangular(3).unwrap()
    }

    fn e(v: &[i64]) -> Element {
        Element::from_i64s(v)
    }

    #[test]
    fn u3_products() {
        let g = u3();
        assert_eq!(g.multiply(&e(&[1, 0, 0]), &e(&[0, 0, 1])), e(&[1, 1, 1]));
        assert_eq!(g.commutator(&e(&[1, 0, 0]), &e(&[0, 0, 1])), e(&[0, 1, 0]));
        assert_eq!(g.invert(&e(&[1, 0, 0])), e(&[-1, 0, 0]));
        assert_eq!(g.invert(&e(&[1, 1, 1])), e(&[-1, 0, -1]));
    }

    #[test]
    fn abelian_products() {
        let g = GroupSpec::free_abelian(2).unwrap();
        assert_eq!(g.multiply(&e(&[2, 3]), &e(&[-2, -3])), e(&[0, 0]));
        assert_eq!(g.invert(&e(&[2, 3])), e(&[-2, -3]));
    }

    #[test]
    fn u4_matches_matrix_product() {
        let g = GroupSpec::unitriangular(4).unwrap();
        let to_mat = |x: &Element| {
            let mut m = [[0i64; 4]; 4];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 1;
            }
            for (k, (i, j)) in uni_pairs(4).into_iter().enumerate() {
                m[i][j] = i64::try_from(&x.0[k]).unwrap();
            }
            m
        };
        let a = e(&[1, -2, 3, 4, 0, -1]);
        let b = e(&[2, 5, -1, 1, 3, 2]);
        let (ma, mb) = (to_mat(&a), to_mat(&b));
        let mut mc = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                mc[i][j] = (0..4).map(|m| ma[i][m] * mb[m][j]).sum();
            }
        }
        assert_eq!(to_mat(&g.multiply(&a, &b)), mc);
        assert!(g.multiply(&a, &g.invert(&a)).is_identity());
    }

    #[test]
    fn dimension_mismatch() {
        let g = u3();
        assert!(matches!(
            g.try_multiply(&e(&[1, 0]), &e(&[0, 0, 1])),
            Err(Error::Dimension { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let p = GroupSpec::direct_product(vec![u3(), GroupSpec::free_abelian(1).unwrap()]).unwrap();
        assert_eq!(p.dim(), 4);
        assert_eq!(p.generators().len(), 6);
        let back = GroupSpec::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::json!({"kind": "free-abelian", "params": 2, "generators": [[1, 0]]});
        assert!(GroupSpec::from_json(&bad).is_err());
        assert_eq!(GroupSpec::preset("z2").unwrap(), GroupSpec::free_abelian(2).unwrap());
        assert!(GroupSpec::preset("q").is_err());
    }

    #[test]
    fn generators_exclude_identity() {
        let g = GroupSpec::free_abelian(1).unwrap();
        assert!(g.with_generators(vec![e(&[0])]).is_err());
        assert!(g.with_generators(vec![e(&[1]), e(&[-1]), e(&[2]), e(&[-2])]).is_ok());
    }
}
