use crate::json::{deserialize_int, serialize_int};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Group element in coordinates: Mal'cev coordinates for unitriangular
/// factors, plain coordinates for free abelian ones, concatenated for products.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub Vec<BigInt>);

impl Element {
    pub fn zero(dim: usize) -> Self {
        Element(vec![BigInt::zero(); dim])
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        Element(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

struct IntRef<'a>(&'a BigInt);

impl Serialize for IntRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_int(self.0, s)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&IntRef(c))?;
        }
        seq.end()
    }
}

struct IntSeed;

impl<'de> serde::de::DeserializeSeed<'de> for IntSeed {
    type Value = BigInt;
    fn deserialize<D: Deserializer<'de>>(self, d: D) -> Result<BigInt, D::Error> {
        deserialize_int(d)
    }
}

struct ElementVisitor;

impl<'de> Visitor<'de> for ElementVisitor {
    type Value = Element;
    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of integers")
    }
    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Element, A::Error> {
        let mut out = Vec::new();
        while let Some(v) = seq.next_element_seed(IntSeed)? {
            out.push(v);
        }
        Ok(Element(out))
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_seq(ElementVisitor)
    }
}
