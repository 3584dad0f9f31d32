//! JSON forms shared by all file formats: integers are JSON numbers when they
//! fit in 64 bits and decimal strings otherwise; rationals are `{num, den}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub fn int_to_value(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

pub fn serialize_int<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;
    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }
    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }
    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }
    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        BigInt::from_str(v).map_err(|_| E::custom(format!("not an integer: {v:?}")))
    }
}

pub fn deserialize_int<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    d.deserialize_any(IntVisitor)
}

/// Serde wrapper for a single big integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_int(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize_int(d).map(Int)
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

pub fn unints(v: Vec<Int>) -> Vec<BigInt> {
    v.into_iter().map(|i| i.0).collect()
}

/// Exact rational in certificate form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub num: Int,
    pub den: Int,
}

impl From<&BigRational> for Frac {
    fn from(q: &BigRational) -> Self {
        Frac {
            num: Int(q.numer().clone()),
            den: Int(q.denom().clone()),
        }
    }
}

impl Frac {
    pub fn to_rational(&self) -> Result<BigRational, String> {
        if self.den.0 == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(self.num.0.clone(), self.den.0.clone()))
    }
}

pub fn frac_value(q: &BigRational) -> serde_json::Value {
    serde_json::to_value(Frac::from(q)).expect("serializable")
}

pub fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    Frac::from(q).serialize(s)
}
