//! JSON helpers for integers that may not survive a round trip through an
//! IEEE double: anything beyond 2^53 in magnitude is written as a string.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const SAFE_LIMIT: u64 = 1 << 53;

/// An integer that serializes as a JSON number when it is exactly
/// representable as a double and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JsonInt(pub BigInt);

impl From<BigUint> for JsonInt {
    fn from(v: BigUint) -> Self {
        JsonInt(BigInt::from(v))
    }
}

impl From<&BigUint> for JsonInt {
    fn from(v: &BigUint) -> Self {
        JsonInt(BigInt::from(v.clone()))
    }
}

impl From<i64> for JsonInt {
    fn from(v: i64) -> Self {
        JsonInt(BigInt::from(v))
    }
}

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if v.unsigned_abs() <= SAFE_LIMIT => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;

        impl Visitor<'_> for IntVisitor {
            type Value = JsonInt;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                BigInt::from_str(v.trim())
                    .map(JsonInt)
                    .map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }

        d.deserialize_any(IntVisitor)
    }
}

/// Serde adapter writing a `BigUint` as a decimal string, always.
pub mod biguint_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let int = JsonInt::deserialize(d)?;
        int.0
            .to_biguint()
            .ok_or_else(|| de::Error::custom("expected a nonnegative integer"))
    }
}
