//! Monetary amounts that may be infinite.
//!
//! Heavy-tailed losses can have an infinite mean, and several solvers return an
//! infinite deductible as a legitimate answer, so `+∞` is a value here rather
//! than an error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative amount of money or `PlusInfinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedMoney {
    Finite(f64),
    PlusInfinity,
}

impl ExtendedMoney {
    pub const ZERO: ExtendedMoney = ExtendedMoney::Finite(0.0);

    /// Maps `f64::INFINITY` to `PlusInfinity`; finite values pass through.
    pub fn from_f64(value: f64) -> Self {
        if value == f64::INFINITY {
            ExtendedMoney::PlusInfinity
        } else {
            ExtendedMoney::Finite(value)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedMoney::Finite(v) => v,
            ExtendedMoney::PlusInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedMoney::Finite(v) => Some(v),
            ExtendedMoney::PlusInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedMoney::Finite(_))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedMoney {
    fn from(value: f64) -> Self {
        ExtendedMoney::from_f64(value)
    }
}

impl PartialOrd for ExtendedMoney {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedMoney::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), PlusInfinity) => Some(Ordering::Less),
            (PlusInfinity, Finite(_)) => Some(Ordering::Greater),
            (PlusInfinity, PlusInfinity) => Some(Ordering::Equal),
        }
    }
}

impl Add for ExtendedMoney {
    type Output = ExtendedMoney;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedMoney::Finite(a), ExtendedMoney::Finite(b)) => ExtendedMoney::from_f64(a + b),
            _ => ExtendedMoney::PlusInfinity,
        }
    }
}

impl Add<f64> for ExtendedMoney {
    type Output = ExtendedMoney;

    fn add(self, rhs: f64) -> Self {
        self + ExtendedMoney::from_f64(rhs)
    }
}

/// Scaling by a non-negative factor. `0 · ∞` is taken as `0`, the measure
/// theory convention used for zero-slope layers.
impl Mul<ExtendedMoney> for f64 {
    type Output = ExtendedMoney;

    fn mul(self, rhs: ExtendedMoney) -> ExtendedMoney {
        match rhs {
            ExtendedMoney::Finite(v) => ExtendedMoney::from_f64(self * v),
            ExtendedMoney::PlusInfinity if self == 0.0 => ExtendedMoney::ZERO,
            ExtendedMoney::PlusInfinity => ExtendedMoney::PlusInfinity,
        }
    }
}

impl fmt::Display for ExtendedMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedMoney::Finite(v) => write!(f, "{v}"),
            ExtendedMoney::PlusInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedMoney {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        float::serialize(&self.to_f64(), serializer)
    }
}

impl<'de> Deserialize<'de> for ExtendedMoney {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = float::deserialize(deserializer)?;
        if v.is_nan() || v < 0.0 {
            return Err(serde::de::Error::custom(format!(
                "money must be non-negative or \"inf\", got {v}"
            )));
        }
        Ok(ExtendedMoney::from_f64(v))
    }
}

/// Serde helpers for `f64` fields that may hold `±∞`. JSON has no infinity
/// literal, so infinities travel as the strings `"inf"` and `"-inf"`.
pub mod float {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if *value == f64::INFINITY {
            serializer.serialize_str("inf")
        } else if *value == f64::NEG_INFINITY {
            serializer.serialize_str("-inf")
        } else {
            serializer.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        struct FloatVisitor;

        impl Visitor<'_> for FloatVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                    "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                    other => Err(E::custom(format!("unrecognised number {other:?}"))),
                }
            }
        }

        deserializer.deserialize_any(FloatVisitor)
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
            value.map(Wrap).serialize(serializer)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(deserializer)?.map(|w| w.0))
        }
    }

    pub mod map {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};
        use std::collections::BTreeMap;

        #[derive(Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(
            value: &BTreeMap<String, f64>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            let wrapped: BTreeMap<&String, Wrap> = value.iter().map(|(k, v)| (k, Wrap(*v))).collect();
            wrapped.serialize(serializer)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<BTreeMap<String, f64>, D::Error> {
            let wrapped = BTreeMap::<String, Wrap>::deserialize(deserializer)?;
            Ok(wrapped.into_iter().map(|(k, w)| (k, w.0)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtendedMoney::PlusInfinity + 3.0, ExtendedMoney::PlusInfinity);
        assert_eq!(ExtendedMoney::Finite(1.0) + 2.0, ExtendedMoney::Finite(3.0));
        assert!(ExtendedMoney::PlusInfinity > ExtendedMoney::Finite(1e300));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(0.0 * ExtendedMoney::PlusInfinity, ExtendedMoney::ZERO);
        assert_eq!(0.5 * ExtendedMoney::PlusInfinity, ExtendedMoney::PlusInfinity);
    }

    #[test]
    fn json_uses_inf_string() {
        let s = serde_json::to_string(&ExtendedMoney::PlusInfinity).unwrap();
        assert_eq!(s, "\"inf\"");
        let back: ExtendedMoney = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ExtendedMoney::PlusInfinity);
        assert!(serde_json::from_str::<ExtendedMoney>("-1.0").is_err());
    }
}
