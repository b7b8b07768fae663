//! Integrability exponents in `(0, ∞]`.
//!
//! `p = ∞` is a first-class value: `1/∞` evaluates to exactly `0` in every
//! formula, and the serialized form uses the token `"inf"` because JSON
//! numbers cannot express infinity.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent in `(0, ∞]`, as used for the integrability indices `p`, `q`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    /// Validates `0 < value ≤ ∞` (NaN rejected).
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::invalid(
                "exponent",
                format!("must lie in (0, inf], got {value}"),
            ));
        }
        Ok(Exponent(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.0.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Conjugate exponent: `p/(p−1)` for `1 < p < ∞`, `1` for `p = ∞`,
    /// and `∞` for `0 < p ≤ 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0.is_infinite() {
            Exponent(1.0)
        } else if self.0 <= 1.0 {
            Exponent::INF
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    pub fn min(a: Exponent, b: Exponent) -> Exponent {
        if a.0 <= b.0 {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Exponent::INF);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::invalid("exponent", format!("cannot parse {t:?}")))?;
        Exponent::new(v)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

struct ExponentVisitor;

impl<'de> Visitor<'de> for ExponentVisitor {
    type Value = Exponent;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a positive number or the token \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
        Exponent::new(v).map_err(|e| E::custom(e.to_string()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
        self.visit_f64(v as f64)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
        self.visit_f64(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
        Exponent::from_str(v).map_err(|e| E::custom(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// Serde helper for `f64` fields that may be infinite (`p̃` can be), using the
/// same `"inf"` token convention as [`Exponent`].
pub mod serde_extended_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &f64,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            serializer.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            serializer.serialize_f64(*v)
        }
    }

    struct ExtVisitor;

    impl<'de> Visitor<'de> for ExtVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            write!(f, "a number or \"inf\"/\"-inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(E::custom),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<f64, D::Error> {
        deserializer.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_convention() {
        assert_eq!(Exponent::INF.conjugate().get(), 1.0);
        assert!(Exponent::new(0.5).unwrap().conjugate().is_infinite());
        assert!(Exponent::new(1.0).unwrap().conjugate().is_infinite());
        assert_eq!(Exponent::new(2.0).unwrap().conjugate().get(), 2.0);
        let p = Exponent::new(4.0).unwrap().conjugate();
        assert!((p.get() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn recip_of_infinity_is_zero() {
        assert_eq!(Exponent::INF.recip(), 0.0);
        assert_eq!(Exponent::new(4.0).unwrap().recip(), 0.25);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Exponent::new(0.0).is_err());
        assert!(Exponent::new(-1.0).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn parses_inf_token() {
        assert!(Exponent::from_str("inf").unwrap().is_infinite());
        assert!(Exponent::from_str("∞").unwrap().is_infinite());
        assert_eq!(Exponent::from_str("1.5").unwrap().get(), 1.5);
        assert!(Exponent::from_str("0").is_err());
    }
}
