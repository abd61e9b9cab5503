use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent `p ∈ [1, ∞]`. The distinguished value ∞ is stored as
/// `f64::INFINITY`, which makes it compare greater than every finite
/// exponent for free. Validated once at construction; all arithmetic
/// assumes a valid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent(f64);

impl PExponent {
    pub const ONE: PExponent = PExponent(1.0);
    pub const TWO: PExponent = PExponent(2.0);
    pub const INFINITY: PExponent = PExponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::invalid(format!(
                "exponent p must be >= 1 or inf, got {value}"
            )));
        }
        Ok(PExponent(value))
    }

    /// The raw value; `f64::INFINITY` for the distinguished case.
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinity(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p` with the convention `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.is_infinity() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The coefficient `2^{-1/p}` (1 when p = ∞).
    pub fn half_pow(self) -> f64 {
        0.5f64.powf(self.recip())
    }
}

impl Eq for PExponent {}

impl PartialOrd for PExponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PExponent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Never NaN, so total_cmp agrees with the numeric order.
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            return Ok(PExponent::INFINITY);
        }
        let value: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("exponent p not a number: {s:?}")))?;
        PExponent::new(value)
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinity() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(v) => PExponent::new(v).map_err(de::Error::custom),
            Repr::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// A finite value `>= 0`. The operand type of the p-arithmetic layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct NonNegReal(f64);

impl NonNegReal {
    pub const ZERO: NonNegReal = NonNegReal(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid(format!(
                "expected a finite non-negative value, got {value}"
            )));
        }
        // Normalize -0.0 so bitwise comparisons (Λ_∞) behave.
        Ok(NonNegReal(value + 0.0))
    }

    pub(crate) fn raw(value: f64) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0, "bad NonNegReal {value}");
        NonNegReal(value)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for NonNegReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
