//! Norm exponents in `[1, ∞]` with exact rational arithmetic.
//!
//! An exponent is stored through its reciprocal `1/p ∈ [0, 1]`, so `∞` is the
//! ordinary point `0` and duality is `1/p' = 1 - 1/p`. Interpolation between
//! exponent pairs is linear in the reciprocals and therefore also exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A norm exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Exponent {
    recip: Rational64,
}

impl Exponent {
    pub const ONE: Exponent = Exponent { recip: Rational64::new_raw(1, 1) };
    pub const TWO: Exponent = Exponent { recip: Rational64::new_raw(1, 2) };
    pub const INFINITY: Exponent = Exponent { recip: Rational64::new_raw(0, 1) };

    /// The exponent `num/den`.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 || num == 0 {
            return Err(Error::InvalidExponent(format!("{num}/{den}")));
        }
        Self::from_recip(Rational64::new(den, num))
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::new(n, 1)
    }

    /// Builds the exponent whose reciprocal is `recip`; requires `0 <= recip <= 1`.
    pub fn from_recip(recip: Rational64) -> Result<Self> {
        if recip < Rational64::zero() || recip > Rational64::one() {
            return Err(Error::ExponentRange(format!(
                "reciprocal {recip} is outside [0, 1]"
            )));
        }
        Ok(Exponent { recip })
    }

    /// `1/p` exactly (`0` for `p = ∞`).
    pub fn recip(&self) -> Rational64 {
        self.recip
    }

    pub fn recip_f64(&self) -> f64 {
        ratio_to_f64(self.recip)
    }

    /// `p` as a float, `f64::INFINITY` for `∞`.
    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            ratio_to_f64(self.recip.recip())
        }
    }

    /// `p` as an exact rational, `None` for `∞`.
    pub fn value(&self) -> Option<Rational64> {
        (!self.is_infinite()).then(|| self.recip.recip())
    }

    pub fn is_infinite(&self) -> bool {
        self.recip.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.recip.is_one()
    }

    /// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn dual(&self) -> Exponent {
        Exponent { recip: Rational64::one() - self.recip }
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        if self >= other {
            self
        } else {
            other
        }
    }
}

/// The conjugate exponent; `dual_exponent(dual_exponent(e)) == e` exactly.
pub fn dual_exponent(e: Exponent) -> Exponent {
    e.dual()
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("i64 ratio always converts to f64")
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    // larger exponent <=> smaller reciprocal
    fn cmp(&self, other: &Self) -> Ordering {
        other.recip.cmp(&self.recip)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("inf"),
            Some(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Some(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`/`∞`, integers and fractions `a/b`. Decimal input is rejected
    /// so that exponent arithmetic stays exact.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidExponent(s.to_string());
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Exponent::INFINITY);
        }
        let parse_int = |part: &str| -> Result<i64> {
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            part.parse::<i64>().map_err(|_| bad())
        };
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (parse_int(a)?, parse_int(b)?),
            None => (parse_int(t)?, 1),
        };
        if num == 0 || den == 0 {
            return Err(bad());
        }
        Exponent::new(num, den).map_err(|_| {
            Error::ExponentRange(format!("{s} is not in [1, inf]"))
        })
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
