//! Exponents p, q and their Hölder conjugates.
//!
//! Infinity is a dedicated sentinel ([`Exponent::Infinity`]), never a large
//! float, so that expressions like `x.powf(1.0 / p_star)` can branch explicitly
//! instead of silently overflowing.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent in `[1, ∞]` as used for ℓ_r norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// Validates `r ≥ 1`. `f64::INFINITY` is accepted and mapped to the sentinel.
    pub fn new(r: f64) -> Result<Self> {
        if r.is_nan() {
            return Err(Error::Domain("exponent must not be NaN".into()));
        }
        if r == f64::INFINITY {
            return Ok(Exponent::Infinity);
        }
        if r < 1.0 {
            return Err(Error::Domain(format!("exponent must satisfy r >= 1, got {r}")));
        }
        Ok(Exponent::Finite(r))
    }

    pub const fn infinity() -> Self {
        Exponent::Infinity
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1/r`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(r) => 1.0 / r,
            Exponent::Infinity => 0.0,
        }
    }

    /// The value as a float; `∞` maps to `f64::INFINITY`. Only for display and
    /// comparisons — numeric formulas should branch on the sentinel instead.
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(r) => r,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate r* with 1/r + 1/r* = 1; conjugate(1) = ∞, conjugate(∞) = 1.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(1.0) => Exponent::Infinity,
            Exponent::Finite(r) => Exponent::Finite(r / (r - 1.0)),
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a.max(b)),
            _ => Exponent::Infinity,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

/// Hölder conjugate of `r ≥ 1` (∞ allowed); involutive.
pub fn conjugate_exponent(r: Exponent) -> Exponent {
    r.conjugate()
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts decimals (`1.5`), rationals (`4/3`), and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(Exponent::Infinity);
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("cannot parse exponent {s:?}")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("cannot parse exponent {s:?}")))?;
            if den == 0.0 {
                return Err(Error::Domain(format!("zero denominator in exponent {s:?}")));
            }
            return Exponent::new(num / den);
        }
        let r: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse exponent {s:?}")))?;
        Exponent::new(r)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            // JSON has no infinity literal, so the sentinel serializes as "inf".
            Exponent::Finite(r) => serializer.serialize_f64(*r),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(r) => Exponent::new(r).map_err(de::Error::custom),
            Raw::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// The exponent pair of the main theorem: p ∈ [1,2], q ∈ [2,∞], with the
/// derived conjugates p* ∈ [2,∞] and q* ∈ [1,2].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    p: Exponent,
    q: Exponent,
    p_star: Exponent,
    q_star: Exponent,
}

impl ExponentPair {
    /// Rejects pairs outside [1,2] × [2,∞]; other regimes are out of scope.
    pub fn new(p: Exponent, q: Exponent) -> Result<Self> {
        match p {
            Exponent::Finite(v) if (1.0..=2.0).contains(&v) => {}
            _ => {
                return Err(Error::Domain(format!("p must lie in [1,2], got {p}")));
            }
        }
        match q {
            Exponent::Infinity => {}
            Exponent::Finite(v) if v >= 2.0 => {}
            _ => {
                return Err(Error::Domain(format!("q must lie in [2,inf], got {q}")));
            }
        }
        Ok(ExponentPair {
            p,
            q,
            p_star: p.conjugate(),
            q_star: q.conjugate(),
        })
    }

    pub fn from_f64(p: f64, q: f64) -> Result<Self> {
        Self::new(Exponent::new(p)?, Exponent::new(q)?)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn p_star(&self) -> Exponent {
        self.p_star
    }

    pub fn q_star(&self) -> Exponent {
        self.q_star
    }

    /// p* ∨ q, the parameter entering the constant of Remark 1.1.
    pub fn pstar_max_q(&self) -> Exponent {
        self.p_star.max(self.q)
    }
}
