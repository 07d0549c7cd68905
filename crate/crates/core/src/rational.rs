//! Exact reduced fractions used as frequencies.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fraction `p/q` with `gcd(|p|, q) = 1` and `q >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedRational {
    p: BigInt,
    q: BigInt,
}

/// Reduce `p/q` to lowest terms.
pub fn reduce_fraction(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<ReducedRational> {
    ReducedRational::new(p, q)
}

impl ReducedRational {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (mut p, mut q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        let g = p.gcd(&q);
        if !g.is_one() {
            p /= &g;
            q /= &g;
        }
        Ok(Self { p, q })
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn from_i64(p: i64, q: i64) -> Self {
        Self::new(p, q).expect("nonzero denominator")
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.to_big_rational().to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new_raw(self.p.clone(), self.q.clone())
    }

    /// Numerator and denominator as machine integers, when they fit.
    pub fn small(&self) -> Option<(i64, i64)> {
        Some((self.p.to_i64()?, self.q.to_i64()?))
    }

    /// Denominator as a period length.
    pub fn period(&self) -> Result<usize> {
        self.q
            .to_usize()
            .filter(|&q| q <= 1 << 26)
            .ok_or_else(|| Error::PeriodTooLarge(self.q.to_string()))
    }

    /// `|self - other|` as an exact rational.
    pub fn abs_diff(&self, other: &ReducedRational) -> BigRational {
        (self.to_big_rational() - other.to_big_rational()).abs()
    }
}

impl fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for ReducedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a fraction: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

impl Serialize for ReducedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_common_factor() {
        let r = reduce_fraction(2, 4).unwrap();
        assert_eq!(r.to_string(), "1/2");
    }

    #[test]
    fn zero_numerator() {
        assert_eq!(reduce_fraction(0, 7).unwrap().to_string(), "0/1");
    }

    #[test]
    fn already_coprime() {
        assert_eq!(reduce_fraction(13, 27).unwrap().to_string(), "13/27");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(reduce_fraction(3, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn negative_denominator_normalized() {
        let r = reduce_fraction(3, -6).unwrap();
        assert_eq!(r.to_string(), "-1/2");
    }

    #[test]
    fn parses_fraction_strings() {
        let r: ReducedRational = "42/86".parse().unwrap();
        assert_eq!(r.to_string(), "21/43");
        assert_eq!(r.period().unwrap(), 43);
        assert!("1/x".parse::<ReducedRational>().is_err());
    }
}
