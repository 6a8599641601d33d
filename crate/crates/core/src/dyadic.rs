//! Dyadic rationals `k / 2^j` in `[0, 1]`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::rat::Rat;

/// A dyadic rational `num / 2^level` in `[0, 1]`, kept normalized:
/// `level == 0` or `num` is odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    level: u32,
}

impl Dyadic {
    /// `num / 2^level`, normalized. Fails when the value exceeds one.
    pub fn new(num: impl Into<BigUint>, level: u32) -> Result<Self> {
        let d = Self::normalized(num.into(), level);
        if d > Dyadic::one() {
            return Err(LabError::Invalid(format!("dyadic {d} is outside [0,1]")));
        }
        Ok(d)
    }

    /// Small-integer shorthand for `num / 2^level`; panics if out of range.
    pub fn of(num: u64, level: u32) -> Self {
        Self::new(num, level).expect("dyadic in [0,1]")
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            level: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::one(),
            level: 0,
        }
    }

    /// `1 - 2^-k`.
    pub fn one_minus_pow2(k: u32) -> Self {
        let num = (BigUint::one() << k) - BigUint::one();
        Self::normalized(num, k)
    }

    fn normalized(mut num: BigUint, mut level: u32) -> Self {
        if num.is_zero() {
            return Dyadic::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(level as u64) as u32;
        if tz > 0 {
            num >>= tz;
            level -= tz;
        }
        Dyadic { num, level }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator after rescaling to `2^level` (requires `level >= self.level()`).
    pub fn scaled(&self, level: u32) -> BigUint {
        debug_assert!(level >= self.level);
        &self.num << (level - self.level)
    }

    pub fn to_rat(&self) -> Rat {
        // normalized form is already in lowest terms
        Rat::from_reduced(BigInt::from(self.num.clone()), BigInt::one() << self.level)
    }

    /// `end - self` as an exact rational; `end >= self` is assumed.
    pub fn length_to(&self, end: &Dyadic) -> Rat {
        let level = self.level.max(end.level);
        let diff = end.scaled(level) - self.scaled(level);
        let d = Self::normalized(diff, level);
        d.to_rat()
    }

    /// Exact midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        let level = self.level.max(other.level) + 1;
        let sum = self.scaled(level - 1) + other.scaled(level - 1);
        Self::normalized(sum, level)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.level == other.level {
            return self.num.cmp(&other.num);
        }
        let level = self.level.max(other.level);
        if level <= 64 {
            if let (Some(a), Some(b)) = (self.num.to_u64(), other.num.to_u64()) {
                let a = (a as u128) << (level - self.level);
                let b = (b as u128) << (level - other.level);
                return a.cmp(&b);
            }
        }
        self.scaled(level).cmp(&other.scaled(level))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigUint::one() << self.level)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = LabError;

    /// Accepts `k`, `k/q` with `q` a power of two, or `k/2^j`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || LabError::Parse(format!("not a dyadic rational in [0,1]: {s:?}"));
        let (num, level) = match s.split_once('/') {
            None => (s, 0u32),
            Some((num, den)) => {
                let den = den.trim();
                let level = if let Some(exp) = den.strip_prefix("2^") {
                    exp.parse::<u32>().map_err(|_| bad())?
                } else {
                    let q: BigUint = den.parse().map_err(|_| bad())?;
                    if q.is_zero() || q.count_ones() != 1 {
                        return Err(bad());
                    }
                    q.trailing_zeros().unwrap_or(0) as u32
                };
                (num.trim(), level)
            }
        };
        let num: BigUint = num.parse().map_err(|_| bad())?;
        Dyadic::new(num, level).map_err(|_| bad())
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_even_numerators() {
        let d = Dyadic::of(4, 3);
        assert_eq!(d.num(), &BigUint::from(1u32));
        assert_eq!(d.level(), 1);
        assert_eq!(Dyadic::of(0, 9), Dyadic::zero());
        assert_eq!(Dyadic::of(8, 3), Dyadic::one());
    }

    #[test]
    fn rejects_values_above_one() {
        assert!(Dyadic::new(9u32, 3).is_err());
    }

    #[test]
    fn ordering_across_levels() {
        assert!(Dyadic::of(1, 1) < Dyadic::of(5, 3));
        assert!(Dyadic::of(7, 3) > Dyadic::of(3, 2));
        assert_eq!(Dyadic::of(1, 1).cmp(&Dyadic::of(2, 2)), Ordering::Equal);
        let deep = Dyadic::new((BigUint::one() << 99) - BigUint::one(), 100).unwrap();
        assert!(deep < Dyadic::of(1, 1));
        assert!(deep > Dyadic::of(1, 2));
    }

    #[test]
    fn string_forms() {
        assert_eq!(Dyadic::of(7, 3).to_string(), "7/8");
        assert_eq!(Dyadic::one().to_string(), "1");
        assert_eq!("7/8".parse::<Dyadic>().unwrap(), Dyadic::of(7, 3));
        assert_eq!("3/2^2".parse::<Dyadic>().unwrap(), Dyadic::of(3, 2));
        assert_eq!("2/4".parse::<Dyadic>().unwrap(), Dyadic::of(1, 1));
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("3/2".parse::<Dyadic>().is_err());
    }

    #[test]
    fn lengths_and_midpoints() {
        assert_eq!(Dyadic::of(1, 2).length_to(&Dyadic::of(7, 3)), Rat::frac(5, 8));
        assert_eq!(Dyadic::zero().length_to(&Dyadic::one()), Rat::one());
        assert_eq!(Dyadic::one_minus_pow2(3), Dyadic::of(7, 3));
        assert_eq!(Dyadic::zero().midpoint(&Dyadic::of(1, 1)), Dyadic::of(1, 2));
    }
}
