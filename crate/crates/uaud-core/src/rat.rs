//! Exact rational numbers used for every density value and weight.
//!
//! All arithmetic in this crate is integer or rational; no floating point
//! enters any group or density computation. `Rat` wraps a reduced
//! `Ratio<i64>` and serializes as `{"num": p, "den": q}` with `q > 0`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational value, always stored reduced with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(Ratio<i64>);

impl Rat {
    /// Builds `num/den`, reducing the fraction. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rat(Ratio::new(num, den))
    }

    pub fn from_integer(n: i64) -> Self {
        Rat(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rat(Ratio::zero())
    }

    pub fn one() -> Self {
        Rat(Ratio::one())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

#[derive(Serialize, Deserialize)]
struct RatWire {
    num: i64,
    den: i64,
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RatWire {
            num: self.numer(),
            den: self.denom(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RatWire::deserialize(deserializer)?;
        if wire.den == 0 {
            return Err(D::Error::custom("rational with zero denominator"));
        }
        Ok(Rat::new(wire.num, wire.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        let r = Rat::new(178, 180);
        assert_eq!((r.numer(), r.denom()), (89, 90));
        let neg = Rat::new(1, -2);
        assert_eq!((neg.numer(), neg.denom()), (-1, 2));
    }

    #[test]
    fn json_round_trip() {
        let r = Rat::new(3, 12);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":1,"den":4}"#);
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Rat>(r#"{"num":1,"den":0}"#).is_err());
    }

    #[test]
    fn floor_matches_integer_division() {
        assert_eq!(Rat::new(10, 3).floor(), 3);
        assert_eq!(Rat::new(6, 2).floor(), 3);
        assert_eq!(Rat::new(-1, 2).floor(), -1);
    }
}
