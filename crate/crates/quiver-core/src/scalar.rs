//! Exact scalars: the rationals and the field interface used by the linear algebra.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Operations every exact scalar field provides.
///
/// Method names avoid clashing with `std::ops` so that both can be in scope.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inverse(&self) -> Self;
    fn from_q(q: &Q) -> Self;

    fn divided(&self, other: &Self) -> Self {
        self.times(&other.inverse())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q(BigRational);

impl Q {
    pub fn from_i64(n: i64) -> Q {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`; panics when `d == 0`.
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(r: BigRational) -> Q {
        Q(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }
}

impl Field for Q {
    fn zero() -> Self {
        Q(BigRational::zero())
    }
    fn one() -> Self {
        Q(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        Q(&self.0 + &other.0)
    }
    fn minus(&self, other: &Self) -> Self {
        Q(&self.0 - &other.0)
    }
    fn times(&self, other: &Self) -> Self {
        Q(&self.0 * &other.0)
    }
    fn negated(&self) -> Self {
        Q(-&self.0)
    }
    fn inverse(&self) -> Self {
        assert!(!self.0.is_zero(), "inverse of zero");
        Q(self.0.recip())
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
}

impl Default for Q {
    fn default() -> Self {
        <Q as Field>::zero()
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::from_i64(n)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational literal: `{0}`")]
pub struct ParseQError(pub String);

impl FromStr for Q {
    type Err = ParseQError;

    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let t = s.trim();
        let bad = || ParseQError(s.to_string());
        match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Q(BigRational::new(n, d)))
            }
            None => {
                let n: BigInt = t.parse().map_err(|_| bad())?;
                Ok(Q(BigRational::from_integer(n)))
            }
        }
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! q_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Q {
            type Output = Q;
            fn $m(self, o: Q) -> Q {
                Q(self.0 $op o.0)
            }
        }
        impl<'a> $tr<&'a Q> for &'a Q {
            type Output = Q;
            fn $m(self, o: &'a Q) -> Q {
                Q(&self.0 $op &o.0)
            }
        }
    };
}

q_binop!(Add, add, +);
q_binop!(Sub, sub, -);
q_binop!(Mul, mul, *);
q_binop!(Div, div, /);

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-5/3"] {
            let q: Q = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert_eq!("4/6".parse::<Q>().unwrap().to_string(), "2/3");
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn field_ops() {
        let a = Q::new(1, 3);
        let b = Q::new(1, 6);
        assert_eq!(a.plus(&b), Q::new(1, 2));
        assert_eq!(a.times(&b), Q::new(1, 18));
        assert_eq!(a.divided(&b), Q::from_i64(2));
        assert!(a.minus(&a).is_zero());
        assert_eq!(b.inverse(), Q::from_i64(6));
    }

    #[test]
    fn serde_as_string() {
        let q = Q::new(-3, 4);
        let js = serde_json::to_string(&q).unwrap();
        assert_eq!(js, "\"-3/4\"");
        let back: Q = serde_json::from_str(&js).unwrap();
        assert_eq!(back, q);
    }
}
