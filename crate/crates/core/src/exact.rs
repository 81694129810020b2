//! Exact rational arithmetic and the elementary factorial-type quantities
//! every formula in the crate is built from.
//!
//! Nothing in here rounds. [`ExactRational`] is a thin newtype over
//! [`num_rational::BigRational`], which already keeps values reduced with a
//! positive denominator; the newtype pins the text format (`num/den`) and
//! the serde representation.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number, always reduced, denominator ≥ 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero("rational with zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero".into()));
        }
        Ok(Self(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, Error> {
        if other.is_zero() {
            return Err(Error::DivisionByZero(format!("{self} / 0")));
        }
        Ok(Self(&self.0 / &other.0))
    }

    /// Integer power; negative exponents invert (zero base then errors).
    pub fn pow(&self, exp: i32) -> Result<Self, Error> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero("zero to a negative power".into()));
        }
        Ok(Self(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigRational> for ExactRational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl fmt::Display for ExactRational {
    /// Always `num/den`, including `n/1` for integers, so the text form is
    /// unambiguous in tables and JSON.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `a`, `a/b` (optionally signed, surrounding whitespace ignored).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        match s.split_once('/') {
            None => Ok(Self::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Self::new(n, d)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(Self::from(v)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'b ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_trait for ExactRational {
            fn $assign(&mut self, rhs: ExactRational) {
                self.0.$assign(rhs.0);
            }
        }
        impl<'a> $assign_trait<&'a ExactRational> for ExactRational {
            fn $assign(&mut self, rhs: &'a ExactRational) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

/// Panics on a zero divisor, like integer division; use
/// [`ExactRational::checked_div`] where zero is possible.
impl Div for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 / rhs.0)
    }
}

impl<'b> Div<&'b ExactRational> for &ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'b ExactRational) -> ExactRational {
        ExactRational(&self.0 / &rhs.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ExactRational> for ExactRational {
    fn sum<I: Iterator<Item = &'a ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl Product for ExactRational {
    fn product<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::one(), |acc, x| acc * x)
    }
}

/// `n!` for `n ≥ 0`.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `1/x!`, with the convention `1/x! = 0` for negative integers `x`
/// (the reciprocal Gamma function vanishes at non-positive integers).
pub fn inv_factorial(x: i64) -> ExactRational {
    if x < 0 {
        ExactRational::zero()
    } else {
        ExactRational::from_integer(factorial(x as u64))
            .recip()
            .expect("factorial is positive")
    }
}

/// Falling factorial `(l)_p = l (l-1) ... (l-p+1)`, `(l)_0 = 1`.
pub fn falling(l: i64, p: u64) -> BigInt {
    (0..p).fold(BigInt::one(), |acc, t| acc * (BigInt::from(l) - t))
}

/// Falling factorial with a rational top argument.
pub fn falling_rational(alpha: &ExactRational, p: u64) -> ExactRational {
    (0..p)
        .map(|t| alpha - &ExactRational::from(t as i64))
        .product()
}

/// Multinomial `binom(alpha; k_1..k_l) = (alpha)_{Σk} / Π k_i!`.
///
/// Any negative `k_i` gives 0. A non-negative integer `alpha` with
/// `Σk > alpha` gives 0 because the falling factorial passes through 0.
pub fn multinomial(alpha: &ExactRational, ks: &[i64]) -> ExactRational {
    if ks.iter().any(|&k| k < 0) {
        return ExactRational::zero();
    }
    let total: i64 = ks.iter().sum();
    let numer = falling_rational(alpha, total as u64);
    if numer.is_zero() {
        return numer;
    }
    let denom: BigInt = ks.iter().map(|&k| factorial(k as u64)).product();
    numer * ExactRational::from_integer(denom).recip().expect("positive")
}

/// Multinomial with an integer top argument.
pub fn multinomial_int(top: i64, ks: &[i64]) -> ExactRational {
    multinomial(&ExactRational::from(top), ks)
}

/// Ordinary binomial `C(top, k)` with integer top (possibly negative) and
/// the same vanishing rules as [`multinomial`].
pub fn binomial(top: i64, k: i64) -> ExactRational {
    multinomial_int(top, &[k])
}

/// `(2k-1)!! = (2k-1)(2k-3)...1`, with `(-1)!! = 1` at `k = 0`.
pub fn odd_double_factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, t| acc * (2 * t - 1))
}

/// Exact `2^e` for any integer exponent.
pub fn pow2(e: i64) -> ExactRational {
    ExactRational::from(2)
        .pow(e as i32)
        .expect("base is non-zero")
}
