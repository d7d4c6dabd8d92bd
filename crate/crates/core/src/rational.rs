//! Exact nonnegative rationals over arbitrary-precision integers.
//!
//! A [`Rational`] is always stored in lowest terms with a positive
//! denominator, so structural equality is value equality and zero is `0/1`.
//! Negative values are rejected at construction; subtraction that would go
//! below zero is an error.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigUint,
    den: BigUint,
}

/// The four arithmetic operations accepted by [`Rational::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Rational {
    /// Builds `n/d` from signed integers, normalizing signs and reducing.
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let (n, d) = (n.into(), d.into());
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !n.is_zero() && n.sign() != d.sign() {
            return Err(Error::Negative(format!("{n}/{d}")));
        }
        Ok(Self::from_biguints(n.magnitude().clone(), d.magnitude().clone()))
    }

    /// Reduces `num/den`. Panics if `den` is zero.
    pub fn from_biguints(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Self { num, den }
        } else {
            Self {
                num: num / &g,
                den: den / &g,
            }
        }
    }

    /// Wraps a pair already known to be coprime, skipping the gcd.
    pub(crate) fn from_coprime(num: BigUint, den: BigUint) -> Self {
        debug_assert!(!den.is_zero());
        debug_assert!(num.gcd(&den).is_one() || num.is_zero() && den.is_one());
        Self { num, den }
    }

    pub fn integer(n: impl Into<BigUint>) -> Self {
        Self {
            num: n.into(),
            den: BigUint::one(),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0u32)
    }

    pub fn one() -> Self {
        Self::integer(1u32)
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn into_parts(self) -> (BigUint, BigUint) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn arith(&self, rhs: &Rational, op: ArithOp) -> Result<Rational> {
        match op {
            ArithOp::Add => Ok(self + rhs),
            ArithOp::Sub => self.checked_sub(rhs),
            ArithOp::Mul => Ok(self * rhs),
            ArithOp::Div => self.checked_div(rhs),
        }
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational> {
        let lhs = &self.num * &rhs.den;
        let r = &rhs.num * &self.den;
        if lhs < r {
            return Err(Error::Negative(format!("{self} - {rhs}")));
        }
        Ok(Self::from_biguints(lhs - r, &self.den * &rhs.den))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_biguints(
            &self.num * &rhs.den,
            &self.den * &rhs.num,
        ))
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    /// Splits into integer part and fractional part in `[0, 1)`.
    pub fn split(&self) -> (BigUint, Rational) {
        let (q, r) = self.num.div_rem(&self.den);
        // gcd(r, den) = gcd(num, den) = 1
        let frac = if r.is_zero() {
            Self::zero()
        } else {
            Self::from_coprime(r, self.den.clone())
        };
        (q, frac)
    }

    pub fn floor(&self) -> BigUint {
        &self.num / &self.den
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: u64) -> Rational {
        Self::from_biguints(&self.num << k, self.den.clone())
    }

    /// Divides by `2^k` exactly.
    pub fn div_pow2(&self, k: u64) -> Rational {
        Self::from_biguints(self.num.clone(), &self.den << k)
    }

    /// Nearest-ish `f64`, for reporting only.
    pub fn to_f64(&self) -> f64 {
        let shift = self.num.bits().max(self.den.bits()).saturating_sub(60);
        let n = (&self.num >> shift).to_f64().unwrap_or(f64::INFINITY);
        let d = (&self.den >> shift).to_f64().unwrap_or(f64::INFINITY);
        if d == 0.0 {
            // den shifted to nothing: value is huge
            return f64::INFINITY;
        }
        n / d
    }

    pub fn to_bigint_parts(&self) -> (BigInt, BigInt) {
        (
            BigInt::from_biguint(Sign::Plus, self.num.clone()),
            BigInt::from_biguint(Sign::Plus, self.den.clone()),
        )
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> std::ops::Add<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn add(self, rhs: &'a Rational) -> Rational {
        if self.den == rhs.den {
            return Rational::from_biguints(&self.num + &rhs.num, self.den.clone());
        }
        Rational::from_biguints(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;

    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl<'a> std::ops::Mul<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn mul(self, rhs: &'a Rational) -> Rational {
        Rational::from_biguints(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;

    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| &acc + &x)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Self::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `"a/b"` or a bare integer `"a"`, surrounding whitespace allowed.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        Rational::new(n, d)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
