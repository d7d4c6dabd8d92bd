//! Certified enclosures: pairs of fixed-point binary bounds.
//!
//! An [`Enclosure`] at precision `P` stores two integer mantissas `lo`, `hi`
//! denoting `lo / 2^P` and `hi / 2^P`. Conversions from rationals round `lo`
//! toward −∞ and `hi` toward +∞, so additions of enclosures at a common
//! precision are exact on the mantissas and never lose containment.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_PRECISION: u32 = 128;
pub const MIN_PRECISION: u32 = 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    precision: u32,
}

/// Floor and ceiling of `num * 2^p / den`.
pub(crate) fn mantissa_bounds(num: &BigUint, den: &BigUint, p: u32) -> (BigUint, BigUint) {
    let (q, r) = (num << p).div_rem(den);
    if r.is_zero() {
        (q.clone(), q)
    } else {
        let up = &q + 1u32;
        (q, up)
    }
}

fn check_precision(p: u32) -> Result<()> {
    if p < MIN_PRECISION {
        Err(Error::Precision(p))
    } else {
        Ok(())
    }
}

fn signed(x: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x)
}

fn pow2(k: u32) -> BigInt {
    BigInt::from(1u32) << k
}

impl Enclosure {
    pub fn from_rational(x: &Rational, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let (lo, hi) = mantissa_bounds(x.numer(), x.denom(), precision);
        Ok(Self {
            lo: signed(lo),
            hi: signed(hi),
            precision,
        })
    }

    /// Encloses the interval `[lo, hi]` given by exact rational endpoints.
    pub fn from_bounds(lo: &Rational, hi: &Rational, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "enclosure bounds out of order: {lo} > {hi}"
            )));
        }
        let (l, _) = mantissa_bounds(lo.numer(), lo.denom(), precision);
        let (_, h) = mantissa_bounds(hi.numer(), hi.denom(), precision);
        Ok(Self {
            lo: signed(l),
            hi: signed(h),
            precision,
        })
    }

    pub(crate) fn from_mantissas(lo: BigInt, hi: BigInt, precision: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, precision }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn lo_mantissa(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_mantissa(&self) -> &BigInt {
        &self.hi
    }

    /// Exact width `hi − lo` as a mantissa at this precision.
    pub fn width_mantissa(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let (n, d) = x.to_bigint_parts();
        let scaled = n << self.precision;
        &self.lo * &d <= scaled && scaled <= &self.hi * &d
    }

    /// Re-expresses at another precision: exact when widening, outward
    /// rounded when narrowing.
    pub fn with_precision(&self, precision: u32) -> Self {
        match precision.cmp(&self.precision) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = precision - self.precision;
                Self {
                    lo: &self.lo << k,
                    hi: &self.hi << k,
                    precision,
                }
            }
            Ordering::Less => {
                let d = pow2(self.precision - precision);
                Self {
                    lo: self.lo.div_floor(&d),
                    hi: self.hi.div_ceil(&d),
                    precision,
                }
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let p = self.precision.max(other.precision);
        (self.with_precision(p), other.with_precision(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            precision: a.precision,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            lo: a.lo - b.hi,
            hi: a.hi - b.lo,
            precision: a.precision,
        }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        Self {
            lo: &self.lo * k,
            hi: &self.hi * k,
            precision: self.precision,
        }
    }

    /// Divides by `2^k`, rounding outward.
    pub fn div_pow2(&self, k: u64) -> Self {
        let d = BigInt::from(1u32) << k;
        Self {
            lo: self.lo.div_floor(&d),
            hi: self.hi.div_ceil(&d),
            precision: self.precision,
        }
    }

    /// Enclosure of `|x|` for every `x` in `self`.
    pub fn abs(&self) -> Self {
        let zero = BigInt::zero();
        let (lo, hi) = if self.lo >= zero {
            (self.lo.clone(), self.hi.clone())
        } else if self.hi <= zero {
            (-&self.hi, -&self.lo)
        } else {
            (zero, (-&self.lo).max(self.hi.clone()))
        };
        Self {
            lo,
            hi,
            precision: self.precision,
        }
    }

    /// `true` when every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.hi < b.lo
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.hi <= b.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.sign() == Sign::Plus
    }

    pub fn midpoint_f64(&self) -> f64 {
        let sum: BigInt = &self.lo + &self.hi;
        let shift = sum.bits().saturating_sub(60);
        let m = (&sum >> shift).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(shift as i32 - self.precision as i32 - 1)
    }

    /// Number of fractional decimal digits that resolves one unit in the last place.
    pub fn default_digits(&self) -> u32 {
        (self.precision as u64 * 30103 / 100_000) as u32 + 2
    }

    /// Lower bound as a decimal string rounded toward −∞.
    pub fn lo_decimal(&self, digits: u32) -> String {
        dyadic_to_decimal(&self.lo, self.precision, digits, false)
    }

    /// Upper bound as a decimal string rounded toward +∞.
    pub fn hi_decimal(&self, digits: u32) -> String {
        dyadic_to_decimal(&self.hi, self.precision, digits, true)
    }
}

fn dyadic_to_decimal(m: &BigInt, p: u32, digits: u32, round_up: bool) -> String {
    let scaled = m * BigInt::from(10u32).pow(digits);
    let d = pow2(p);
    let q = if round_up {
        scaled.div_ceil(&d)
    } else {
        scaled.div_floor(&d)
    };
    let neg = q.sign() == Sign::Minus;
    let mut s = q.magnitude().to_string();
    let digits = digits as usize;
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let (int, frac) = s.split_at(s.len() - digits);
    let body = if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.default_digits();
        write!(f, "[{}, {}]", self.lo_decimal(d), self.hi_decimal(d))
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.default_digits();
        let mut st = s.serialize_struct("Enclosure", 3)?;
        st.serialize_field("lo", &self.lo_decimal(d))?;
        st.serialize_field("hi", &self.hi_decimal(d))?;
        st.serialize_field("precision_bits", &self.precision)?;
        st.end()
    }
}
