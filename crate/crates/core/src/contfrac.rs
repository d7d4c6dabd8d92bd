//! Finite simple continued fractions `[q0, q1, …, qr]`.
//!
//! Every positive rational has exactly two representations: the short
//! (canonical) one, whose last coefficient is at least 2 when `r ≥ 1`, and the
//! long one obtained by splitting the last coefficient `qr` into `qr − 1, 1`.
//! Zero is `[0]` and has no long form. One is `[1]` (short) or `[0, 1]` (long).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    coeffs: Vec<BigUint>,
}

impl ContinuedFraction {
    /// Validates a coefficient sequence: nonempty, and every coefficient
    /// after the first is at least 1. A trailing 1 is accepted.
    pub fn new(coeffs: Vec<BigUint>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::MalformedCf("empty coefficient sequence".into()));
        }
        if let Some(i) = coeffs.iter().skip(1).position(Zero::is_zero) {
            return Err(Error::MalformedCf(format!("coefficient {} is zero", i + 1)));
        }
        Ok(Self { coeffs })
    }

    pub fn from_u64s(coeffs: &[u64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<BigUint>) -> Self {
        debug_assert!(Self::new(coeffs.clone()).is_ok());
        Self { coeffs }
    }

    /// Canonical (short) expansion via the Euclidean algorithm.
    pub fn encode(x: &Rational) -> Self {
        let mut a = x.numer().clone();
        let mut b = x.denom().clone();
        let mut coeffs = Vec::new();
        while !b.is_zero() {
            let (q, r) = a.div_rem(&b);
            coeffs.push(q);
            a = b;
            b = r;
        }
        Self { coeffs }
    }

    pub fn decode(&self) -> Rational {
        let mut it = self.coeffs.iter().rev();
        let mut num = it.next().expect("nonempty").clone();
        let mut den = BigUint::one();
        for q in it {
            // q + den/num
            let n = q * &num + &den;
            den = num;
            num = n;
        }
        // consecutive continuants are coprime
        Rational::from_coprime(num, den)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigUint> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the last coefficient.
    pub fn last_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_canonical(&self) -> bool {
        self.coeffs.len() == 1 || self.coeffs.last().is_some_and(|q| *q >= BigUint::from(2u32))
    }

    /// `[.., qr]` → `[.., qr − 1, 1]`. Accepts only canonical input.
    pub fn long_form(&self) -> Result<Self> {
        if !self.is_canonical() {
            return Err(Error::MalformedCf(format!("{self} is already in long form")));
        }
        if self.is_zero() {
            return Err(Error::ZeroValue("long continued fraction form"));
        }
        let mut coeffs = self.coeffs.clone();
        let last = coeffs.last_mut().expect("nonempty");
        *last -= 1u32;
        coeffs.push(BigUint::one());
        Ok(Self { coeffs })
    }

    /// `[.., qr−1, 1]` → `[.., qr−1 + 1]`. Accepts only long-form input.
    pub fn short_form(&self) -> Result<Self> {
        if self.coeffs.len() < 2 || !self.coeffs.last().is_some_and(One::is_one) {
            return Err(Error::MalformedCf(format!(
                "{self} does not end in 1 with length at least 2"
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.pop();
        *coeffs.last_mut().expect("length >= 2") += 1u32;
        Ok(Self { coeffs })
    }

    /// Canonical form of the same value, whichever representation `self` is.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            self.clone()
        } else {
            self.short_form().expect("non-canonical means trailing 1")
        }
    }

    /// Both representations of the value: short first, then long (if any).
    pub fn representations(x: &Rational) -> Vec<Self> {
        let short = Self::encode(x);
        match short.long_form() {
            Ok(long) => vec![short, long],
            Err(_) => vec![short],
        }
    }

    /// Compares values coefficient-wise. Inputs are brought to short form
    /// first; then the first differing index `k` decides (a smaller
    /// coefficient means a smaller value iff `k` is even), and when one
    /// sequence is a proper prefix of the other the prefix is smaller iff its
    /// last index is even.
    pub fn compare(&self, other: &Self) -> Ordering {
        let a = self.canonical();
        let b = other.canonical();
        for (k, (p, q)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
            match p.cmp(q) {
                Ordering::Equal => continue,
                ord if k % 2 == 0 => return ord,
                ord => return ord.reverse(),
            }
        }
        let (s, r) = (a.last_index(), b.last_index());
        match s.cmp(&r) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Less if s % 2 == 0 => Ordering::Less,
            Ordering::Less => Ordering::Greater,
            Ordering::Greater if r % 2 == 0 => Ordering::Greater,
            Ordering::Greater => Ordering::Less,
        }
    }

    /// Length of the longest common coefficient prefix, minus one. `None`
    /// when the sequences already differ at index 0.
    pub fn common_prefix_last_index(&self, other: &Self) -> Option<usize> {
        let n = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .take_while(|(p, q)| p == q)
            .count();
        n.checked_sub(1)
    }

    /// `∏_{j=1..k} 1/p_j²` over the shared prefix `p_0..p_k`; dominates
    /// `|self − other|`. Both inputs may be in either representation.
    pub fn prefix_bound(&self, other: &Self) -> Result<Rational> {
        if self.decode() == other.decode() {
            return Err(Error::EqualValues);
        }
        let k = self
            .common_prefix_last_index(other)
            .ok_or(Error::DifferentIntegerParts)?;
        let den = self.coeffs[1..=k]
            .iter()
            .fold(BigUint::one(), |acc, p| acc * p * p);
        Ok(Rational::from_coprime(BigUint::one(), den))
    }

    /// Renders as a JSON array of integers, e.g. `[0,1,1,2]`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|q| {
                    let n: serde_json::Number = q.to_string().parse().expect("integer literal");
                    serde_json::Value::Number(n)
                })
                .collect(),
        )
    }
}

/// `ℓ(x)`: last index of the canonical expansion.
pub fn cf_length(x: &Rational) -> Result<usize> {
    if x.is_zero() {
        return Err(Error::ZeroValue("continued fraction length"));
    }
    Ok(cf_length_of_parts(x.numer(), x.denom()))
}

pub(crate) fn cf_length_of_parts(num: &BigUint, den: &BigUint) -> usize {
    use num_traits::ToPrimitive;
    if let (Some(mut a), Some(mut b)) = (num.to_u64(), den.to_u64()) {
        let mut n = 0;
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
            n += 1;
        }
        return n - 1;
    }
    let mut a = num.clone();
    let mut b = den.clone();
    let mut n = 0;
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
        n += 1;
    }
    n - 1
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, q) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"[0,1,1,2]"`; whitespace around tokens is ignored.
impl FromStr for ContinuedFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedCf(format!("cannot parse {s:?}"));
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        if body.trim().is_empty() {
            return Err(Error::MalformedCf("empty coefficient sequence".into()));
        }
        let coeffs = body
            .split(',')
            .map(|t| t.trim().parse::<BigUint>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}
