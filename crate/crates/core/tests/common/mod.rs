//! Brute-force oracles on machine integers, written without the library's
//! algorithms so integration tests have something independent to compare to.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_integer::Integer;

use cwforest::{Rational, TreeParams};

pub type Frac = (u128, u128);

pub const PARAMS_GRID: [(u64, u64); 7] = [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (3, 2)];

pub fn params(u: u64, v: u64) -> TreeParams {
    TreeParams::new(u, v).unwrap()
}

pub fn rat((a, b): Frac) -> Rational {
    Rational::new(a, b).unwrap()
}

pub fn frac(x: &Rational) -> Frac {
    (x.numer().try_into().unwrap(), x.denom().try_into().unwrap())
}

fn reduce((a, b): Frac) -> Frac {
    let g = a.gcd(&b);
    (a / g, b / g)
}

/// `x < y` by cross-multiplication.
pub fn lt((a, b): Frac, (c, d): Frac) -> bool {
    a * d < c * b
}

pub fn children((a, b): Frac, u: u64, v: u64) -> (Frac, Frac) {
    let (u, v) = (u as u128, v as u128);
    (reduce((a, u * a + b)), reduce((a + v * b, b)))
}

/// Inverse of the child rules; `None` on the closed interval `[1/u, v]`.
pub fn parent((a, b): Frac, u: u64, v: u64) -> Option<Frac> {
    let (u, v) = (u as u128, v as u128);
    if a > v * b {
        Some((a - v * b, b))
    } else if u * a < b {
        Some((a, b - u * a))
    } else {
        None
    }
}

/// Walks parents until an orphan: `(root, depth)`.
pub fn root_of(mut x: Frac, u: u64, v: u64) -> (Frac, u64) {
    let mut depth = 0;
    while let Some(p) = parent(x, u, v) {
        x = p;
        depth += 1;
    }
    (x, depth)
}

/// Number of parent steps from `y` up to `z`, if `z` is an ancestor.
pub fn distance(z: Frac, mut y: Frac, u: u64, v: u64) -> Option<u64> {
    let mut d = 0;
    loop {
        if y == z {
            return Some(d);
        }
        y = parent(y, u, v)?;
        d += 1;
    }
}

/// Row `n` under `root`, left to right, by breadth-first expansion.
pub fn row(root: Frac, n: u32, u: u64, v: u64) -> Vec<Frac> {
    let mut level = vec![root];
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|&x| {
                let (l, r) = children(x, u, v);
                [l, r]
            })
            .collect();
    }
    level
}

/// Canonical continued fraction by the Euclidean algorithm.
pub fn cf((mut a, mut b): Frac) -> Vec<u128> {
    let mut out = Vec::new();
    while b != 0 {
        out.push(a / b);
        let r = a % b;
        a = b;
        b = r;
    }
    out
}

/// Exact sum of a row as a reduced big fraction.
pub fn big_sum(xs: &[Frac]) -> (BigUint, BigUint) {
    let mut num = BigUint::from(0u32);
    let mut den = BigUint::from(1u32);
    for &(a, b) in xs {
        let b = BigUint::from(b);
        num = num * &b + BigUint::from(a) * &den;
        den *= b;
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
    }
    (num, den)
}

pub fn sum_rational(xs: &[Frac]) -> Rational {
    let (n, d) = big_sum(xs);
    Rational::from_biguints(n, d)
}

/// Histogram of `ℓ(y) − ℓ(root)` over a row.
pub fn length_histogram(root: Frac, n: u32, u: u64, v: u64) -> std::collections::BTreeMap<i64, u64> {
    let base = cf(root).len() as i64;
    let mut h = std::collections::BTreeMap::new();
    for y in row(root, n, u, v) {
        *h.entry(cf(y).len() as i64 - base).or_insert(0) += 1;
    }
    h
}
