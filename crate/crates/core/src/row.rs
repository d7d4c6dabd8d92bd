//! Row aggregation over the `2^n` vertices at depth `n`.
//!
//! Rows are never materialized. [`RowIter`] walks depth-first with an
//! explicit stack, and the aggregators fold independent subtrees, optionally
//! on a worker pool. Exact sums are merged pairwise so partial denominators
//! stay balanced; enclosure sums accumulate floor mantissas in fixed point
//! and round outward once at the end, so both modes give results that do
//! not depend on the number of workers.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::contfrac::{cf_length, cf_length_of_parts, ContinuedFraction};
use crate::enclosure::{Enclosure, DEFAULT_PRECISION, MIN_PRECISION};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tree::{self, left_child_parts, right_child_parts, TreeParams};

pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Enclosure { precision: u32 },
}

impl Mode {
    pub fn enclosure() -> Self {
        Mode::Enclosure {
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Enclosure { .. } => "enclosure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowConfig {
    pub mode: Mode,
    pub workers: usize,
    /// Abort exact sums once a running denominator exceeds this many decimal digits.
    pub digit_budget: u64,
}

impl Default for RowConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            workers: 1,
            digit_budget: DEFAULT_DIGIT_BUDGET,
        }
    }
}

impl RowConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn enclosure(precision: u32) -> Self {
        Self {
            mode: Mode::Enclosure { precision },
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        if let Mode::Enclosure { precision } = self.mode {
            if precision < MIN_PRECISION {
                return Err(Error::Precision(precision));
            }
        }
        Ok(())
    }

    fn budget_bits(&self) -> u64 {
        // log2(10) < 3.33
        self.digit_budget.saturating_mul(333) / 100
    }
}

/// A row aggregate: exact, or a certified enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowValue {
    Exact(Rational),
    Enclosure(Enclosure),
}

impl RowValue {
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            RowValue::Exact(r) => Some(r),
            RowValue::Enclosure(_) => None,
        }
    }

    pub fn as_enclosure(&self) -> Option<&Enclosure> {
        match self {
            RowValue::Enclosure(e) => Some(e),
            RowValue::Exact(_) => None,
        }
    }

    /// Enclosure of the value; exact values are rounded outward.
    pub fn to_enclosure(&self, precision: u32) -> Enclosure {
        match self {
            RowValue::Exact(r) => {
                Enclosure::from_rational(r, precision.max(MIN_PRECISION)).expect("valid precision")
            }
            RowValue::Enclosure(e) => e.clone(),
        }
    }

    pub fn div_pow2(&self, k: u64) -> RowValue {
        match self {
            RowValue::Exact(r) => RowValue::Exact(r.div_pow2(k)),
            RowValue::Enclosure(e) => RowValue::Enclosure(e.div_pow2(k)),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            RowValue::Exact(r) => r == x,
            RowValue::Enclosure(e) => e.contains(x),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RowValue::Exact(r) => Value::String(r.to_string()),
            RowValue::Enclosure(e) => serde_json::to_value(e).expect("serializable"),
        }
    }

    /// CSV cells: one for exact values, `lo` and `hi` for enclosures.
    pub fn csv_cells(&self) -> Vec<String> {
        match self {
            RowValue::Exact(r) => vec![r.to_string()],
            RowValue::Enclosure(e) => {
                let d = e.default_digits();
                vec![e.lo_decimal(d), e.hi_decimal(d)]
            }
        }
    }
}

pub(crate) fn big_number(x: &BigUint) -> Value {
    Value::Number(x.to_string().parse().expect("integer literal"))
}

/// Aggregates of one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowStats {
    pub n: u32,
    pub count: BigUint,
    pub sum: RowValue,
    pub mean: RowValue,
    pub int_part_sum: BigUint,
    /// `ℓ(y) − ℓ(root)` → number of row vertices.
    pub histogram: BTreeMap<i64, u64>,
}

impl RowStats {
    pub fn to_json(&self) -> Value {
        let hist: serde_json::Map<String, Value> = self
            .histogram
            .iter()
            .map(|(m, c)| (m.to_string(), json!(c)))
            .collect();
        json!({
            "n": self.n,
            "count": big_number(&self.count),
            "sum": self.sum.to_json(),
            "mean": self.mean.to_json(),
            "int_part_sum": big_number(&self.int_part_sum),
            "histogram": hist,
        })
    }
}

/// Depth-first, left-to-right walk over one row.
pub struct RowIter {
    stack: Vec<(BigUint, BigUint, u32)>,
    n: u32,
    params: TreeParams,
    reversed: bool,
}

impl Iterator for RowIter {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        while let Some((a, b, d)) = self.stack.pop() {
            if d == self.n {
                return Some(Rational::from_coprime(a, b));
            }
            let l = left_child_parts(&a, &b, self.params.u());
            let r = right_child_parts(&a, &b, self.params.v());
            let (first, second) = if self.reversed { (r, l) } else { (l, r) };
            self.stack.push((second.0, second.1, d + 1));
            self.stack.push((first.0, first.1, d + 1));
        }
        None
    }
}

/// Vertices of row `n` below `root`, left to right.
pub fn row_iter(root: &Rational, n: u32, p: TreeParams) -> Result<RowIter> {
    make_iter(root, n, p, false)
}

/// Vertices of row `n` below `root`, right to left.
pub fn row_iter_rev(root: &Rational, n: u32, p: TreeParams) -> Result<RowIter> {
    make_iter(root, n, p, true)
}

fn make_iter(root: &Rational, n: u32, p: TreeParams, reversed: bool) -> Result<RowIter> {
    if root.is_zero() {
        return Err(Error::ZeroValue("position in a Calkin-Wilf tree"));
    }
    let mut stack = Vec::with_capacity(n as usize + 2);
    stack.push((root.numer().clone(), root.denom().clone(), 0));
    Ok(RowIter {
        stack,
        n,
        params: p,
        reversed,
    })
}

/// Fixed-point sum of fractional parts with `64 * limbs_frac` fractional bits.
#[derive(Clone)]
struct FixedAcc {
    limbs: Vec<u64>,
    frac_limbs: usize,
    inexact: u64,
}

impl FixedAcc {
    fn new(precision: u32) -> Self {
        let frac_limbs = (precision as usize).div_ceil(64);
        Self {
            // headroom for 2^64 carries into the integer part
            limbs: vec![0; frac_limbs + 2],
            frac_limbs,
            inexact: 0,
        }
    }

    fn add_limbs(&mut self, digits: &[u64]) {
        let mut carry = 0u64;
        for (i, slot) in self.limbs.iter_mut().enumerate() {
            let d = digits.get(i).copied().unwrap_or(0);
            if d == 0 && carry == 0 && i >= digits.len() {
                break;
            }
            let (s1, c1) = slot.overflowing_add(d);
            let (s2, c2) = s1.overflowing_add(carry);
            *slot = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        debug_assert_eq!(carry, 0);
    }

    /// Adds `floor(r/b · 2^(64·frac_limbs))` for a proper fraction `r/b`.
    fn add_fraction(&mut self, r: &BigUint, b: &BigUint) {
        if r.is_zero() {
            return;
        }
        if let (Some(mut rem), Some(den)) = (r.to_u64(), b.to_u64()) {
            let mut digits = [0u64; 8];
            let k = self.frac_limbs;
            if k <= digits.len() {
                // long division, most significant chunk first
                for i in (0..k).rev() {
                    let wide = (rem as u128) << 64;
                    digits[i] = (wide / den as u128) as u64;
                    rem = (wide % den as u128) as u64;
                }
                if rem != 0 {
                    self.inexact += 1;
                }
                self.add_limbs(&digits[..k]);
                return;
            }
        }
        let (q, rem) = (r << (64 * self.frac_limbs)).div_rem(b);
        if !rem.is_zero() {
            self.inexact += 1;
        }
        self.add_limbs(&q.to_u64_digits());
    }

    fn merge(&mut self, other: &FixedAcc) {
        let digits = other.limbs.clone();
        self.add_limbs(&digits);
        self.inexact += other.inexact;
    }

    fn frac_sum(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.limbs.len() * 8);
        for l in &self.limbs {
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    /// Enclosure of `int_sum + fractional sum` at `precision` bits.
    fn finish(&self, int_sum: &BigUint, precision: u32) -> Enclosure {
        let internal = 64 * self.frac_limbs as u32;
        let lo_int = (int_sum << internal) + self.frac_sum();
        let hi_int = &lo_int + self.inexact;
        let drop = internal - precision;
        let lo = &lo_int >> drop;
        let hi = if drop == 0 {
            hi_int
        } else {
            let (q, r) = hi_int.div_rem(&(BigUint::one() << drop));
            if r.is_zero() {
                q
            } else {
                q + 1u32
            }
        };
        Enclosure::from_mantissas(lo.into(), hi.into(), precision)
    }
}

#[derive(Clone)]
struct Tally {
    int_small: u128,
    int_big: BigUint,
    lengths: Vec<u64>,
}

impl Tally {
    fn new() -> Self {
        Self {
            int_small: 0,
            int_big: BigUint::zero(),
            lengths: Vec::new(),
        }
    }

    /// Records a leaf and returns its fractional remainder `a mod b`.
    fn leaf(&mut self, a: &BigUint, b: &BigUint) -> BigUint {
        let rem = match (a.to_u64(), b.to_u64()) {
            (Some(x), Some(y)) => {
                self.add_int((x / y) as u128);
                BigUint::from(x % y)
            }
            _ => {
                let (q, r) = a.div_rem(b);
                self.int_big += q;
                r
            }
        };
        let l = cf_length_of_parts(a, b);
        if self.lengths.len() <= l {
            self.lengths.resize(l + 1, 0);
        }
        self.lengths[l] += 1;
        rem
    }

    fn add_int(&mut self, q: u128) {
        match self.int_small.checked_add(q) {
            Some(s) => self.int_small = s,
            None => {
                self.int_big += self.int_small;
                self.int_small = q;
            }
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.add_int(other.int_small);
        self.int_big += &other.int_big;
        if self.lengths.len() < other.lengths.len() {
            self.lengths.resize(other.lengths.len(), 0);
        }
        for (s, o) in self.lengths.iter_mut().zip(&other.lengths) {
            *s += o;
        }
    }

    fn int_sum(&self) -> BigUint {
        &self.int_big + self.int_small
    }
}

// Leaves of the quotient step a/b used as 64-bit when possible.
fn leaf_quotient(a: &BigUint, b: &BigUint) -> BigUint {
    match (a.to_u64(), b.to_u64()) {
        (Some(x), Some(y)) => BigUint::from(x / y),
        _ => a / b,
    }
}

struct Folder {
    params: TreeParams,
    budget_bits: u64,
    budget_digits: u64,
}

impl Folder {
    fn check_budget(&self, r: &Rational) -> Result<()> {
        if r.denom().bits() > self.budget_bits {
            Err(Error::DigitBudget {
                budget: self.budget_digits,
            })
        } else {
            Ok(())
        }
    }

    fn exact_row(&self, a: &BigUint, b: &BigUint, remaining: u32, tally: &mut Tally) -> Result<Rational> {
        if remaining == 0 {
            tally.leaf(a, b);
            return Ok(Rational::from_coprime(a.clone(), b.clone()));
        }
        let (ln, ld) = left_child_parts(a, b, self.params.u());
        let (rn, rd) = right_child_parts(a, b, self.params.v());
        let l = self.exact_row(&ln, &ld, remaining - 1, tally)?;
        let r = self.exact_row(&rn, &rd, remaining - 1, tally)?;
        let s = &l + &r;
        self.check_budget(&s)?;
        Ok(s)
    }

    fn fixed_row(&self, a: &BigUint, b: &BigUint, remaining: u32, tally: &mut Tally, acc: &mut FixedAcc) {
        if remaining == 0 {
            let rem = tally.leaf(a, b);
            acc.add_fraction(&rem, b);
            return;
        }
        let (ln, ld) = left_child_parts(a, b, self.params.u());
        self.fixed_row(&ln, &ld, remaining - 1, tally, acc);
        let (rn, rd) = right_child_parts(a, b, self.params.v());
        self.fixed_row(&rn, &rd, remaining - 1, tally, acc);
    }

    /// Exact sums of left-child values per depth `0..=remaining` below `a/b`.
    fn exact_left_sums(&self, a: &BigUint, b: &BigUint, remaining: u32) -> Result<Vec<Rational>> {
        let (ln, ld) = left_child_parts(a, b, self.params.u());
        let own = Rational::from_coprime(ln.clone(), ld.clone());
        if remaining == 0 {
            return Ok(vec![own]);
        }
        let (rn, rd) = right_child_parts(a, b, self.params.v());
        let l = self.exact_left_sums(&ln, &ld, remaining - 1)?;
        let r = self.exact_left_sums(&rn, &rd, remaining - 1)?;
        let mut out = Vec::with_capacity(remaining as usize + 1);
        out.push(own);
        for (x, y) in l.iter().zip(&r) {
            let s = x + y;
            self.check_budget(&s)?;
            out.push(s);
        }
        Ok(out)
    }

    /// Fixed-point sums of left-child values per depth, accumulated in `accs[depth..]`.
    fn fixed_left_sums(&self, a: &BigUint, b: &BigUint, depth: usize, accs: &mut [FixedAcc]) {
        let (ln, ld) = left_child_parts(a, b, self.params.u());
        // left child a/(ua+b) < 1, so it is its own fractional part
        accs[depth].add_fraction(&ln, &ld);
        if depth + 1 == accs.len() {
            return;
        }
        self.fixed_left_sums(&ln, &ld, depth + 1, accs);
        let (rn, rd) = right_child_parts(a, b, self.params.v());
        self.fixed_left_sums(&rn, &rd, depth + 1, accs);
    }
}

/// Split depth for `workers`: enough subtrees to keep every worker busy.
fn split_depth(n: u32, workers: usize) -> u32 {
    if workers <= 1 {
        return 0;
    }
    let target = 8 * workers as u64;
    let d = 64 - (target - 1).leading_zeros();
    d.min(n)
}

fn run_parallel<T, F>(workers: usize, items: Vec<(BigUint, BigUint)>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&BigUint, &BigUint) -> T + Sync + Send,
{
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(|(a, b)| f(a, b)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(|(a, b)| f(a, b)).collect())
}

fn frontier(root: &Rational, d: u32, p: TreeParams) -> Result<Vec<(BigUint, BigUint)>> {
    Ok(row_iter(root, d, p)?.map(Rational::into_parts).collect())
}

/// Pairwise (balanced) reduction of exact partial sums, preserving order.
fn balanced_sum(mut xs: Vec<Rational>, folder: &Folder) -> Result<Rational> {
    if xs.is_empty() {
        return Ok(Rational::zero());
    }
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.chunks(2);
        for pair in &mut it {
            let s = match pair {
                [a, b] => a + b,
                [a] => a.clone(),
                _ => unreachable!(),
            };
            folder.check_budget(&s)?;
            next.push(s);
        }
        xs = next;
    }
    Ok(xs.pop().expect("nonempty"))
}

/// Sum, mean, integer-part sum and continued-fraction length histogram of row `n`.
pub fn row_stats(root: &Rational, n: u32, p: TreeParams, cfg: &RowConfig) -> Result<RowStats> {
    cfg.validate()?;
    if root.is_zero() {
        return Err(Error::ZeroValue("position in a Calkin-Wilf tree"));
    }
    let folder = Folder {
        params: p,
        budget_bits: cfg.budget_bits(),
        budget_digits: cfg.digit_budget,
    };
    let d = split_depth(n, cfg.workers);
    let items = frontier(root, d, p)?;
    let remaining = n - d;

    let (sum, tally) = match cfg.mode {
        Mode::Exact => {
            let parts = run_parallel(cfg.workers, items, |a, b| {
                let mut t = Tally::new();
                folder.exact_row(a, b, remaining, &mut t).map(|s| (s, t))
            });
            let mut tally = Tally::new();
            let mut sums = Vec::with_capacity(parts.len());
            for part in parts {
                let (s, t) = part?;
                tally.merge(&t);
                sums.push(s);
            }
            (RowValue::Exact(balanced_sum(sums, &folder)?), tally)
        }
        Mode::Enclosure { precision } => {
            let parts = run_parallel(cfg.workers, items, |a, b| {
                let mut t = Tally::new();
                let mut acc = FixedAcc::new(precision);
                folder.fixed_row(a, b, remaining, &mut t, &mut acc);
                (t, acc)
            });
            let mut tally = Tally::new();
            let mut acc = FixedAcc::new(precision);
            for (t, a) in &parts {
                tally.merge(t);
                acc.merge(a);
            }
            let e = acc.finish(&tally.int_sum(), precision);
            (RowValue::Enclosure(e), tally)
        }
    };

    let root_len = cf_length(root)? as i64;
    let histogram = tally
        .lengths
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(l, &c)| (l as i64 - root_len, c))
        .collect();
    let mean = sum.div_pow2(n as u64);
    Ok(RowStats {
        n,
        count: BigUint::one() << n,
        sum,
        mean,
        int_part_sum: tally.int_sum(),
        histogram,
    })
}

/// One row of [`mean_series`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesRow {
    pub n: u32,
    pub sum: RowValue,
    pub mean: RowValue,
}

impl SeriesRow {
    pub fn to_json(&self) -> Value {
        json!({ "n": self.n, "sum": self.sum.to_json(), "mean": self.mean.to_json() })
    }
}

/// `S(n)` and `A(n)` for `n = 0..=n_max`, built by the recurrence
/// `S(n) = S(n−1) + 2^(n−1)·v + Σ_{y ∈ row n−1} 1/(u + 1/y)`, with the
/// left-child sums of every row gathered in one traversal.
pub fn mean_series(root: &Rational, n_max: u32, p: TreeParams, cfg: &RowConfig) -> Result<Vec<SeriesRow>> {
    cfg.validate()?;
    if root.is_zero() {
        return Err(Error::ZeroValue("position in a Calkin-Wilf tree"));
    }
    let folder = Folder {
        params: p,
        budget_bits: cfg.budget_bits(),
        budget_digits: cfg.digit_budget,
    };
    let v = BigUint::from(p.v());
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    let first = match cfg.mode {
        Mode::Exact => RowValue::Exact(root.clone()),
        Mode::Enclosure { precision } => RowValue::Enclosure(Enclosure::from_rational(root, precision)?),
    };
    rows.push(SeriesRow {
        n: 0,
        mean: first.clone(),
        sum: first,
    });
    if n_max == 0 {
        return Ok(rows);
    }
    // left sums for rows 0..n_max-1
    let levels = n_max as usize;
    let d = split_depth(n_max - 1, cfg.workers);
    let items = frontier(root, d, p)?;

    match cfg.mode {
        Mode::Exact => {
            let mut per_depth: Vec<Vec<Rational>> = vec![Vec::new(); levels];
            for depth in 0..d {
                for y in row_iter(root, depth, p)? {
                    let (a, b) = y.into_parts();
                    let (ln, ld) = left_child_parts(&a, &b, p.u());
                    per_depth[depth as usize].push(Rational::from_coprime(ln, ld));
                }
            }
            let remaining = n_max - 1 - d;
            let parts = run_parallel(cfg.workers, items, |a, b| folder.exact_left_sums(a, b, remaining));
            for part in parts {
                for (k, s) in part?.into_iter().enumerate() {
                    per_depth[d as usize + k].push(s);
                }
            }
            let mut s = root.clone();
            for (k, xs) in per_depth.into_iter().enumerate() {
                let left = balanced_sum(xs, &folder)?;
                let right = Rational::integer(&v << k);
                s = &(&s + &right) + &left;
                folder.check_budget(&s)?;
                let n = k as u32 + 1;
                rows.push(SeriesRow {
                    n,
                    mean: RowValue::Exact(s.div_pow2(n as u64)),
                    sum: RowValue::Exact(s.clone()),
                });
            }
        }
        Mode::Enclosure { precision } => {
            let mut accs = vec![FixedAcc::new(precision); levels];
            for depth in 0..d {
                for y in row_iter(root, depth, p)? {
                    let (a, b) = y.into_parts();
                    let (ln, ld) = left_child_parts(&a, &b, p.u());
                    accs[depth as usize].add_fraction(&ln, &ld);
                }
            }
            let parts = run_parallel(cfg.workers, items, |a, b| {
                let mut local = vec![FixedAcc::new(precision); levels];
                folder.fixed_left_sums(a, b, d as usize, &mut local);
                local
            });
            for local in &parts {
                for (acc, l) in accs.iter_mut().zip(local) {
                    acc.merge(l);
                }
            }
            let mut s = Enclosure::from_rational(root, precision)?;
            for (k, acc) in accs.iter().enumerate() {
                let left = acc.finish(&BigUint::zero(), precision);
                let right = Enclosure::from_rational(&Rational::integer(&v << k), precision)?;
                s = s.add(&right).add(&left);
                let n = k as u32 + 1;
                rows.push(SeriesRow {
                    n,
                    mean: RowValue::Enclosure(s.div_pow2(n as u64)),
                    sum: RowValue::Enclosure(s.clone()),
                });
            }
        }
    }
    Ok(rows)
}

/// Histogram of `ℓ(y) − ℓ(root)` over row `n`, by brute-force enumeration.
pub fn cf_length_counts(root: &Rational, n: u32, p: TreeParams) -> Result<BTreeMap<i64, u64>> {
    let base = cf_length(root)? as i64;
    let mut hist = BTreeMap::new();
    for y in row_iter(root, n, p)? {
        *hist.entry(cf_length(&y)? as i64 - base).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Which parity condition the length-count predictor uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountVariant {
    /// Odd `m` for roots other than 1.
    Literal,
    /// Even `m` for roots other than 1, which matches enumeration.
    Corrected,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Predicted `f_z(n, m)` for every `m` with a nonzero count.
pub fn predicted_cf_length_counts(
    root: &Rational,
    n: u32,
    _p: TreeParams,
    variant: CountVariant,
) -> Result<BTreeMap<i64, u128>> {
    if root.is_zero() {
        return Err(Error::ZeroValue("position in a Calkin-Wilf tree"));
    }
    let n = n as u64;
    let want_odd = variant == CountVariant::Literal;
    let one = Rational::one();
    let mut out = BTreeMap::new();
    for m in 0..=n + 2 {
        let c = if *root == one {
            binomial(n, m)
        } else if (m % 2 == 1) != want_odd {
            0
        } else if *root > one {
            binomial(n + 1, m)
        } else {
            binomial(n + 1, m + 1)
        };
        if c > 0 {
            out.insert(m as i64, c);
        }
    }
    Ok(out)
}

/// The representation `[α0·v, α1·u, …, αk·v]` of a vertex of `T(v)`: the
/// short or long form ending at an even index whose even-indexed
/// coefficients are multiples of `v` and odd-indexed ones multiples of `u`.
pub fn alpha_form(y: &Rational, p: TreeParams) -> Option<ContinuedFraction> {
    let (u, v) = (p.u(), p.v());
    ContinuedFraction::representations(y).into_iter().find(|cf| {
        cf.last_index() % 2 == 0
            && cf
                .coeffs()
                .iter()
                .enumerate()
                .all(|(i, c)| (c % if i % 2 == 0 { v } else { u }).is_zero())
    })
}

/// The row bijection `T(v; n) → T(1/u; n)`: if the last multiplier `αk` is 1,
/// drop it and add `u` to the preceding coefficient; otherwise subtract `v`
/// from the last coefficient and append `u`.
pub fn samelim_bijection(y: &Rational, n: u32, p: TreeParams) -> Result<Rational> {
    let src = p.high_root();
    let not_in_row = || Error::NotInRow {
        value: y.to_string(),
        root: src.to_string(),
        depth: n as u64,
    };
    if y.is_zero() || tree::depth_from_cf(&src, y, p).ok() != Some(n as u64) {
        return Err(not_in_row());
    }
    let form = alpha_form(y, p).ok_or_else(not_in_row)?;
    let mut c = form.into_coeffs();
    let v = BigUint::from(p.v());
    let u = BigUint::from(p.u());
    let k = c.len() - 1;
    if c[k] == v {
        if k == 0 {
            return Ok(p.low_root());
        }
        c.pop();
        c[k - 1] += &u;
    } else {
        c[k] -= &v;
        c.push(u);
    }
    Ok(ContinuedFraction::new(c)?.decode())
}

/// Whether row `n` of the classic tree satisfies `s_i = 1/s_{2^n−1−i}`.
pub fn symmetric_row_check(n: u32) -> bool {
    let p = TreeParams::new(1, 1).expect("valid");
    let one = Rational::one();
    let fwd = row_iter(&one, n, p).expect("positive root");
    let bwd = row_iter_rev(&one, n, p).expect("positive root");
    fwd.zip(bwd)
        .all(|(s, t)| s.numer() == t.denom() && s.denom() == t.numer())
}

/// Integer part of a row vertex; exposed for CSV output.
pub fn int_part(y: &Rational) -> BigUint {
    leaf_quotient(y.numer(), y.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn tp(u: u64, v: u64) -> TreeParams {
        TreeParams::new(u, v).unwrap()
    }

    fn row(root: &str, n: u32, p: TreeParams) -> Vec<String> {
        row_iter(&r(root), n, p).unwrap().map(|x| x.to_string()).collect()
    }

    #[test]
    fn row_iter_examples() {
        assert_eq!(
            row("1", 3, tp(1, 1)),
            ["1/4", "4/3", "3/5", "5/2", "2/5", "5/3", "3/4", "4/1"]
        );
        assert_eq!(row("1", 0, tp(1, 1)), ["1/1"]);
        assert_eq!(row("1/2", 1, tp(1, 1)), ["1/3", "3/2"]);
        let mut rev = row_iter_rev(&r("1"), 3, tp(1, 1)).unwrap().map(|x| x.to_string()).collect::<Vec<_>>();
        rev.reverse();
        assert_eq!(rev, row("1", 3, tp(1, 1)));
    }

    #[test]
    fn row_iter_stack_stays_small() {
        let mut it = row_iter(&r("1"), 30, tp(1, 1)).unwrap();
        it.next();
        assert!(it.stack.len() <= 31);
    }

    #[test]
    fn row_stats_examples() {
        let s = row_stats(&r("1"), 3, tp(1, 1), &RowConfig::exact()).unwrap();
        assert_eq!(s.sum, RowValue::Exact(r("23/2")));
        assert_eq!(s.mean, RowValue::Exact(r("23/16")));
        let s = row_stats(&r("1"), 2, tp(1, 1), &RowConfig::exact()).unwrap();
        assert_eq!(s.int_part_sum, BigUint::from(4u32));
        let s = row_stats(&r("1"), 0, tp(2, 3), &RowConfig::exact()).unwrap();
        assert_eq!((s.sum.clone(), s.mean.clone()), (RowValue::Exact(r("1")), RowValue::Exact(r("1"))));
        assert_eq!(s.count, BigUint::one());
    }

    #[test]
    fn row_stats_enclosure_contains_exact() {
        for workers in [1, 3] {
            let cfg = RowConfig::enclosure(64).with_workers(workers);
            let s = row_stats(&r("1"), 6, tp(1, 1), &cfg).unwrap();
            assert!(s.sum.contains(&r("191/2")));
            assert!(s.mean.contains(&r("191/128")));
        }
    }

    #[test]
    fn digit_budget_trips() {
        let cfg = RowConfig {
            digit_budget: 3,
            ..RowConfig::exact()
        };
        assert_eq!(
            row_stats(&r("1"), 10, tp(2, 3), &cfg),
            Err(Error::DigitBudget { budget: 3 })
        );
        assert!(mean_series(&r("1"), 10, tp(2, 3), &cfg).is_err());
    }

    #[test]
    fn zero_workers_rejected() {
        let cfg = RowConfig::exact().with_workers(0);
        assert!(matches!(row_stats(&r("1"), 2, tp(1, 1), &cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn mean_series_examples() {
        let rows = mean_series(&r("1"), 3, tp(1, 1), &RowConfig::exact()).unwrap();
        let sums: Vec<_> = rows.iter().map(|x| x.sum.as_exact().unwrap().to_string()).collect();
        assert_eq!(sums, ["1/1", "5/2", "11/2", "23/2"]);
        let rows = mean_series(&r("1"), 0, tp(1, 1), &RowConfig::exact()).unwrap();
        assert_eq!(rows.len(), 1);
        let rows = mean_series(&r("2"), 1, tp(1, 2), &RowConfig::exact()).unwrap();
        assert_eq!(rows[1].sum, RowValue::Exact(r("14/3")));
        assert_eq!(rows[1].mean, RowValue::Exact(r("7/3")));
    }

    #[test]
    fn cf_length_count_examples() {
        let h = cf_length_counts(&r("1"), 2, tp(1, 1)).unwrap();
        assert_eq!(h, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        let h = cf_length_counts(&r("3"), 1, tp(1, 1)).unwrap();
        assert_eq!(h, BTreeMap::from([(0, 1), (2, 1)]));
        let h = cf_length_counts(&r("2/5"), 1, tp(1, 1)).unwrap();
        assert_eq!(h, BTreeMap::from([(0, 2)]));
    }

    #[test]
    fn predicted_examples() {
        let p = tp(1, 1);
        let c = CountVariant::Corrected;
        assert_eq!(
            predicted_cf_length_counts(&r("3"), 1, p, c).unwrap(),
            BTreeMap::from([(0, 1), (2, 1)])
        );
        assert_eq!(
            predicted_cf_length_counts(&r("2/5"), 2, p, c).unwrap(),
            BTreeMap::from([(0, 3), (2, 1)])
        );
        assert_eq!(
            predicted_cf_length_counts(&r("3"), 1, p, CountVariant::Literal).unwrap(),
            BTreeMap::from([(1, 2)])
        );
    }

    #[test]
    fn bijection_examples() {
        let p = tp(1, 2);
        assert_eq!(samelim_bijection(&r("4"), 1, p).unwrap(), r("3"));
        assert_eq!(samelim_bijection(&r("2/3"), 1, p).unwrap(), r("1/2"));
        assert_eq!(samelim_bijection(&r("2"), 0, p).unwrap(), r("1"));
        assert!(matches!(samelim_bijection(&r("4"), 2, p), Err(Error::NotInRow { .. })));
        assert!(matches!(samelim_bijection(&r("1/2"), 1, p), Err(Error::NotInRow { .. })));
    }

    #[test]
    fn symmetry_examples() {
        assert!(symmetric_row_check(0));
        assert!(symmetric_row_check(2));
        assert!(symmetric_row_check(3));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }
}
