//! Experiments over row means: the limit constant `v + ln 2 / u`, the
//! heuristic series that produces it, convergence tables, monotonicity,
//! the scaling of the gap with `u` and `v`, decay of mean differences
//! between roots, and exhaustive checks of the structural identities.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::row::{self, CountVariant, RowConfig, RowValue};
use crate::tree::{self, TreeParams};

/// Parameter grid used by the default experiments; every entry has `uv > 1`.
pub const DEFAULT_GRID: [(u64, u64); 6] = [(1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (3, 2)];

/// Bits used for the limit constant: 256 bits is about 77 decimal digits.
pub const LIMIT_PRECISION: u32 = 256;

pub fn default_grid() -> Vec<TreeParams> {
    DEFAULT_GRID
        .iter()
        .map(|&(u, v)| TreeParams::new(u, v).expect("positive"))
        .collect()
}

/// Rational bounds on `ln 2` from `2·atanh(1/3) = Σ 2/((2k+1)·3^(2k+1))`.
/// The tail after the last term is below `9/8` of the next term.
fn ln2_bounds(precision: u32) -> (Rational, Rational) {
    let terms = precision as u64 / 3 + 4;
    let mut sum = Rational::zero();
    let term = |k: u64| {
        let d = BigUint::from(2 * k + 1) * BigUint::from(3u32).pow(2 * k as u32 + 1);
        Rational::from_biguints(BigUint::from(2u32), d)
    };
    for k in 0..terms {
        sum = &sum + &term(k);
    }
    let tail = &term(terms) * &Rational::new(9, 8).expect("valid");
    let upper = &sum + &tail;
    (sum, upper)
}

/// Enclosure of `ln 2`.
pub fn ln2(precision: u32) -> Result<Enclosure> {
    let (lo, hi) = ln2_bounds(precision);
    Enclosure::from_bounds(&lo, &hi, precision)
}

/// Enclosure of `v + ln 2 / u`; its lower end is rounded toward −∞ and its
/// upper end toward +∞.
pub fn limit_estimate(p: TreeParams, precision: u32) -> Result<Enclosure> {
    let (lo, hi) = ln2_bounds(precision);
    let v = Rational::integer(p.v());
    let inv_u = Rational::from_biguints(BigUint::one(), BigUint::from(p.u()));
    Enclosure::from_bounds(&(&v + &(&lo * &inv_u)), &(&v + &(&hi * &inv_u)), precision)
}

/// `(v/4)·Σ_{k=0..K} (k+1)/2^k + (1/u)·Σ_{k=1..K} 1/(k·2^k)`, exactly.
pub fn heuristic_partial_sums(p: TreeParams, terms: u32) -> Result<Rational> {
    if terms < 1 {
        return Err(Error::InvalidArgument("heuristic series needs at least one term".into()));
    }
    let mut integer_part = Rational::zero();
    let mut frac_part = Rational::zero();
    for k in 0..=terms as u64 {
        integer_part = &integer_part + &Rational::integer(k + 1).div_pow2(k);
        if k >= 1 {
            frac_part = &frac_part + &Rational::from_biguints(BigUint::one(), BigUint::from(k)).div_pow2(k);
        }
    }
    let v_quarter = Rational::new(p.v(), 4u32).expect("positive");
    let inv_u = Rational::from_biguints(BigUint::one(), BigUint::from(p.u()));
    Ok(&(&v_quarter * &integer_part) + &(&inv_u * &frac_part))
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: u32,
    pub mean: RowValue,
    /// `v + ln 2/u − A(n)`, rounded outward.
    pub gap: Enclosure,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub params: TreeParams,
    pub root: Rational,
    pub mode: row::Mode,
    pub limit: Enclosure,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Value {
        let precision = match self.mode {
            row::Mode::Exact => Value::Null,
            row::Mode::Enclosure { precision } => json!(precision),
        };
        json!({
            "u": self.params.u(),
            "v": self.params.v(),
            "root": self.root.to_string(),
            "mode": self.mode.name(),
            "precision_bits": precision,
            "limit": serde_json::to_value(&self.limit).expect("serializable"),
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "mean": r.mean.to_json(),
                "gap": serde_json::to_value(&r.gap).expect("serializable"),
            })).collect::<Vec<_>>(),
        })
    }
}

fn gap_against(limit: &Enclosure, mean: &RowValue) -> Enclosure {
    limit.sub(&mean.to_enclosure(limit.precision()))
}

/// Tabulates `A(n)` for `n = 0..=n_max` and its distance to `v + ln 2/u`.
pub fn convergence_report(
    root: &Rational,
    p: TreeParams,
    n_max: u32,
    cfg: &RowConfig,
) -> Result<ConvergenceReport> {
    let limit = limit_estimate(p, LIMIT_PRECISION)?;
    let series = row::mean_series(root, n_max, p, cfg)?;
    let rows = series
        .into_iter()
        .map(|s| ConvergenceRow {
            n: s.n,
            gap: gap_against(&limit, &s.mean),
            mean: s.mean,
        })
        .collect();
    Ok(ConvergenceReport {
        params: p,
        root: root.clone(),
        mode: cfg.mode,
        limit,
        rows,
    })
}

/// The two extreme orphans `1/u` and `v` (one root when they coincide).
pub fn extreme_roots(p: TreeParams) -> Vec<Rational> {
    let (lo, hi) = (p.low_root(), p.high_root());
    if lo == hi {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityResult {
    pub root: Rational,
    pub sums: Vec<RowValue>,
    /// First `n` with `S(n+1) > 2·S(n)` not established.
    pub first_violation: Option<u32>,
}

impl MonotonicityResult {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `S(n+1) > 2·S(n)` for `n < n_max` at the roots `1/u` and `v`.
/// Exact mode decides the inequality exactly; enclosure mode accepts a pair
/// only when the bounds certify it.
pub fn monotonicity_check(p: TreeParams, n_max: u32, cfg: &RowConfig) -> Result<Vec<MonotonicityResult>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("monotonicity needs n_max >= 1".into()));
    }
    extreme_roots(p)
        .into_iter()
        .map(|root| {
            let series = row::mean_series(&root, n_max, p, cfg)?;
            let sums: Vec<RowValue> = series.into_iter().map(|s| s.sum).collect();
            let first_violation = sums
                .windows(2)
                .position(|w| !doubling_exceeded(&w[0], &w[1]))
                .map(|i| i as u32);
            Ok(MonotonicityResult {
                root,
                sums,
                first_violation,
            })
        })
        .collect()
}

fn doubling_exceeded(prev: &RowValue, next: &RowValue) -> bool {
    match (prev, next) {
        (RowValue::Exact(a), RowValue::Exact(b)) => *b > a.mul_pow2(1),
        (a, b) => {
            let p = a.to_enclosure(64).precision();
            a.to_enclosure(p).mul_u64(2).certainly_lt(&b.to_enclosure(p))
        }
    }
}

/// Which extreme root a scaling experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootRule {
    LowRoot,
    HighRoot,
}

impl RootRule {
    pub fn root(&self, p: TreeParams) -> Rational {
        match self {
            RootRule::LowRoot => p.low_root(),
            RootRule::HighRoot => p.high_root(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GapRow {
    pub params: TreeParams,
    pub gap: Enclosure,
    /// `gap · u² · v`.
    pub normalized: Enclosure,
}

#[derive(Debug, Clone)]
pub struct GapScaling {
    pub n: u32,
    pub rows: Vec<GapRow>,
    pub all_positive: bool,
    /// Certified `gap(u+…, v) ≤ gap(u, v)` along every fixed-`v` chain.
    pub u_chains_non_increasing: bool,
    /// Certified `gap(u, v+…) ≤ gap(u, v)` along every fixed-`u` chain.
    pub v_chains_non_increasing: bool,
}

impl GapScaling {
    pub fn holds(&self) -> bool {
        self.all_positive && self.u_chains_non_increasing && self.v_chains_non_increasing
    }
}

fn chains_non_increasing(rows: &[GapRow], key: impl Fn(&TreeParams) -> (u64, u64)) -> bool {
    let mut chains: BTreeMap<u64, Vec<(u64, &Enclosure)>> = BTreeMap::new();
    for r in rows {
        let (fixed, moving) = key(&r.params);
        chains.entry(fixed).or_default().push((moving, &r.gap));
    }
    chains.values_mut().all(|chain| {
        chain.sort_by_key(|(m, _)| *m);
        chain.windows(2).all(|w| w[1].1.certainly_le(w[0].1))
    })
}

/// Gap `v + ln 2/u − A(n)` across a grid, with its `u²v`-normalized value.
pub fn mean_gap_scaling(
    grid: &[TreeParams],
    rule: RootRule,
    n: u32,
    cfg: &RowConfig,
) -> Result<GapScaling> {
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        if p.u() * p.v() <= 1 {
            return Err(Error::InvalidArgument(format!("gap scaling needs uv > 1, got {p}")));
        }
        let limit = limit_estimate(p, LIMIT_PRECISION)?;
        let stats = row::row_stats(&rule.root(p), n, p, cfg)?;
        let gap = gap_against(&limit, &stats.mean);
        let normalized = gap.mul_u64(p.u() * p.u() * p.v());
        rows.push(GapRow {
            params: p,
            gap,
            normalized,
        });
    }
    let all_positive = rows.iter().all(|r| r.gap.certainly_positive());
    let u_chains_non_increasing = chains_non_increasing(&rows, |p| (p.v(), p.u()));
    let v_chains_non_increasing = chains_non_increasing(&rows, |p| (p.u(), p.v()));
    Ok(GapScaling {
        n,
        rows,
        all_positive,
        u_chains_non_increasing,
        v_chains_non_increasing,
    })
}

#[derive(Debug, Clone)]
pub struct DecayRow {
    pub n: u32,
    /// `|A(z1; n) − A(z2; n)|`.
    pub diff: RowValue,
}

impl DecayRow {
    pub fn approx(&self) -> f64 {
        match &self.diff {
            RowValue::Exact(r) => r.to_f64(),
            RowValue::Enclosure(e) => e.midpoint_f64(),
        }
    }

    fn is_zero(&self) -> bool {
        match &self.diff {
            RowValue::Exact(r) => r.is_zero(),
            RowValue::Enclosure(e) => e.hi_mantissa().sign() != num_bigint::Sign::Plus,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecayReport {
    pub z1: Rational,
    pub z2: Rational,
    pub params: TreeParams,
    pub rows: Vec<DecayRow>,
    pub window: (u32, u32),
    /// `exp` of the least-squares slope of `ln |Δ(n)|` over the window.
    pub fitted_ratio: Option<f64>,
}

/// Least-squares geometric ratio through `(n, value)` points with positive values.
pub fn fit_geometric_ratio(points: &[(u32, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .map(|&(n, y)| (n as f64, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

/// Differences of row means between two orphan roots, with a fitted decay
/// ratio over `window` (default: the last six rows).
pub fn mean_difference_decay(
    z1: &Rational,
    z2: &Rational,
    p: TreeParams,
    n_max: u32,
    cfg: &RowConfig,
    window: Option<(u32, u32)>,
) -> Result<DecayReport> {
    for z in [z1, z2] {
        if !tree::is_orphan(z, p) {
            return Err(Error::NotOrphan(z.to_string()));
        }
    }
    let a = row::mean_series(z1, n_max, p, cfg)?;
    let b = row::mean_series(z2, n_max, p, cfg)?;
    let rows: Vec<DecayRow> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let diff = match (&x.mean, &y.mean) {
                (RowValue::Exact(m1), RowValue::Exact(m2)) => {
                    let d = if m1 >= m2 { m1.checked_sub(m2) } else { m2.checked_sub(m1) };
                    RowValue::Exact(d.expect("ordered"))
                }
                (m1, m2) => {
                    let e1 = m1.to_enclosure(64);
                    let e2 = m2.to_enclosure(e1.precision());
                    RowValue::Enclosure(e1.sub(&e2).abs())
                }
            };
            DecayRow { n: x.n, diff }
        })
        .collect();
    let window = window.unwrap_or((n_max.saturating_sub(5), n_max));
    let points: Vec<(u32, f64)> = rows
        .iter()
        .filter(|r| r.n >= window.0 && r.n <= window.1 && !r.is_zero())
        .map(|r| (r.n, r.approx()))
        .collect();
    Ok(DecayReport {
        z1: z1.clone(),
        z2: z2.clone(),
        params: p,
        rows,
        window,
        fitted_ratio: fit_geometric_ratio(&points),
    })
}

impl DecayReport {
    pub fn to_json(&self) -> Value {
        json!({
            "u": self.params.u(),
            "v": self.params.v(),
            "z1": self.z1.to_string(),
            "z2": self.z2.to_string(),
            "window": [self.window.0, self.window.1],
            "fitted_ratio": self.fitted_ratio,
            "rows": self.rows.iter().map(|r| json!({"n": r.n, "diff": r.diff.to_json()})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormRow {
    pub n: u32,
    pub computed: Rational,
    pub expected: Rational,
}

impl ClosedFormRow {
    pub fn ok(&self) -> bool {
        self.computed == self.expected
    }
}

/// Row sums of the classic tree against `S(n) = 3·2^(n−1) − 1/2`, summing
/// each row directly.
pub fn closed_form_check_11(n_max: u32, workers: usize) -> Result<Vec<ClosedFormRow>> {
    let p = TreeParams::new(1, 1).expect("valid");
    let cfg = RowConfig::exact().with_workers(workers);
    (0..=n_max)
        .map(|n| {
            let s = row::row_stats(&Rational::one(), n, p, &cfg)?;
            let computed = s.sum.as_exact().expect("exact mode").clone();
            let expected = Rational::from_biguints((BigUint::from(3u32) << n) - 1u32, BigUint::from(2u32));
            Ok(ClosedFormRow { n, computed, expected })
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct PartitionReport {
    pub checked: u64,
    pub orphans: u64,
    pub roots: BTreeSet<Rational>,
    pub failures: Vec<String>,
}

impl PartitionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Locates every reduced `a/b` with `a, b ≤ max_den` and checks that the
/// root is an orphan, that the path leads back, and that the parent chain
/// has the reported length.
pub fn partition_check(p: TreeParams, max_den: u64) -> Result<PartitionReport> {
    if max_den < 1 {
        return Err(Error::InvalidArgument("max_den must be at least 1".into()));
    }
    let mut report = PartitionReport::default();
    for a in 1..=max_den {
        for b in 1..=max_den {
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            let q = Rational::new(a, b)?;
            report.checked += 1;
            let loc = tree::locate(&q, p)?;
            let mut fail = |msg: String| report.failures.push(format!("{q}: {msg}"));
            if !tree::is_orphan(&loc.root, p) {
                fail(format!("root {} is outside [1/u, v]", loc.root));
            }
            let back = tree::vertex_at_path(&loc.root, &loc.path, p)?;
            if back != q {
                fail(format!("path {} from {} gives {back}", loc.path, loc.root));
            }
            if tree::ancestor_distance(&loc.root, &q, p) != Some(loc.depth) {
                fail(format!("parent chain does not reach {} in {} steps", loc.root, loc.depth));
            }
            let orphan = tree::is_orphan(&q, p);
            if orphan != (loc.depth == 0) {
                fail(format!("orphan={orphan} but depth={}", loc.depth));
            }
            if orphan {
                report.orphans += 1;
                if loc.root != q {
                    fail(format!("orphan located under {}", loc.root));
                }
            }
            report.roots.insert(loc.root);
        }
    }
    Ok(report)
}

/// `(n, holds)` for each row `n ≤ n_max` of the classic tree.
pub fn symmetry_check(n_max: u32) -> Vec<(u32, bool)> {
    (0..=n_max).map(|n| (n, row::symmetric_row_check(n))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthCountRow {
    pub root: Rational,
    pub n: u32,
    pub empirical: BTreeMap<i64, u64>,
    pub predicted: BTreeMap<i64, u128>,
}

impl LengthCountRow {
    pub fn matches(&self) -> bool {
        self.empirical.len() == self.predicted.len()
            && self
                .empirical
                .iter()
                .zip(&self.predicted)
                .all(|((m1, c1), (m2, c2))| m1 == m2 && *c1 as u128 == *c2)
    }
}

/// Brute-force length histograms against the predictor for every root and row.
pub fn length_count_check(
    p: TreeParams,
    roots: &[Rational],
    n_max: u32,
    variant: CountVariant,
) -> Result<Vec<LengthCountRow>> {
    let mut out = Vec::new();
    for root in roots {
        for n in 0..=n_max {
            out.push(LengthCountRow {
                root: root.clone(),
                n,
                empirical: row::cf_length_counts(root, n, p)?,
                predicted: row::predicted_cf_length_counts(root, n, p, variant)?,
            });
        }
    }
    Ok(out)
}
