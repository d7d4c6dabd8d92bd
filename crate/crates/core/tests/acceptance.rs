//! Acceptance suite: thirteen criteria, one PASS/FAIL line each.
//!
//! Runs under `cargo test` with a custom harness so the verdict lines are
//! always printed. Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{frac, params, rat, Frac, PARAMS_GRID};
use cwforest::analysis::{self, RootRule, LIMIT_PRECISION};
use cwforest::contfrac::ContinuedFraction;
use cwforest::enclosure::Enclosure;
use cwforest::row::{self, CountVariant, RowConfig};
use cwforest::{cli, tree, Rational, TreeParams};

const TIME_LIMIT: Duration = Duration::from_secs(60);
const CLOSED_FORM_MAX_N: u32 = 16;
const SYMMETRY_MAX_N: u32 = 14;
const PARTITION_MAX: u64 = 40;
const DESCENDANT_MAX_DEPTH: u32 = 10;
const LENGTH_COUNT_MAX_N: u32 = 12;
const MONOTONICITY_MAX_N: u32 = 14;
const INT_PART_ROOTS: usize = 10;
const INT_PART_MAX_N: u32 = 12;
const BOUND_MAX_N: u32 = 20;
const GAP_SCALING_N: u32 = 18;
const BIJECTION_MAX_N: u32 = 12;
const DECAY_WINDOW: (u32, u32) = (8, 14);
const DECAY_RATIO_MAX: f64 = 0.8;
const CF_EXHAUSTIVE_MAX: u128 = 30;
const PREFIX_PAIRS: usize = 10_000;
const HEURISTIC_TERMS: u32 = 60;
/// `|heuristic − limit| < 10^-HEURISTIC_TOL_DIGITS`.
const HEURISTIC_TOL_DIGITS: u32 = 12;
const ENCLOSURE_PRECISION: u32 = 128;
const SOUNDNESS_MAX_N: u32 = 14;
const PERF_DEPTH: u32 = 22;
const PERF_WORKERS: usize = 4;
const WORKER_COUNTS: [usize; 3] = [1, 2, 8];
const SEED: u64 = 0x5eed_cafe;

const CLASSIC_ROW_3: [&str; 8] = ["1/4", "4/3", "3/5", "5/2", "2/5", "5/3", "3/4", "4/1"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    };
}

fn grid_with_classic() -> Vec<TreeParams> {
    PARAMS_GRID.iter().map(|&(u, v)| params(u, v)).collect()
}

fn default_grid() -> Vec<TreeParams> {
    analysis::default_grid()
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn pow10_inverse(k: u32) -> Rational {
    Rational::from_biguints(BigUint::from(1u32), BigUint::from(10u32).pow(k))
}

fn closed_form() -> Outcome {
    let start = Instant::now();
    let rows = analysis::closed_form_check_11(CLOSED_FORM_MAX_N, workers()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for r in &rows {
        let expected = Rational::from_biguints((BigUint::from(3u32) << r.n) - 1u32, BigUint::from(2u32));
        ensure!(r.expected == expected, "n={}: expected value {} is not 3*2^(n-1) - 1/2", r.n, r.expected);
        ensure!(r.ok(), "n={}: S = {} but closed form gives {}", r.n, r.computed, r.expected);
        if r.n <= 10 {
            let oracle = common::sum_rational(&common::row((1, 1), r.n, 1, 1));
            ensure!(oracle == r.computed, "n={}: oracle sum {oracle} differs", r.n);
        }
    }
    ensure!(rows.len() == CLOSED_FORM_MAX_N as usize + 1, "missing rows");
    ensure!(elapsed < TIME_LIMIT, "took {elapsed:?}");
    Ok(format!("S(0..={CLOSED_FORM_MAX_N}) exact, S(16) = {}, {elapsed:.2?}", rows[16].computed))
}

fn classic_row() -> Outcome {
    let p = params(1, 1);
    let got: Vec<String> = row::row_iter(&Rational::one(), 3, p)
        .map_err(|e| e.to_string())?
        .map(|x| x.to_string())
        .collect();
    let want: Vec<String> = CLASSIC_ROW_3
        .iter()
        .map(|s| s.parse::<Rational>().unwrap().to_string())
        .collect();
    ensure!(got == want, "row 3 is {got:?}");
    Ok(format!("row 3 = {}", CLASSIC_ROW_3.join(", ")))
}

fn symmetry() -> Outcome {
    for (n, ok) in analysis::symmetry_check(SYMMETRY_MAX_N) {
        ensure!(ok, "row {n} is not symmetric");
    }
    for n in 0..=12 {
        let xs = common::row((1, 1), n, 1, 1);
        let len = xs.len();
        for (i, &(a, b)) in xs.iter().enumerate() {
            ensure!(xs[len - 1 - i] == (b, a), "oracle row {n} asymmetric at {i}");
        }
    }
    Ok(format!("s_i = 1/s_(2^n-1-i) for all rows n <= {SYMMETRY_MAX_N}"))
}

fn partition() -> Outcome {
    let mut checked = 0u64;
    for (u, v) in [(1, 1), (1, 2), (2, 1), (2, 3)] {
        let p = params(u, v);
        let rep = analysis::partition_check(p, PARTITION_MAX).map_err(|e| e.to_string())?;
        let mut local = 0u64;
        ensure!(rep.holds(), "{p}: {} failures, first {}", rep.failures.len(), rep.failures[0]);
        for a in 1..=PARTITION_MAX as u128 {
            for b in 1..=PARTITION_MAX as u128 {
                if num_integer::gcd(a, b) != 1 {
                    continue;
                }
                let (root, depth) = common::root_of((a, b), u, v);
                let loc = tree::locate(&rat((a, b)), p).map_err(|e| e.to_string())?;
                ensure!(frac(&loc.root) == root && loc.depth == depth, "{p}: {a}/{b} located at {} depth {}", loc.root, loc.depth);
                ensure!(!common::lt(root, (1, u as u128)) && !common::lt((v as u128, 1), root), "{p}: oracle root outside [1/u, v]");
                local += 1;
            }
        }
        ensure!(rep.checked == local, "{p}: library checked {} values, oracle {local}", rep.checked);
        checked += local;
    }
    Ok(format!("{checked} (params, a/b) pairs round-trip, roots in [1/u, v], 0 failures"))
}

fn roots_one_and_extremes(p: TreeParams) -> Vec<Frac> {
    let mut roots = vec![frac(&p.low_root()), (1, 1), frac(&p.high_root())];
    roots.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    roots.dedup();
    roots
}

fn descendants() -> Outcome {
    let mut checks = 0u64;
    for p in grid_with_classic() {
        let (u, v) = (p.u(), p.v());
        let roots = roots_one_and_extremes(p);
        for &root in &roots {
            let levels: Vec<Vec<Frac>> = (0..=DESCENDANT_MAX_DEPTH).map(|d| common::row(root, d, u, v)).collect();
            let mut candidates: Vec<Frac> = levels[..=3].iter().flatten().copied().collect();
            candidates.extend(roots.iter().filter(|&&r| r != root));
            for (d, level) in levels.iter().enumerate() {
                for &y in level {
                    let (zr, yr) = (rat(root), rat(y));
                    ensure!(tree::is_descendant(&zr, &yr, p), "{p}: {} not below root {}", yr, zr);
                    let got = tree::depth_from_cf(&zr, &yr, p).map_err(|e| e.to_string())?;
                    ensure!(got == d as u64, "{p}: depth of {yr} under {zr} is {got}, oracle {d}");
                    for &z in &candidates {
                        let oracle = common::distance(z, y, u, v);
                        let zq = rat(z);
                        ensure!(tree::is_descendant(&zq, &yr, p) == oracle.is_some(), "{p}: is_descendant({zq}, {yr}) disagrees with oracle {oracle:?}");
                        ensure!(tree::depth_from_cf(&zq, &yr, p).ok() == oracle, "{p}: depth_from_cf({zq}, {yr}) disagrees with oracle {oracle:?}");
                        checks += 1;
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} descendant/depth queries agree with the parent-chain oracle"))
}

fn length_counts() -> Outcome {
    let mut rows = 0;
    let (mut below, mut at, mut above) = (false, false, false);
    for p in grid_with_classic() {
        let roots = cli::length_count_roots(p);
        for z in &roots {
            below |= *z < Rational::one();
            at |= z.is_one();
            above |= *z > Rational::one();
            for n in 0..=LENGTH_COUNT_MAX_N {
                let oracle = common::length_histogram(frac(z), n, p.u(), p.v());
                let brute = row::cf_length_counts(z, n, p).map_err(|e| e.to_string())?;
                ensure!(brute == oracle, "{p} root {z} n={n}: enumeration {brute:?} vs oracle {oracle:?}");
                let pred = row::predicted_cf_length_counts(z, n, p, CountVariant::Corrected).map_err(|e| e.to_string())?;
                let pred: BTreeMap<i64, u64> = pred.into_iter().map(|(m, c)| (m, c as u64)).collect();
                ensure!(pred == oracle, "{p} root {z} n={n}: corrected {pred:?} vs brute {oracle:?}");
                rows += 1;
            }
        }
    }
    ensure!(below && at && above, "roots do not cover z<1, z=1, z>1");

    let p = params(1, 1);
    let three = Rational::integer(3u32);
    let literal = row::predicted_cf_length_counts(&three, 1, p, CountVariant::Literal).map_err(|e| e.to_string())?;
    let brute = row::cf_length_counts(&three, 1, p).map_err(|e| e.to_string())?;
    ensure!(literal == BTreeMap::from([(1, 2)]), "literal predicts {literal:?}");
    ensure!(brute == BTreeMap::from([(0, 1), (2, 1)]), "brute force gives {brute:?}");
    Ok(format!("corrected predictor exact on {rows} rows; literal variant {{1:2}} != {{0:1, 2:1}} at (1,1), z=3, n=1"))
}

fn monotonicity() -> Outcome {
    let mut pairs = 0;
    for p in grid_with_classic() {
        for res in analysis::monotonicity_check(p, MONOTONICITY_MAX_N, &RowConfig::exact().with_workers(workers()))
            .map_err(|e| e.to_string())?
        {
            ensure!(res.holds(), "{p} root {}: fails at n={:?}", res.root, res.first_violation);
            for n in 0..=8u32 {
                let oracle = common::sum_rational(&common::row(frac(&res.root), n, p.u(), p.v()));
                ensure!(res.sums[n as usize].as_exact() == Some(&oracle), "{p} root {}: S({n}) differs from oracle", res.root);
            }
            pairs += MONOTONICITY_MAX_N;
        }
    }
    Ok(format!("S(n+1) > 2 S(n) exactly on {pairs} (params, root, n) cases"))
}

fn int_parts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cases = 0;
    for p in grid_with_classic() {
        for _ in 0..INT_PART_ROOTS {
            let (a, b): (u128, u128) = loop {
                let a = rng.random_range(1..=60u128);
                let b = rng.random_range(1..=60u128);
                if num_integer::gcd(a, b) == 1 {
                    break (a, b);
                }
            };
            let cfg = RowConfig::exact().with_workers(rng.random_range(1..=4usize));
            for n in 0..=INT_PART_MAX_N {
                let stats = row::row_stats(&rat((a, b)), n, p, &cfg).map_err(|e| e.to_string())?;
                let want = ((1u128 << n) - 1) * p.v() as u128 + a / b;
                ensure!(stats.int_part_sum == BigUint::from(want), "{p} root {a}/{b} n={n}: {} != {want}", stats.int_part_sum);
                cases += 1;
            }
        }
    }
    Ok(format!("I_n = (2^n - 1) v + floor(root) on {cases} random cases"))
}

fn mean_bound() -> Outcome {
    let cfg = RowConfig::enclosure(ENCLOSURE_PRECISION).with_workers(workers());
    let mut smallest: Option<(f64, String)> = None;
    for p in default_grid() {
        ensure!(p.u() * p.v() > 1, "{p} has uv = 1");
        let limit = analysis::limit_estimate(p, LIMIT_PRECISION).map_err(|e| e.to_string())?;
        for root in analysis::extreme_roots(p) {
            let series = row::mean_series(&root, BOUND_MAX_N, p, &cfg).map_err(|e| e.to_string())?;
            for s in &series {
                let mean = s.mean.as_enclosure().ok_or("expected enclosure")?;
                ensure!(mean.certainly_lt(&limit), "{p} root {root} n={}: A = {mean} not below {limit}", s.n);
                let gap = limit.sub(mean).midpoint_f64();
                if smallest.as_ref().is_none_or(|(g, _)| gap < *g) {
                    smallest = Some((gap, format!("{p} root {root} n={}", s.n)));
                }
            }
        }
    }
    for rule in [RootRule::LowRoot, RootRule::HighRoot] {
        let g = analysis::mean_gap_scaling(&default_grid(), rule, GAP_SCALING_N, &cfg).map_err(|e| e.to_string())?;
        ensure!(g.all_positive, "{rule:?}: a gap at n={GAP_SCALING_N} is not positive");
        ensure!(g.u_chains_non_increasing, "{rule:?}: gap increases along a u-chain");
        ensure!(g.v_chains_non_increasing, "{rule:?}: gap increases along a v-chain");
    }
    let (g, at) = smallest.ok_or("no rows")?;
    Ok(format!("A(n) < v + ln2/u for n <= {BOUND_MAX_N}; smallest gap {g:.3e} at {at}; chains non-increasing at n = {GAP_SCALING_N}"))
}

fn bijection_and_decay() -> Outcome {
    for p in default_grid() {
        let (u, v) = (p.u(), p.v());
        for n in 0..=BIJECTION_MAX_N {
            let mut image: Vec<Frac> = row::row_iter(&p.high_root(), n, p)
                .map_err(|e| e.to_string())?
                .map(|y| row::samelim_bijection(&y, n, p).map(|x| frac(&x)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let mut target = common::row(frac(&p.low_root()), n, u, v);
            image.sort_unstable();
            target.sort_unstable();
            ensure!(image == target, "{p} n={n}: image is not the target row");
        }
    }
    let cfg = RowConfig::enclosure(ENCLOSURE_PRECISION).with_workers(workers());
    let mut worst = 0.0f64;
    for p in default_grid() {
        let (lo, hi) = (p.low_root(), p.high_root());
        let mid = (&lo + &hi).div_pow2(1);
        for (z1, z2) in [(&lo, &hi), (&lo, &mid), (&mid, &hi)] {
            let rep = analysis::mean_difference_decay(z1, z2, p, DECAY_WINDOW.1, &cfg, Some(DECAY_WINDOW))
                .map_err(|e| e.to_string())?;
            let q = rep.fitted_ratio.ok_or_else(|| format!("{p} ({z1}, {z2}): no fit"))?;
            ensure!(q <= DECAY_RATIO_MAX, "{p} ({z1}, {z2}): ratio {q:.4}");
            worst = worst.max(q);
        }
    }
    Ok(format!("bijection onto target rows for n <= {BIJECTION_MAX_N}; worst decay ratio {worst:.4} <= {DECAY_RATIO_MAX}"))
}

fn cf_comparisons() -> Outcome {
    let mut values: Vec<Frac> = vec![(0, 1)];
    for a in 1..=CF_EXHAUSTIVE_MAX {
        for b in 1..=CF_EXHAUSTIVE_MAX {
            if num_integer::gcd(a, b) == 1 {
                values.push((a, b));
            }
        }
    }
    let reps: Vec<Vec<ContinuedFraction>> = values.iter().map(|&x| ContinuedFraction::representations(&rat(x))).collect();
    let mut compares = 0u64;
    for (i, &x) in values.iter().enumerate() {
        for (j, &y) in values.iter().enumerate() {
            let want = (x.0 * y.1).cmp(&(y.0 * x.1));
            for rx in &reps[i] {
                for ry in &reps[j] {
                    ensure!(rx.compare(ry) == want, "compare({rx}, {ry}) = {:?}, values say {want:?}", rx.compare(ry));
                    compares += 1;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xcf);
    let mut pairs = 0;
    while pairs < PREFIX_PAIRS {
        let k = rng.random_range(0..6usize);
        let mut prefix = vec![rng.random_range(0..5u64)];
        prefix.extend((0..k).map(|_| rng.random_range(1..10u64)));
        let tail = |rng: &mut ChaCha8Rng| {
            let mut t = prefix.clone();
            let len = rng.random_range(1..5usize);
            t.extend((0..len).map(|_| rng.random_range(1..10u64)));
            t
        };
        let (a, b) = (tail(&mut rng), tail(&mut rng));
        let (x, y) = (ContinuedFraction::from_u64s(&a).unwrap(), ContinuedFraction::from_u64s(&b).unwrap());
        let (vx, vy) = (x.decode(), y.decode());
        if vx == vy {
            continue;
        }
        let shared = a.iter().zip(&b).take_while(|(p, q)| p == q).count();
        let oracle = a[1..shared].iter().fold(BigUint::from(1u32), |acc, &p| acc * p * p);
        let bound = x.prefix_bound(&y).map_err(|e| e.to_string())?;
        ensure!(bound == Rational::from_biguints(BigUint::from(1u32), oracle), "{x} vs {y}: bound {bound}");
        let gap = if vx > vy { vx.checked_sub(&vy) } else { vy.checked_sub(&vx) }.unwrap();
        ensure!(gap <= bound, "{x} vs {y}: |diff| {gap} exceeds {bound}");
        pairs += 1;
    }
    Ok(format!("{compares} exhaustive compares match; prefix bound holds on {pairs} random pairs"))
}

fn heuristic() -> Outcome {
    let ln2 = analysis::ln2(LIMIT_PRECISION).map_err(|e| e.to_string())?;
    ensure!((ln2.midpoint_f64() - std::f64::consts::LN_2).abs() < 1e-15, "ln 2 enclosure is off");
    let tol = Enclosure::from_rational(&pow10_inverse(HEURISTIC_TOL_DIGITS), LIMIT_PRECISION).unwrap();
    let mut worst = 0.0f64;
    for p in default_grid() {
        let h = analysis::heuristic_partial_sums(p, HEURISTIC_TERMS).map_err(|e| e.to_string())?;
        let limit = analysis::limit_estimate(p, LIMIT_PRECISION).map_err(|e| e.to_string())?;
        let diff = Enclosure::from_rational(&h, LIMIT_PRECISION).unwrap().sub(&limit).abs();
        ensure!(diff.certainly_lt(&tol), "{p}: |heuristic - limit| ~ {:.3e}", diff.midpoint_f64());
        worst = worst.max(diff.midpoint_f64());
    }
    Ok(format!("K = {HEURISTIC_TERMS}: worst |heuristic - limit| ~ {worst:.3e} < 1e-{HEURISTIC_TOL_DIGITS}"))
}

fn enclosures() -> Outcome {
    let enc = RowConfig::enclosure(ENCLOSURE_PRECISION).with_workers(workers());
    let exact = RowConfig::exact().with_workers(workers());
    let mut checked = 0;
    for p in grid_with_classic() {
        for root in analysis::extreme_roots(p) {
            let a = row::mean_series(&root, SOUNDNESS_MAX_N, p, &exact).map_err(|e| e.to_string())?;
            let b = row::mean_series(&root, SOUNDNESS_MAX_N, p, &enc).map_err(|e| e.to_string())?;
            for (x, y) in a.iter().zip(&b) {
                let (m, s) = (x.mean.as_exact().unwrap(), x.sum.as_exact().unwrap());
                ensure!(y.mean.contains(m) && y.sum.contains(s), "{p} root {root} n={}: exact value outside enclosure", x.n);
                checked += 1;
            }
        }
    }

    let p = params(1, 2);
    let root = Rational::integer(2u32);
    let start = Instant::now();
    let cfg = RowConfig::enclosure(ENCLOSURE_PRECISION).with_workers(PERF_WORKERS);
    let stats = row::row_stats(&root, PERF_DEPTH, p, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(elapsed < TIME_LIMIT, "n={PERF_DEPTH} took {elapsed:?}");
    ensure!(stats.count == BigUint::from(1u64 << PERF_DEPTH), "wrong count");
    ensure!(stats.int_part_sum == BigUint::from(((1u64 << PERF_DEPTH) - 1) * 2 + 2), "wrong integer parts");

    for p in [params(1, 2), params(2, 3), params(3, 1)] {
        for root in analysis::extreme_roots(p) {
            let runs: Vec<_> = WORKER_COUNTS
                .iter()
                .map(|&w| row::row_stats(&root, SOUNDNESS_MAX_N, p, &RowConfig::exact().with_workers(w)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            ensure!(runs.windows(2).all(|w| w[0] == w[1]), "{p} root {root}: exact results depend on workers");
            let series: Vec<_> = WORKER_COUNTS
                .iter()
                .map(|&w| row::mean_series(&root, 12, p, &RowConfig::exact().with_workers(w)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            ensure!(series.windows(2).all(|w| w[0] == w[1]), "{p} root {root}: exact series depend on workers");
        }
    }
    Ok(format!(
        "{checked} exact means inside P={ENCLOSURE_PRECISION} enclosures; n={PERF_DEPTH} with {PERF_WORKERS} workers in {elapsed:.2?}; exact results equal for workers {WORKER_COUNTS:?}"
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("(1,1) closed form for S(n)", closed_form),
        ("classic tree row 3 in order", classic_row),
        ("row symmetry s_i = 1/s_(2^n-1-i)", symmetry),
        ("partition of the positive rationals", partition),
        ("descendant and depth from continued fractions", descendants),
        ("length-count predictor and literal mismatch", length_counts),
        ("S(n+1) > 2 S(n)", monotonicity),
        ("integer-part identity", int_parts),
        ("mean below v + ln2/u, gap monotone in u and v", mean_bound),
        ("row bijection and mean-difference decay", bijection_and_decay),
        ("continued-fraction comparison and prefix bound", cf_comparisons),
        ("heuristic series against the limit constant", heuristic),
        ("enclosure soundness, performance, worker independence", enclosures),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
