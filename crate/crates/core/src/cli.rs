//! The `cwforest` command line.
//!
//! Every subcommand builds a [`Report`] once and renders it as text, CSV or
//! JSON. JSON documents carry `"schema_version": 1`; all output ends lines
//! with `\n`. Exit codes: 0 on success, 1 on usage or input errors, 2 when a
//! check suite finds a violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis;
use crate::contfrac::{cf_length, ContinuedFraction};
use crate::enclosure::{DEFAULT_PRECISION, MIN_PRECISION};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::row::{self, CountVariant, Mode, RowConfig, RowValue};
use crate::tree::{self, TreeParams};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cwforest", version, about = "Exact experiments on (u,v)-Calkin-Wilf trees")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Enclosure,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Paper,
    Corrected,
}

impl From<VariantArg> for CountVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Paper => CountVariant::Literal,
            VariantArg::Corrected => CountVariant::Corrected,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Partition,
    Symmetry,
    Monotonicity,
    Mcount,
    #[value(name = "closed-form-11")]
    ClosedForm11,
}

#[derive(Args, Debug, Clone, Copy)]
struct TreeArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    u: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    v: u64,
}

impl TreeArgs {
    fn params(&self) -> Result<TreeParams> {
        TreeParams::new(self.u, self.v)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Fractional bits of enclosure bounds.
    #[arg(long, env = "CWFOREST_PRECISION_BITS", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, env = "CWFOREST_WORKERS")]
    workers: Option<usize>,
}

impl EngineArgs {
    fn config(&self) -> Result<RowConfig> {
        if self.precision < MIN_PRECISION {
            return Err(Error::Precision(self.precision));
        }
        let workers = self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });
        if workers == 0 {
            return Err(Error::InvalidArgument("--workers must be at least 1".into()));
        }
        let cfg = match self.mode {
            ModeArg::Exact => RowConfig::exact(),
            ModeArg::Enclosure => RowConfig::enclosure(self.precision),
        };
        Ok(cfg.with_workers(workers))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the vertices of one row, left to right.
    Row {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        root: Rational,
        #[arg(long)]
        depth: u32,
        /// Stop after this many vertices.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Aggregates of one row: count, sum, mean, integer parts, length histogram.
    Stats {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        root: Rational,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Row means for n = 0..=max-depth and their gap to v + ln 2/u.
    Mean {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        root: Rational,
        #[arg(long)]
        max_depth: u32,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Root, depth and path of a positive rational.
    Locate {
        #[command(flatten)]
        tree: TreeArgs,
        value: Rational,
    },
    /// Whether QUERY lies below ANCESTOR, decided from continued fractions.
    Descendant {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        ancestor: Rational,
        #[arg(long)]
        query: Rational,
    },
    /// Encode a rational as a continued fraction, or decode one.
    Cf {
        #[arg(required_unless_present = "decode", conflicts_with = "decode")]
        value: Option<Rational>,
        #[arg(long)]
        decode: Option<ContinuedFraction>,
    },
    /// Continued-fraction length histogram of a row against the predictor.
    CflenHist {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        root: Rational,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
    },
    /// Convergence reports for several roots (default: 1/u and v).
    Converge {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, value_delimiter = ',')]
        roots: Vec<Rational>,
        #[arg(long)]
        max_depth: u32,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// |A(z1; n) − A(z2; n)| and its fitted geometric ratio.
    Decay {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        z1: Rational,
        #[arg(long)]
        z2: Rational,
        #[arg(long)]
        max_depth: u32,
        /// First row of the fit window; the default window is the last six rows.
        #[arg(long)]
        fit_from: Option<u32>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run an identity check; exits with 2 when a case fails.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Restrict to one parameter pair (requires --v).
    #[arg(long, requires = "v", value_parser = clap::value_parser!(u64).range(1..))]
    u: Option<u64>,
    #[arg(long, requires = "u", value_parser = clap::value_parser!(u64).range(1..))]
    v: Option<u64>,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Largest numerator and denominator for the partition suite.
    #[arg(long, default_value_t = 40)]
    max_den: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
    variant: VariantArg,
    #[command(flatten)]
    engine: EngineArgs,
}

/// A command result, independent of the output format.
struct Report {
    json: Map<String, Value>,
    header: Vec<String>,
    records: Vec<Vec<String>>,
    text: String,
    violation: bool,
}

impl Report {
    fn new(json: Value, header: Vec<String>, records: Vec<Vec<String>>, text: String) -> Self {
        let Value::Object(json) = json else {
            unreachable!("reports are objects")
        };
        Self {
            json,
            header,
            records,
            text,
            violation: false,
        }
    }

    fn render(self, format: Format) -> Vec<u8> {
        match format {
            Format::Text => {
                let mut t = self.text;
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t.into_bytes()
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.records {
                    w.write_record(r).expect("in-memory write");
                }
                w.into_inner().expect("in-memory flush")
            }
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
                doc.extend(self.json);
                let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
                s.push('\n');
                s.into_bytes()
            }
        }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Header cells for a value column: one for exact, `_lo`/`_hi` for enclosures.
fn value_header(name: &str, mode: Mode) -> Vec<String> {
    match mode {
        Mode::Exact => vec![name.to_string()],
        Mode::Enclosure { .. } => vec![format!("{name}_lo"), format!("{name}_hi")],
    }
}

fn header_with(prefix: &[&str], values: &[(&str, Mode)]) -> Vec<String> {
    let mut h = cols(prefix);
    for (name, mode) in values {
        h.extend(value_header(name, *mode));
    }
    h
}

fn value_text(v: &RowValue) -> String {
    match v {
        RowValue::Exact(r) => r.to_string(),
        RowValue::Enclosure(e) => e.to_string(),
    }
}

fn path_text(p: &tree::TreePath) -> String {
    if p.is_empty() {
        "(root)".into()
    } else {
        p.to_string()
    }
}

fn cmd_row(p: TreeParams, root: &Rational, depth: u32, limit: Option<u64>) -> Result<Report> {
    let mut records = Vec::new();
    let mut items = Vec::new();
    let mut text = String::new();
    let iter = row::row_iter(root, depth, p)?;
    let take = limit.map_or(usize::MAX, |l| usize::try_from(l).unwrap_or(usize::MAX));
    for (i, y) in iter.take(take).enumerate() {
        let cf = ContinuedFraction::encode(&y);
        let ip = row::int_part(&y);
        let len = cf.last_index();
        text.push_str(&format!("{y}\n"));
        records.push(vec![i.to_string(), y.to_string(), cf.to_string(), ip.to_string(), len.to_string()]);
        items.push(json!({
            "index": i,
            "value": y.to_string(),
            "cf": cf.to_json_value(),
            "int_part": row::big_number(&ip),
            "cf_length": len,
        }));
    }
    let json = json!({
        "u": p.u(), "v": p.v(), "root": root.to_string(), "depth": depth, "vertices": items,
    });
    Ok(Report::new(json, cols(&["index", "value", "cf", "int_part", "cf_length"]), records, text))
}

fn cmd_stats(p: TreeParams, root: &Rational, depth: u32, cfg: &RowConfig) -> Result<Report> {
    let s = row::row_stats(root, depth, p, cfg)?;
    let mut json = s.to_json();
    json["u"] = json!(p.u());
    json["v"] = json!(p.v());
    json["root"] = json!(root.to_string());
    json["mode"] = json!(cfg.mode.name());
    let mut rec = vec![s.n.to_string(), s.count.to_string()];
    rec.extend(s.sum.csv_cells());
    rec.extend(s.mean.csv_cells());
    rec.push(s.int_part_sum.to_string());
    let mut header = header_with(&["n", "count"], &[("sum", cfg.mode), ("mean", cfg.mode)]);
    header.push("int_part_sum".into());
    let hist: Vec<String> = s.histogram.iter().map(|(m, c)| format!("{m}:{c}")).collect();
    let text = format!(
        "n: {}\ncount: {}\nsum: {}\nmean: {}\nint_part_sum: {}\nhistogram: {}\n",
        s.n,
        s.count,
        value_text(&s.sum),
        value_text(&s.mean),
        s.int_part_sum,
        hist.join(" ")
    );
    Ok(Report::new(json, header, vec![rec], text))
}

fn convergence_rows(rep: &analysis::ConvergenceReport, with_root: bool) -> (Vec<Vec<String>>, String) {
    let mut records = Vec::new();
    let mut text = String::new();
    for r in &rep.rows {
        let mut rec = Vec::new();
        if with_root {
            rec.push(rep.root.to_string());
        }
        rec.push(r.n.to_string());
        rec.extend(r.mean.csv_cells());
        let d = r.gap.default_digits().min(30);
        rec.push(r.gap.lo_decimal(d));
        rec.push(r.gap.hi_decimal(d));
        records.push(rec);
        text.push_str(&format!(
            "{:>4}  {}  gap {:.6e}\n",
            r.n,
            value_text(&r.mean),
            r.gap.midpoint_f64()
        ));
    }
    (records, text)
}

fn cmd_mean(p: TreeParams, root: &Rational, max_depth: u32, cfg: &RowConfig) -> Result<Report> {
    let rep = analysis::convergence_report(root, p, max_depth, cfg)?;
    let (records, body) = convergence_rows(&rep, false);
    let text = format!("limit {}\n{body}", rep.limit);
    let mut header = header_with(&["n"], &[("mean", cfg.mode)]);
    header.extend(["gap_lo".to_string(), "gap_hi".to_string()]);
    Ok(Report::new(rep.to_json(), header, records, text))
}

fn cmd_converge(p: TreeParams, roots: &[Rational], max_depth: u32, cfg: &RowConfig) -> Result<Report> {
    let roots = if roots.is_empty() {
        analysis::extreme_roots(p)
    } else {
        roots.to_vec()
    };
    let mut reports = Vec::new();
    let mut records = Vec::new();
    let mut text = String::new();
    for root in &roots {
        let rep = analysis::convergence_report(root, p, max_depth, cfg)?;
        let (rec, body) = convergence_rows(&rep, true);
        records.extend(rec);
        text.push_str(&format!("root {root}  limit {}\n{body}", rep.limit));
        reports.push(rep.to_json());
    }
    let mut header = header_with(&["root", "n"], &[("mean", cfg.mode)]);
    header.extend(["gap_lo".to_string(), "gap_hi".to_string()]);
    let json = json!({"u": p.u(), "v": p.v(), "reports": reports});
    Ok(Report::new(json, header, records, text))
}

fn cmd_locate(p: TreeParams, q: &Rational) -> Result<Report> {
    let loc = tree::locate(q, p)?;
    let path = loc.path.to_string();
    let json = json!({
        "u": p.u(), "v": p.v(), "value": q.to_string(),
        "root": loc.root.to_string(), "depth": loc.depth, "path": path,
    });
    let text = format!("root {}\ndepth {}\npath {}\n", loc.root, loc.depth, path_text(&loc.path));
    let rec = vec![q.to_string(), loc.root.to_string(), loc.depth.to_string(), path];
    Ok(Report::new(json, cols(&["value", "root", "depth", "path"]), vec![rec], text))
}

fn cmd_descendant(p: TreeParams, z: &Rational, zp: &Rational) -> Result<Report> {
    let depth = if tree::is_descendant(z, zp, p) {
        Some(tree::depth_from_cf(z, zp, p)?)
    } else {
        None
    };
    let json = json!({
        "u": p.u(), "v": p.v(), "ancestor": z.to_string(), "query": zp.to_string(),
        "descendant": depth.is_some(), "depth": depth,
    });
    let text = match depth {
        Some(d) => format!("{zp} is a descendant of {z} at depth {d}\n"),
        None => format!("{zp} is not a descendant of {z}\n"),
    };
    let rec = vec![
        z.to_string(),
        zp.to_string(),
        depth.is_some().to_string(),
        depth.map(|d| d.to_string()).unwrap_or_default(),
    ];
    Ok(Report::new(json, cols(&["ancestor", "query", "descendant", "depth"]), vec![rec], text))
}

fn cmd_cf(value: Option<Rational>, decode: Option<ContinuedFraction>) -> Result<Report> {
    let (x, cf) = match (value, decode) {
        (Some(x), _) => {
            let cf = ContinuedFraction::encode(&x);
            (x, cf)
        }
        (None, Some(cf)) => (cf.decode(), cf),
        (None, None) => return Err(Error::InvalidArgument("give a value or --decode".into())),
    };
    let short = cf.canonical();
    let long = if x.is_zero() { None } else { Some(short.long_form()?) };
    let len = cf_length(&x).ok();
    let json = json!({
        "value": x.to_string(),
        "cf": short.to_json_value(),
        "long_form": long.as_ref().map(ContinuedFraction::to_json_value),
        "cf_length": len,
    });
    let long_s = long.as_ref().map(ToString::to_string).unwrap_or_default();
    let text = format!("{x} = {short}\n");
    let rec = vec![
        x.to_string(),
        short.to_string(),
        long_s,
        len.map(|l| l.to_string()).unwrap_or_default(),
    ];
    Ok(Report::new(json, cols(&["value", "cf", "long_form", "cf_length"]), vec![rec], text))
}

fn cmd_cflen_hist(p: TreeParams, root: &Rational, depth: u32, variant: CountVariant) -> Result<Report> {
    let emp = row::cf_length_counts(root, depth, p)?;
    let pred = row::predicted_cf_length_counts(root, depth, p, variant)?;
    let ms: std::collections::BTreeSet<i64> = emp.keys().chain(pred.keys()).copied().collect();
    let mut records = Vec::new();
    let mut text = format!("{:>4} {:>12} {:>12}\n", "m", "empirical", "predicted");
    let mut rows = Vec::new();
    for m in ms {
        let e = emp.get(&m).copied().unwrap_or(0);
        let q = pred.get(&m).copied().unwrap_or(0);
        records.push(vec![m.to_string(), e.to_string(), q.to_string()]);
        text.push_str(&format!("{m:>4} {e:>12} {q:>12}\n"));
        rows.push(json!({"m": m, "empirical": e, "predicted": q}));
    }
    let matches = emp.iter().map(|(m, c)| (*m, *c as u128)).eq(pred.iter().map(|(m, c)| (*m, *c)));
    text.push_str(if matches { "match\n" } else { "mismatch\n" });
    let variant_name = match variant {
        CountVariant::Literal => "paper",
        CountVariant::Corrected => "corrected",
    };
    let json = json!({
        "u": p.u(), "v": p.v(), "root": root.to_string(), "depth": depth,
        "variant": variant_name, "matches": matches, "rows": rows,
    });
    Ok(Report::new(json, cols(&["m", "empirical", "predicted"]), records, text))
}

fn cmd_decay(
    p: TreeParams,
    z1: &Rational,
    z2: &Rational,
    max_depth: u32,
    fit_from: Option<u32>,
    cfg: &RowConfig,
) -> Result<Report> {
    let rep = analysis::mean_difference_decay(z1, z2, p, max_depth, cfg, fit_from.map(|a| (a, max_depth)))?;
    let mut records = Vec::new();
    let mut text = String::new();
    for r in &rep.rows {
        let mut rec = vec![r.n.to_string()];
        rec.extend(r.diff.csv_cells());
        records.push(rec);
        text.push_str(&format!("{:>4}  {:.6e}\n", r.n, r.approx()));
    }
    match rep.fitted_ratio {
        Some(q) => text.push_str(&format!("ratio {q:.6} over n in [{}, {}]\n", rep.window.0, rep.window.1)),
        None => text.push_str("ratio undefined\n"),
    }
    let header = header_with(&["n"], &[("diff", cfg.mode)]);
    Ok(Report::new(rep.to_json(), header, records, text))
}

struct Case {
    name: String,
    passed: bool,
    detail: String,
}

fn suite_params(args: &CheckArgs, default: &[(u64, u64)]) -> Result<Vec<TreeParams>> {
    match (args.u, args.v) {
        (Some(u), Some(v)) => Ok(vec![TreeParams::new(u, v)?]),
        _ => default.iter().map(|&(u, v)| TreeParams::new(u, v)).collect(),
    }
}

fn with_classic(grid: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut g = vec![(1, 1)];
    g.extend_from_slice(grid);
    g
}

/// Roots below, at and above 1 for the length-count suite.
pub fn length_count_roots(p: TreeParams) -> Vec<Rational> {
    let mut roots = vec![
        Rational::new(1, 3).expect("valid"),
        p.low_root(),
        Rational::one(),
        p.high_root(),
        Rational::integer(3u32),
    ];
    roots.sort();
    roots.dedup();
    roots
}

fn run_suite(args: &CheckArgs) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    match args.suite {
        Suite::Partition => {
            for p in suite_params(args, &[(1, 1), (1, 2), (2, 1), (2, 3)])? {
                let rep = analysis::partition_check(p, args.max_den)?;
                let mut detail = format!("checked {} orphans {} roots {}", rep.checked, rep.orphans, rep.roots.len());
                if let Some(f) = rep.failures.first() {
                    detail.push_str(&format!("; {} failures, first: {f}", rep.failures.len()));
                }
                cases.push(Case { name: format!("partition {p}"), passed: rep.holds(), detail });
            }
        }
        Suite::Symmetry => {
            for (n, ok) in analysis::symmetry_check(args.max_depth.unwrap_or(10)) {
                cases.push(Case { name: format!("symmetry n={n}"), passed: ok, detail: String::new() });
            }
        }
        Suite::Monotonicity => {
            let cfg = args.engine.config()?;
            for p in suite_params(args, &with_classic(&analysis::DEFAULT_GRID))? {
                for res in analysis::monotonicity_check(p, args.max_depth.unwrap_or(14), &cfg)? {
                    let detail = match res.first_violation {
                        Some(n) => format!("S({}) > 2 S({n}) not established", n + 1),
                        None => String::new(),
                    };
                    cases.push(Case {
                        name: format!("monotonicity {p} root {}", res.root),
                        passed: res.holds(),
                        detail,
                    });
                }
            }
        }
        Suite::Mcount => {
            let n_max = args.max_depth.unwrap_or(10);
            for p in suite_params(args, &with_classic(&analysis::DEFAULT_GRID))? {
                let rows = analysis::length_count_check(p, &length_count_roots(p), n_max, args.variant.into())?;
                for r in rows {
                    let detail = if r.matches() {
                        String::new()
                    } else {
                        format!("empirical {:?} predicted {:?}", r.empirical, r.predicted)
                    };
                    cases.push(Case {
                        name: format!("mcount {p} root {} n={}", r.root, r.n),
                        passed: r.matches(),
                        detail,
                    });
                }
            }
        }
        Suite::ClosedForm11 => {
            let workers = args.engine.config()?.workers;
            for r in analysis::closed_form_check_11(args.max_depth.unwrap_or(12), workers)? {
                cases.push(Case {
                    name: format!("closed-form n={}", r.n),
                    passed: r.ok(),
                    detail: format!("S = {} expected {}", r.computed, r.expected),
                });
            }
        }
    }
    Ok(cases)
}

fn cmd_check(args: &CheckArgs) -> Result<Report> {
    let cases = run_suite(args)?;
    let passed = cases.iter().all(|c| c.passed);
    let suite = args.suite.to_possible_value().expect("named").get_name().to_string();
    let mut text = String::new();
    for c in &cases {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            text.push_str(&format!("{tag} {}\n", c.name));
        } else {
            text.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
    }
    let failed = cases.iter().filter(|c| !c.passed).count();
    text.push_str(&format!("{suite}: {} cases, {failed} failed\n", cases.len()));
    let records = cases
        .iter()
        .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
        .collect();
    let json = json!({
        "suite": suite,
        "passed": passed,
        "cases": cases.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
    });
    let mut r = Report::new(json, cols(&["case", "passed", "detail"]), records, text);
    r.violation = !passed;
    Ok(r)
}

fn dispatch(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Row { tree, root, depth, limit } => cmd_row(tree.params()?, &root, depth, limit),
        Command::Stats { tree, root, depth, engine } => cmd_stats(tree.params()?, &root, depth, &engine.config()?),
        Command::Mean { tree, root, max_depth, engine } => {
            cmd_mean(tree.params()?, &root, max_depth, &engine.config()?)
        }
        Command::Locate { tree, value } => cmd_locate(tree.params()?, &value),
        Command::Descendant { tree, ancestor, query } => cmd_descendant(tree.params()?, &ancestor, &query),
        Command::Cf { value, decode } => cmd_cf(value, decode),
        Command::CflenHist { tree, root, depth, variant } => {
            cmd_cflen_hist(tree.params()?, &root, depth, variant.into())
        }
        Command::Converge { tree, roots, max_depth, engine } => {
            cmd_converge(tree.params()?, &roots, max_depth, &engine.config()?)
        }
        Command::Decay { tree, z1, z2, max_depth, fit_from, engine } => {
            cmd_decay(tree.params()?, &z1, &z2, max_depth, fit_from, &engine.config()?)
        }
        Command::Check(args) => cmd_check(&args),
    }
}

/// Runs one command line with explicit output streams and returns the exit code.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let report = match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let code = if report.violation { EXIT_VIOLATION } else { EXIT_OK };
    let bytes = report.render(cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &bytes),
        None => out.write_all(&bytes).and_then(|_| out.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}

/// Runs one command line against the process's stdout and stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("cwforest").chain(args.iter().copied());
        let code = run_cli_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn row_text_lists_classic_row() {
        let (code, out, _) = run(&["row", "--u", "1", "--v", "1", "--root", "1/1", "--depth", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1/4\n4/3\n3/5\n5/2\n2/5\n5/3\n3/4\n4/1\n");
    }

    #[test]
    fn row_csv_quotes_cf() {
        let (_, out, _) = run(&["row", "--u", "1", "--v", "1", "--root", "1", "--depth", "2", "--format", "csv", "--limit", "2"]);
        assert_eq!(out, "index,value,cf,int_part,cf_length\n0,1/3,\"[0,3]\",0,1\n1,3/2,\"[1,2]\",1,1\n");
    }

    #[test]
    fn locate_examples() {
        let (code, out, _) = run(&["locate", "--u", "1", "--v", "1", "7/5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "root 1/1\ndepth 4\npath RLLR\n");
        let (_, out, _) = run(&["locate", "--u", "1", "--v", "1", "1", "--format", "text"]);
        assert!(out.contains("path (root)"));
        let (_, out, _) = run(&["locate", "--u", "1", "--v", "1", "1", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["path"], "");
        assert_eq!(v["root"], "1/1");
    }

    #[test]
    fn closed_form_suite_passes() {
        let (code, out, _) = run(&["check", "--suite", "closed-form-11", "--max-depth", "12", "--workers", "2"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("13 cases, 0 failed"));
    }

    #[test]
    fn literal_variant_reports_violation() {
        let (code, out, _) = run(&["check", "--suite", "mcount", "--u", "1", "--v", "1", "--max-depth", "2", "--variant", "paper"]);
        assert_eq!(code, EXIT_VIOLATION);
        assert!(out.contains("FAIL mcount (1,1) root 3/1 n=1"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(&["row", "--u", "0", "--v", "1", "--root", "1", "--depth", "1"]).0, 1);
        assert_eq!(run(&["cf", "3/0"]).0, 1);
        assert_eq!(run(&["cf", "--decode", "[1,0,2]"]).0, 1);
        assert_eq!(run(&["frobnicate"]).0, 1);
        assert_eq!(run(&["locate", "--u", "1", "--v", "1", "0"]).0, 1);
        assert_eq!(run(&["stats", "--u", "1", "--v", "1", "--root", "1", "--depth", "1", "--mode", "enclosure", "--precision", "8"]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn cf_codec() {
        let (_, out, _) = run(&["cf", "3/5"]);
        assert_eq!(out, "3/5 = [0,1,1,2]\n");
        let (_, out, _) = run(&["cf", "--decode", "[0, 1, 1, 2]", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], "3/5");
        assert_eq!(v["long_form"], json!([0, 1, 1, 1, 1]));
    }

    #[test]
    fn descendant_reports_depth() {
        let (_, out, _) = run(&["descendant", "--u", "1", "--v", "1", "--ancestor", "1", "--query", "7/5"]);
        assert_eq!(out, "7/5 is a descendant of 1/1 at depth 4\n");
        let (_, out, _) = run(&["descendant", "--u", "1", "--v", "1", "--ancestor", "2", "--query", "1/2", "--format", "csv"]);
        assert_eq!(out, "ancestor,query,descendant,depth\n2/1,1/2,false,\n");
    }

    #[test]
    fn exact_output_independent_of_workers() {
        let base = ["mean", "--u", "1", "--v", "2", "--root", "2", "--max-depth", "9", "--format", "json"];
        let a = run(&[&base[..], &["--workers", "1"]].concat()).1;
        let b = run(&[&base[..], &["--workers", "8"]].concat()).1;
        assert_eq!(a, b);
    }

    #[test]
    fn enclosure_stats_csv_has_bounds() {
        let (code, out, _) = run(&[
            "stats", "--u", "1", "--v", "2", "--root", "2", "--depth", "4", "--mode", "enclosure",
            "--precision", "32", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,count,sum_lo,sum_hi,mean_lo,mean_hi,int_part_sum\n"));
    }
}
