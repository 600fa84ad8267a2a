//! Tabular reports behind the command-line tool.
//!
//! Every command produces a [`ReportDocument`] and a [`Status`]. Documents
//! render to CSV, JSON or an aligned text table; numbers are printed with 12
//! significant digits and lines end in `\n`.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::constants::{k_nem_case, k_trbern, k_type2_linf, limit_ratios, table_rows, Approach, CenteringCase};
use crate::error::{Error, Result};
use crate::gauss::{cd_bounds, tail_bounds};
use crate::norm::{smoothness_suite, RExponent};
use crate::simulate::{
    check_master_inequality, estimate_ratio, exact_ratio, DistributionSpec, MCConfig, ENUMERATION_BITS,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    ConstantsTable,
    LimitsTable,
    Curve,
    VerifyReport,
    LemmaReport,
    TailsTable,
    CdReport,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::ConstantsTable => "constants_table",
            ReportKind::LimitsTable => "limits_table",
            ReportKind::Curve => "curve",
            ReportKind::VerifyReport => "verify_report",
            ReportKind::LemmaReport => "lemma_report",
            ReportKind::TailsTable => "tails_table",
            ReportKind::CdReport => "cd_report",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Absent,
}

impl Cell {
    fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Absent, Cell::Num)
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Absent => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(round_sig(*x)).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Absent => Value::Null,
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Prints `x` rounded to 12 significant digits in the shortest form that
/// parses back to the rounded value.
pub fn format_number(x: f64) -> String {
    let y = round_sig(x);
    let a = y.abs();
    if y == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) {
        y.to_string()
    } else {
        format!("{y:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch; honours `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
}

impl Metadata {
    pub fn now(seed: Option<u64>) -> Metadata {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |t| t.as_secs()));
        Metadata { tool_version: TOOL_VERSION.to_string(), seed, timestamp }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
}

impl ReportDocument {
    /// Checks that rows are nonempty, rectangular and free of non-finite numbers.
    pub fn new(kind: ReportKind, columns: Vec<&'static str>, rows: Vec<Vec<Cell>>, metadata: Metadata) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Report(format!("{} has no rows", kind.as_str())));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::Report(format!("row {i} has {} cells, expected {}", row.len(), columns.len())));
            }
            for (c, cell) in columns.iter().zip(row) {
                if let Cell::Num(x) = cell {
                    if !x.is_finite() {
                        return Err(Error::Report(format!("row {i} column {c} is not finite: {x}")));
                    }
                }
            }
        }
        Ok(ReportDocument { kind, columns, rows, metadata })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_escape(&c.render())).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    m.insert((*c).to_string(), cell.to_json());
                }
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("kind".into(), Value::from(self.kind.as_str()));
        doc.insert("metadata".into(), serde_json::to_value(&self.metadata).unwrap_or(Value::Null));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).unwrap_or_default();
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let rendered: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                rendered
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain(std::iter::once(self.columns[j].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let numeric: Vec<bool> = (0..self.columns.len())
            .map(|j| self.rows.iter().all(|r| matches!(r[j], Cell::Num(_) | Cell::Int(_) | Cell::Absent)))
            .collect();
        let line = |cells: Vec<&str>| {
            let mut s = String::new();
            for (j, c) in cells.iter().enumerate() {
                if j > 0 {
                    s.push_str("  ");
                }
                let pad = widths[j] - c.chars().count();
                if numeric[j] {
                    s.push_str(&" ".repeat(pad));
                    s.push_str(c);
                } else {
                    s.push_str(c);
                    s.push_str(&" ".repeat(pad));
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "{}", line(self.columns.clone()));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(out, "{}", line(rule.iter().map(String::as_str).collect()));
        for r in &rendered {
            let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Table => self.to_table(),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Table,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            other => Err(Error::Domain(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "table",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

/// A finished command: the document, its verdict, and what went wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub doc: ReportDocument,
    pub status: Status,
    pub failures: Vec<String>,
}

impl Outcome {
    fn new(doc: ReportDocument, failures: Vec<String>) -> Outcome {
        let status = if failures.is_empty() { Status::Pass } else { Status::Fail };
        Outcome { doc, status, failures }
    }
}

pub fn cmd_constants(d: u64, case: Option<CenteringCase>) -> Result<Outcome> {
    let rows = table_rows(d)?
        .into_iter()
        .filter(|row| case.is_none_or(|c| c == row.case))
        .map(|row| {
            vec![Cell::text(row.approach.as_str()), Cell::text(row.case.as_str()), Cell::Int(d), Cell::Num(row.k)]
        })
        .collect();
    let doc =
        ReportDocument::new(ReportKind::ConstantsTable, vec!["approach", "case", "d", "k"], rows, Metadata::now(None))?;
    Ok(Outcome::new(doc, Vec::new()))
}

pub fn cmd_limits() -> Result<Outcome> {
    let lim = limit_ratios();
    let mut rows = Vec::new();
    let names = [Approach::Nemirovski, Approach::Type2, Approach::TruncBernstein];
    for (approach, ks) in names.iter().zip(lim.k_star.iter()) {
        for (case, k) in CenteringCase::ALL.iter().zip(ks) {
            rows.push(vec![
                Cell::text(format!("k_star_{}", approach.as_str())),
                Cell::text(case.as_str()),
                Cell::Num(*k),
            ]);
        }
    }
    for (name, x) in [
        ("trbern_over_nem", lim.trbern_over_nem),
        ("type2_over_nem", lim.type2_over_nem),
        ("trbern_over_type2", lim.trbern_over_type2),
    ] {
        rows.push(vec![Cell::text(name), Cell::text(CenteringCase::Centered.as_str()), Cell::Num(x)]);
    }
    let doc =
        ReportDocument::new(ReportKind::LimitsTable, vec!["quantity", "case", "value"], rows, Metadata::now(None))?;
    Ok(Outcome::new(doc, Vec::new()))
}

pub const CURVE_D_MIN: u64 = 8;
pub const CURVE_D_MAX: u64 = 10_000_000;
pub const CURVE_POINTS: usize = 60;

/// Log-spaced integer grid from `d_min` to `d_max`, duplicates removed.
pub fn log_grid(d_min: u64, d_max: u64, points: usize) -> Result<Vec<u64>> {
    if d_min < 3 || d_min >= d_max {
        return Err(Error::Domain(format!("need 3 <= d_min < d_max, got {d_min}..{d_max}")));
    }
    if points < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {points}")));
    }
    let (a, b) = ((d_min as f64).ln(), (d_max as f64).ln());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| match i {
            0 => d_min,
            i if i == points - 1 => d_max,
            i => (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as u64,
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Constants along `d` for one case. In the centered case, every `d ≥ 32`
/// must show the order Nemirovski < type 2 < truncation/Bernstein.
pub fn cmd_curve(d_min: u64, d_max: u64, points: usize, case: CenteringCase) -> Result<Outcome> {
    let grid = log_grid(d_min, d_max, points)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for &d in &grid {
        let nem = k_nem_case(d, case)?;
        let t2 = k_type2_linf(d, case, false)?;
        let t2r = k_type2_linf(d, case, true)?;
        let tb = k_trbern(d, case)?;
        if case == CenteringCase::Centered && d >= 32 && !(nem < t2 && t2 < tb && t2r < tb) {
            failures.push(format!("ordering fails at d={d}: {nem} {t2} {t2r} {tb}"));
        }
        rows.push(vec![Cell::Int(d), Cell::Num(nem), Cell::Num(t2), Cell::Num(t2r), Cell::Num(tb)]);
    }
    let doc = ReportDocument::new(
        ReportKind::Curve,
        vec!["d", "k_nem", "k_type2", "k_type2_refined", "k_trbern"],
        rows,
        Metadata::now(None),
    )?;
    Ok(Outcome::new(doc, failures))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyArgs {
    pub dist: DistributionSpec,
    pub case: CenteringCase,
    pub d: usize,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub r: RExponent,
}

/// Checks the master inequality by Monte Carlo and, when the outcome space
/// fits the enumeration budget, exactly. With both available, the estimate
/// must also lie within four standard errors of the exact ratio.
pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let cfg = MCConfig::new(args.d, args.n, args.reps, args.seed)?;
    args.dist.validate(args.case, args.d, args.n)?;
    let mc = estimate_ratio(&args.dist, args.case, &cfg, args.r)?;
    let exact = if args.dist.enumeration_bits(args.d, args.n) <= ENUMERATION_BITS as usize {
        Some(exact_ratio(&args.dist, args.case, args.d, args.n, args.r)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (method, est) in [("monte_carlo", Some(mc)), ("exact", exact)] {
        let Some(est) = est else { continue };
        for c in check_master_inequality(&est, args.d, args.r)? {
            if !c.pass {
                failures.push(format!("{method}: ratio {} exceeds {} bound {}", c.ratio, c.approach, c.k));
            }
            rows.push(vec![
                Cell::text(method),
                Cell::text(c.approach.as_str()),
                Cell::Num(c.k),
                Cell::Num(c.ratio),
                Cell::Num(est.stderr),
                Cell::Num(c.margin),
                Cell::Bool(c.pass),
            ]);
        }
    }
    if let Some(ex) = exact {
        let gap = (mc.ratio - ex.ratio).abs();
        let allowed = 4.0 * mc.stderr + 1e-12 * ex.ratio.abs().max(1.0);
        let pass = gap <= allowed;
        if !pass {
            failures.push(format!("monte carlo {} differs from exact {} by more than 4 stderr", mc.ratio, ex.ratio));
        }
        rows.push(vec![
            Cell::text("agreement"),
            Cell::text("exact_vs_monte_carlo"),
            Cell::Num(allowed),
            Cell::Num(gap),
            Cell::Num(mc.stderr),
            Cell::Num(allowed - gap),
            Cell::Bool(pass),
        ]);
    }
    let doc = ReportDocument::new(
        ReportKind::VerifyReport,
        vec!["method", "approach", "k", "ratio", "stderr", "margin", "pass"],
        rows,
        Metadata::now(Some(args.seed)),
    )?;
    Ok(Outcome::new(doc, failures))
}

pub const LEMMA_SLACK_TOL: f64 = 1e-9;
pub const LEMMA_EQUALITY_TOL: f64 = 1e-12;
pub const LEMMA_GRADIENT_TOL: f64 = 1e-5;
pub const LEMMA_SHARPNESS_TOL: f64 = 1e-2;

pub fn cmd_lemma(r: f64, dim: usize, trials: u64, seed: u64) -> Result<Outcome> {
    let r = RExponent::new(r)?;
    let s = smoothness_suite(r, dim, trials, seed)?;
    let mut checks: Vec<(&str, Cell, Cell, bool)> = vec![
        (
            "min_lower_slack_scaled",
            Cell::Num(s.min_lower_scaled),
            Cell::Num(-LEMMA_SLACK_TOL),
            s.min_lower_scaled >= -LEMMA_SLACK_TOL,
        ),
        (
            "min_upper_slack_scaled",
            Cell::Num(s.min_upper_scaled),
            Cell::Num(-LEMMA_SLACK_TOL),
            s.min_upper_scaled >= -LEMMA_SLACK_TOL,
        ),
    ];
    if s.r == 2.0 {
        checks.push((
            "max_abs_upper_slack_scaled",
            Cell::Num(s.max_abs_upper_scaled),
            Cell::Num(LEMMA_EQUALITY_TOL),
            s.max_abs_upper_scaled <= LEMMA_EQUALITY_TOL,
        ));
    }
    checks.extend([
        (
            "max_dv_rel_err",
            Cell::Num(s.max_dv_rel_err),
            Cell::Num(LEMMA_GRADIENT_TOL),
            s.max_dv_rel_err <= LEMMA_GRADIENT_TOL,
        ),
        (
            "sharpness_gap",
            Cell::Num(s.sharpness_gap),
            Cell::Num(LEMMA_SHARPNESS_TOL),
            s.sharpness_gap <= LEMMA_SHARPNESS_TOL,
        ),
        ("sharpness_monotone", Cell::Bool(s.sharpness_monotone), Cell::Absent, s.sharpness_monotone),
    ]);
    let mut failures = Vec::new();
    let rows = checks
        .into_iter()
        .map(|(name, value, threshold, pass)| {
            if !pass {
                failures.push(format!("{name} = {} violates {}", value.render(), threshold.render()));
            }
            vec![Cell::text(name), value, threshold, Cell::Bool(pass)]
        })
        .collect();
    let doc = ReportDocument::new(
        ReportKind::LemmaReport,
        vec!["metric", "value", "threshold", "pass"],
        rows,
        Metadata::now(Some(seed)),
    )?;
    Ok(Outcome::new(doc, failures))
}

pub fn tail_grid(z_min: f64, z_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(z_min.is_finite() && z_max.is_finite() && step.is_finite()) || step <= 0.0 || z_min > z_max {
        return Err(Error::Domain(format!("invalid grid {z_min}..{z_max} step {step}")));
    }
    let count = ((z_max - z_min) / step + 1e-9).floor() as u64 + 1;
    if count > 10_000_000 {
        return Err(Error::Domain(format!("grid of {count} points is too large")));
    }
    Ok((0..count).map(|i| z_min + i as f64 * step).collect())
}

pub fn cmd_tails(z_min: f64, z_max: f64, step: f64) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for z in tail_grid(z_min, z_max, step)? {
        let t = tail_bounds(z)?;
        if !t.is_ordered() {
            failures.push(format!("ordering fails at z={z}"));
        }
        rows.push(vec![
            Cell::Num(z),
            Cell::Num(t.survival),
            Cell::Num(t.komatsu_lower),
            Cell::Num(t.qi_upper),
            Cell::opt(t.mills),
        ]);
    }
    let doc = ReportDocument::new(
        ReportKind::TailsTable,
        vec!["z", "survival", "komatsu", "qi", "mills"],
        rows,
        Metadata::now(None),
    )?;
    Ok(Outcome::new(doc, failures))
}

pub fn cmd_cd(d: u64, delta: f64) -> Result<Outcome> {
    let b = cd_bounds(d, delta)?;
    let failures = b.violations();
    let row = vec![
        Cell::Int(b.d),
        Cell::Num(b.exact_sq),
        Cell::Num(b.lower_sq),
        Cell::Num(b.lower_t_o),
        Cell::opt(b.upper_simple_sq),
        Cell::opt(b.upper_corrected_sq),
        Cell::opt(b.upper_h3_sq),
        Cell::Num(b.upper_h2_sq),
        Cell::Num(b.upper_type2_sq),
        Cell::Num(b.h1_implicit()),
        Cell::Bool(failures.is_empty()),
    ];
    let doc = ReportDocument::new(
        ReportKind::CdReport,
        vec![
            "d",
            "exact_sq",
            "lower_sq",
            "lower_t_o",
            "upper_simple_sq",
            "upper_corrected_sq",
            "upper_h3_sq",
            "upper_h2_sq",
            "upper_type2_sq",
            "h1_implicit",
            "ordered",
        ],
        vec![row],
        Metadata::now(None),
    )?;
    Ok(Outcome::new(doc, failures))
}
