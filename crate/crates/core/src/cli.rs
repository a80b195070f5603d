//! The `curvecount` command line.
//!
//! Three subcommands:
//!
//! * `compute` evaluates a final count over a degree range and prints one
//!   [`OutputRecord`] (JSON) or one CSV row per degree.
//! * `verify` runs the closed-form checks, the coefficient cross-check and
//!   the recursion invariants.
//! * `coeffs` prints derived against tabulated recursion coefficients.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::basecases::{consistency_check, BaseTable, Check};
use crate::deriver::{crosscheck_all, RuleCheck};
use crate::error::Error;
use crate::exactpoly::Polynomial;
use crate::recursion::{invariant_checks, Evaluator, Sing, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Default base-table location, relative to the working directory.
pub const DEFAULT_BASE: &str = "data/basecases.json";

/// Largest degree accepted by `compute`. Values stay well inside `i128`.
pub const MAX_D: i64 = 1_000_000;

/// One `compute` result in JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub target: String,
    pub n: u32,
    pub closed_form: Polynomial,
    pub values: BTreeMap<i64, i128>,
    pub valid_from_d: u32,
    pub base_table_fingerprint: String,
}

impl OutputRecord {
    /// True when every stored value is the closed form evaluated exactly.
    pub fn is_consistent(&self) -> bool {
        self.values
            .iter()
            .all(|(&d, &v)| self.closed_form.eval_to_int(d) == Some(v.into()))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "curvecount",
    version,
    about = "Counts of plane curves with a node and one further singularity"
)]
struct Cli {
    /// Base-case table (JSON). Defaults to data/basecases.json, then the built-in table.
    #[arg(long, global = true, env = "CURVECOUNT_BASE", value_name = "PATH")]
    base: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate N(A1 X, n) over a range of degrees.
    Compute(ComputeArgs),
    /// Run every consistency check and report.
    Verify(VerifyArgs),
    /// Show derived against tabulated recursion coefficients.
    Coeffs(CoeffsArgs),
}

#[derive(Args, Debug)]
struct ComputeArgs {
    /// Second singularity: A1..A6, D4, D5, D6 or E6.
    #[arg(long)]
    sing: Sing,

    /// Number of generic lines the first singular point lies on.
    #[arg(long)]
    n: u32,

    /// A single degree.
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_D),
          conflicts_with_all = ["dmin", "dmax"], required_unless_present_all = ["dmin", "dmax"])]
    d: Option<i64>,

    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_D), requires = "dmax")]
    dmin: Option<i64>,

    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=MAX_D), requires = "dmin")]
    dmax: Option<i64>,

    /// Count binodal curves without ordering the nodes (A1, n = 0 only).
    #[arg(long)]
    unordered: bool,

    /// Refuse degrees below the validity bound.
    #[arg(long)]
    enforce_bounds: bool,

    /// JSON-lines output (the default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,

    /// CSV output, one row per degree.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run a single group of checks.
    #[arg(long, value_enum)]
    only: Option<Group>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Group {
    Appendix,
    Coeffs,
    Identities,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long)]
    json: bool,
}

/// Runs the command line with stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line against arbitrary writers.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => load_base(cli.base.as_deref()).and_then(|b| compute(&b, a, out)),
        Command::Verify(a) => load_base(cli.base.as_deref()).and_then(|b| verify(&b, a, out)),
        Command::Coeffs(a) => coeffs(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidKey(_) | Error::BelowBound { .. } => EXIT_USAGE,
                _ => EXIT_DATA,
            }
        }
    }
}

enum Failure {
    Usage(String),
    Data(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure::Io(e.into())
    }
}

fn load_base(path: Option<&Path>) -> Result<BaseTable, Failure> {
    match path {
        Some(p) => Ok(BaseTable::load(p)?),
        None if Path::new(DEFAULT_BASE).exists() => Ok(BaseTable::load(DEFAULT_BASE)?),
        None => Ok(BaseTable::shipped()),
    }
}

fn compute(base: &BaseTable, a: &ComputeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (lo, hi) = match (a.d, a.dmin, a.dmax) {
        (Some(d), _, _) => (d, d),
        (None, Some(lo), Some(hi)) if lo <= hi => (lo, hi),
        (None, Some(lo), Some(hi)) => {
            return Err(Failure::Usage(format!("--dmin {lo} exceeds --dmax {hi}")))
        }
        _ => return Err(Failure::Usage("give --d or both --dmin and --dmax".into())),
    };
    if a.unordered && (a.sing != Sing::A1 || a.n != 0) {
        return Err(Failure::Usage(
            "--unordered applies to --sing A1 --n 0 only".into(),
        ));
    }

    let mut ev = Evaluator::new(base);
    let fc = ev.final_count(a.sing, a.n)?;
    let (target, poly) = if a.unordered {
        (
            format!("{}-unordered", a.sing.pair_label()),
            ev.unordered_binodal(0)?,
        )
    } else {
        (a.sing.pair_label(), fc.poly)
    };
    if a.enforce_bounds && lo < i64::from(fc.min_valid_d) {
        return Err(Error::BelowBound {
            target,
            d: lo,
            bound: fc.min_valid_d,
        }
        .into());
    }

    let mut values = BTreeMap::new();
    for d in lo..=hi {
        let v = poly.eval_to_int(d).ok_or_else(|| Error::NonExactDivision {
            context: format!("{target} at d={d}"),
            poly: poly.clone(),
            divisor: 1,
        })?;
        let v = v
            .to_i128()
            .ok_or_else(|| Failure::Usage(format!("value at d={d} overflows")))?;
        values.insert(d, v);
    }
    let record = OutputRecord {
        target,
        n: a.n,
        closed_form: poly,
        values,
        valid_from_d: fc.min_valid_d,
        base_table_fingerprint: base.fingerprint(),
    };

    if a.csv {
        writeln!(out, "target,n,d,value,valid_from_d,fingerprint")?;
        for (d, v) in &record.values {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                record.target, record.n, d, v, record.valid_from_d, record.base_table_fingerprint
            )?;
        }
    } else {
        serde_json::to_writer(&mut *out, &record)?;
        writeln!(out)?;
    }
    Ok(EXIT_OK)
}

fn print_checks(out: &mut dyn Write, checks: &[Check]) -> io::Result<()> {
    for c in checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        writeln!(out, "{mark} {}: {}", c.name, c.detail)?;
    }
    Ok(())
}

fn verify(base: &BaseTable, a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let wants = |g: Group| a.only.map_or(true, |o| o == g);
    let mut summary = vec![];
    let mut ok = true;

    let report = consistency_check(base);
    if wants(Group::Appendix) {
        let forms: Vec<Check> = report
            .checks
            .iter()
            .filter(|c| c.name.starts_with("closed form"))
            .cloned()
            .collect();
        print_checks(out, &forms)?;
        let (p, t) = report.closed_form_score();
        ok &= p == t;
        summary.push(format!("appendix: {p}/{t}"));
    }
    if wants(Group::Coeffs) {
        let cc = crosscheck_all();
        for row in &cc.rows {
            write_coeff_row(out, row)?;
        }
        let (p, t) = cc.score();
        ok &= cc.passed();
        summary.push(format!("coeffs: {p}/{t}"));
    }
    if wants(Group::Identities) {
        let mut checks: Vec<Check> = report
            .checks
            .iter()
            .filter(|c| !c.name.starts_with("closed form"))
            .cloned()
            .collect();
        checks.extend(invariant_checks(base));
        print_checks(out, &checks)?;
        let pass = checks.iter().all(|c| c.passed);
        ok &= pass;
        summary.push(format!(
            "identities: {}",
            if pass { "pass" } else { "FAIL" }
        ));
    }
    writeln!(out, "{}", summary.join(", "))?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn write_coeff_row(out: &mut dyn Write, row: &RuleCheck) -> io::Result<()> {
    let mark = if row.passed { "✓" } else { "✗" };
    let rel = if row.passed { "=" } else { "≠" };
    write!(
        out,
        "{}: derived {} {rel} rule {} {mark}",
        row.label,
        RuleCheck::render(&row.derived),
        RuleCheck::render(&row.table)
    )?;
    if !row.note.is_empty() {
        write!(out, " ({})", row.note)?;
    }
    writeln!(out)
}

#[derive(Serialize)]
struct JsonTerm {
    dn: u32,
    dm: i32,
    coeff: Polynomial,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    rule: &'a str,
    mode: Option<String>,
    derived: Vec<JsonTerm>,
    table: Vec<JsonTerm>,
    passed: bool,
    note: &'a str,
}

fn json_terms(terms: &[Term]) -> Vec<JsonTerm> {
    terms
        .iter()
        .map(|t| JsonTerm {
            dn: t.dn,
            dm: t.dm,
            coeff: t.coeff.clone(),
        })
        .collect()
}

fn coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let cc = crosscheck_all();
    for row in &cc.rows {
        if a.json {
            let j = JsonRow {
                rule: row.label,
                mode: row.mode.map(|m| m.to_string()),
                derived: json_terms(&row.derived),
                table: json_terms(&row.table),
                passed: row.passed,
                note: &row.note,
            };
            serde_json::to_writer(&mut *out, &j)?;
            writeln!(out)?;
        } else {
            write_coeff_row(out, row)?;
        }
    }
    Ok(if cc.passed() { EXIT_OK } else { EXIT_VERIFY })
}
