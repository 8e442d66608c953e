//! Command-line surface.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or domain error.
//! JSON documents always carry `command`, `parameters`, `status`, `cases`,
//! `max_error` and `runtime_ms`.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::laurent::ZFun;
use crate::numerics::{
    gram_matrix, gram_summary, limit16_check, limit17_check, q_sequence, uniform_grid, QuadratureSpec,
};
use crate::operators::{apply_aq, apply_cald, apply_dq, apply_tilde_d, delta_q};
use crate::polynomials::{family, FamilyKind};
use crate::suites::{run_suite, Identity, SuiteConfig};
use crate::spoly::SPoly;
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const LEGEND: &str = "s = q^(1/2)";

#[derive(Parser, Debug)]
#[command(name = "qdiff", version, about = "Exact q-difference operators on q-Hermite polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; `expand` and `apply` default to text, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Report `runtime_ms` as 0 so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print polynomials of a family in x.
    Expand(ExpandArgs),
    /// Apply an operator to a family member.
    Apply(ApplyArgs),
    /// Run an exact identity suite.
    Verify(VerifyArgs),
    /// Tabulate family members on a grid at a rational q.
    Table(TableArgs),
    /// Gram matrix of H_0..H_N under the orthogonality weight.
    Ortho(OrthoArgs),
    /// Deviations along q = 1 - 2^-k approaching 1.
    Limit(LimitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Qhermite,
    Qinv,
    Hermite,
}

impl Family {
    fn kind(self) -> FamilyKind {
        match self {
            Family::Qhermite => FamilyKind::QHermite,
            Family::Qinv => FamilyKind::QInvHermite,
            Family::Hermite => FamilyKind::ClassicalHermite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    /// Averaging operator.
    Aq,
    /// Askey-Wilson divided difference.
    Dq,
    /// Symmetric difference `δ_q`.
    Delta,
    /// The q-Hermite eigen-operator.
    Cald,
    /// Its inverse (shifts swapped).
    CaldInv,
    /// The q⁻¹-Hermite eigen-operator (hyperbolic variable).
    TildeD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Eq16,
    Eq17,
}

/// A rational `q` given exactly as `p/r` or an integer.
#[derive(Clone, Debug, PartialEq)]
pub struct QArg(pub Rational);

impl Serialize for QArg {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

fn parse_q(raw: &str) -> std::result::Result<QArg, String> {
    let t = raw.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(format!("decimal q is not accepted; write it as an exact fraction such as 1/2 (got {t})"));
    }
    let (num, den) = t.split_once('/').unwrap_or((t, "1"));
    let num = num.trim().parse().map_err(|_| format!("malformed rational {t}; expected p/r"))?;
    let den: num_bigint::BigInt = den.trim().parse().map_err(|_| format!("malformed rational {t}; expected p/r"))?;
    if den.is_zero() {
        return Err("denominator of q is zero".into());
    }
    Ok(QArg(Rational::new(num, den)))
}

/// `0 < q < 1`, as required by every numeric command.
fn parse_unit_q(raw: &str) -> std::result::Result<QArg, String> {
    let q = parse_q(raw)?;
    if q.0 <= Rational::zero() || q.0 >= Rational::one() {
        return Err(format!("q must satisfy 0 < q < 1 (got {})", q.0));
    }
    Ok(q)
}

#[derive(Args, Debug, Serialize)]
pub struct ExpandArgs {
    #[arg(long, value_enum, default_value = "qhermite")]
    pub family: Family,
    /// Single degree.
    #[arg(long, conflicts_with = "max_n")]
    pub n: Option<usize>,
    /// All degrees 0..=MAX_N.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Also specialize coefficients at this exact q.
    #[arg(long, value_parser = parse_q)]
    pub q: Option<QArg>,
}

#[derive(Args, Debug, Serialize)]
pub struct ApplyArgs {
    #[arg(long, value_enum)]
    pub op: Operator,
    #[arg(long, value_enum, default_value = "qhermite")]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub identity: Identity,
    /// Highest degree; for the product rule, highest x-degree of each factor.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Number of random pairs (product rule).
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    /// Seed for the random pairs (product rule).
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub mutate: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[arg(long, value_enum, default_value = "qhermite")]
    pub family: Family,
    #[arg(long, value_parser = parse_unit_q)]
    pub q: QArg,
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OrthoArgs {
    #[arg(long, value_parser = parse_unit_q)]
    pub q: QArg,
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_NODES)]
    pub nodes: usize,
    /// Factors kept in the infinite products; default makes the tail below 1e-14.
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_off_diagonal: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_diagonal: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Degree of H_n (eq16) or power of the test monomial (eq17).
    #[arg(long, visible_alias = "m")]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub k_min: u32,
    #[arg(long, default_value_t = 12)]
    pub k_max: u32,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[arg(long, default_value_t = 0.4)]
    pub ratio_lo: f64,
    #[arg(long, default_value_t = 0.6)]
    pub ratio_hi: f64,
}

/// Everything a command produced, before formatting.
struct Outcome {
    ok: bool,
    cases: usize,
    max_error: f64,
    /// Extra top-level JSON fields.
    extra: Map<String, Value>,
    /// CSV rows, header first.
    table: Vec<Vec<String>>,
    text: String,
}

impl Outcome {
    fn new(ok: bool, cases: usize, max_error: f64) -> Self {
        Self { ok, cases, max_error, extra: Map::new(), table: Vec::new(), text: String::new() }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    parameters: Value,
    status: &'a str,
    cases: usize,
    max_error: f64,
    runtime_ms: u64,
    #[serde(flatten)]
    extra: &'a Map<String, Value>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let start = Instant::now();
    let (name, default_format, parameters, result) = match &cli.command {
        Command::Expand(a) => ("expand", Format::Text, to_value(a), expand(a)),
        Command::Apply(a) => ("apply", Format::Text, to_value(a), apply(a)),
        Command::Verify(a) => ("verify", Format::Json, to_value(a), verify(a)),
        Command::Table(a) => ("table", Format::Json, to_value(a), table(a)),
        Command::Ortho(a) => ("ortho", Format::Json, to_value(a), ortho(a)),
        Command::Limit(a) => ("limit", Format::Json, to_value(a), limit(a)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                Error::Domain(_) => EXIT_USAGE,
                _ => EXIT_FAILED,
            };
        }
    };
    let runtime_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let status = if outcome.ok { "verified" } else { "failed" };
    let written = match cli.format.unwrap_or(default_format) {
        Format::Json => {
            let env = Envelope {
                command: name,
                parameters,
                status,
                cases: outcome.cases,
                max_error: outcome.max_error,
                runtime_ms,
                extra: &outcome.extra,
            };
            let doc = serde_json::to_string_pretty(&env).expect("envelope serializes");
            writeln!(out, "{doc}")
        }
        Format::Csv => write_csv(out, &outcome.table),
        Format::Text => write!(out, "{}", outcome.text),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    if outcome.ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("arguments serialize")
}

fn write_csv(out: &mut dyn Write, rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

fn has_odd_s(cs: &[SPoly]) -> bool {
    cs.iter().any(|c| !c.is_q_polynomial())
}

fn expand(a: &ExpandArgs) -> Result<Outcome> {
    let degrees: Vec<usize> = match (a.n, a.max_n) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (0..=m).collect(),
        (None, None) => return Err(Error::Domain("expand needs --n or --max-n".into())),
    };
    let fam = family(a.family.kind());
    let polys: Vec<_> = degrees.iter().map(|&n| (n, fam.get(n))).collect();
    let legend = polys.iter().any(|(_, p)| has_odd_s(p.coeffs()));

    let mut out = Outcome::new(true, polys.len(), 0.0);
    let mut cases = Vec::new();
    out.table.push(vec!["n".into(), "k".into(), "coefficient".into(), "value_at_q".into()]);
    for (n, p) in &polys {
        let at_q = match &a.q {
            Some(q) => Some(p.specialize_q(&q.0)?),
            None => None,
        };
        let mut case = json!({
            "n": n,
            "polynomial": p.to_string(),
            "coefficients": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        });
        if let Some(vals) = &at_q {
            case["at_q"] = json!(vals.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        }
        cases.push(case);
        for (k, c) in p.coeffs().iter().enumerate() {
            let v = at_q.as_ref().map(|v| v[k].to_string()).unwrap_or_default();
            out.table.push(vec![n.to_string(), k.to_string(), c.to_string(), v]);
        }
        if a.n.is_some() {
            out.text.push_str(&format!("{p}\n"));
        } else {
            out.text.push_str(&format!("n={n}: {p}\n"));
        }
        if let Some(vals) = &at_q {
            let specialized = crate::polynomials::xpoly_from_rationals(p.kind(), vals);
            out.text.push_str(&format!("  at q = {}: {specialized}\n", a.q.as_ref().unwrap().0));
        }
    }
    if legend {
        out.text.push_str(&format!("where {LEGEND}\n"));
        out.extra.insert("legend".into(), json!(LEGEND));
    }
    out.extra.insert("results".into(), Value::Array(cases));
    Ok(out)
}

fn apply(a: &ApplyArgs) -> Result<Outcome> {
    let hyperbolic_op = a.op == Operator::TildeD;
    if hyperbolic_op != (a.family == Family::Qinv) {
        return Err(Error::Domain(format!(
            "operator {:?} does not act on the {:?} family's variable",
            a.op, a.family
        )));
    }
    let f = family(a.family.kind()).get(a.n).to_z();
    let image = match a.op {
        Operator::Aq => apply_aq(&f),
        Operator::Dq => apply_dq(&f)?,
        Operator::Delta => delta_q(&f),
        Operator::Cald => apply_cald(&f, false)?,
        Operator::CaldInv => apply_cald(&f, true)?,
        Operator::TildeD => apply_tilde_d(&f)?,
    };
    let rendered = render_zfun(&image);
    let eigen = eigenvalue(&f, &image);

    let mut out = Outcome::new(true, 1, 0.0);
    out.text = format!("{}\n", rendered.0);
    out.table.push(vec!["result".into(), "eigenvalue".into()]);
    out.table.push(vec![rendered.0.clone(), eigen.as_ref().map(|e| e.to_string()).unwrap_or_default()]);
    out.extra.insert("result".into(), json!(rendered.0));
    out.extra.insert("eigenvalue".into(), json!(eigen.as_ref().map(|e| e.to_string())));
    let mut legend = rendered.1;
    if let Some(e) = &eigen {
        out.text.push_str(&format!("eigenvalue: {e}\n"));
        legend |= !e.is_q_polynomial();
    }
    if legend {
        out.text.push_str(&format!("where {LEGEND}\n"));
        out.extra.insert("legend".into(), json!(LEGEND));
    }
    Ok(out)
}

/// In x when the image is symmetric, otherwise in the Laurent variable.
fn render_zfun(g: &ZFun) -> (String, bool) {
    match g.to_x() {
        Ok(p) => (p.to_string(), has_odd_s(p.coeffs())),
        Err(_) => {
            let odd = g.terms().any(|(_, c)| !c.is_q_polynomial());
            (g.to_string(), odd)
        }
    }
}

/// `λ` with `g = λ f`, if there is one.
fn eigenvalue(f: &ZFun, g: &ZFun) -> Option<SPoly> {
    let top = f.max_exp()?;
    let lambda = g.coeff(top).exact_div(&f.coeff(top)).ok()?;
    (&f.scale(&lambda) == g).then_some(lambda)
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let default_max = match a.identity {
        Identity::ProductRule => 8,
        Identity::Eq15 | Identity::GenfunH => 12,
        _ => 20,
    };
    let cfg = SuiteConfig { max_n: a.max_n.unwrap_or(default_max), mutate: a.mutate, cases: a.cases, seed: a.seed };
    let reports = run_suite(a.identity, &cfg)?;
    let ok = reports.iter().all(|r| r.verified);
    let max_error = reports.iter().map(|r| r.residual.max_abs_coeff()).fold(0.0, f64::max);

    let mut out = Outcome::new(ok, reports.len(), max_error);
    let first = reports.iter().find(|r| !r.verified);
    out.extra.insert("first_failure".into(), to_value(&first));
    out.extra.insert("results".into(), to_value(&reports));
    out.table.push(vec!["name".into(), "n".into(), "verified".into(), "residual".into()]);
    for r in &reports {
        out.table.push(vec![r.name.clone(), r.input_n.to_string(), r.verified.to_string(), r.residual.to_string()]);
    }
    let passed = reports.iter().filter(|r| r.verified).count();
    out.text = format!("{}: {passed}/{} verified\n", a.identity.name(), reports.len());
    if let Some(r) = first {
        out.text.push_str(&format!("first failure at n={}: residual {}\n", r.input_n, r.residual));
    }
    Ok(out)
}

fn eval_horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn table(a: &TableArgs) -> Result<Outcome> {
    let fam = family(a.family.kind());
    let grid = uniform_grid(a.lo, a.hi, a.points);
    let polys: Vec<Vec<f64>> = (0..=a.max_n)
        .map(|n| {
            let exact = fam.get(n).specialize_q(&a.q.0)?;
            Ok(exact.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .map(|&x| std::iter::once(x).chain(polys.iter().map(|p| eval_horner(p, x))).collect())
        .collect();
    let columns: Vec<String> = std::iter::once("x".to_string()).chain((0..=a.max_n).map(|n| format!("p{n}"))).collect();

    let mut out = Outcome::new(true, rows.len(), 0.0);
    out.extra.insert("columns".into(), json!(columns));
    out.extra.insert("rows".into(), json!(rows));
    out.table.push(columns.clone());
    out.text = columns.join("\t") + "\n";
    for r in &rows {
        out.table.push(r.iter().map(|v| fmt_f64(*v)).collect());
        out.text.push_str(&r.iter().map(|v| format!("{v:.12}")).collect::<Vec<_>>().join("\t"));
        out.text.push('\n');
    }
    Ok(out)
}

fn ortho(a: &OrthoArgs) -> Result<Outcome> {
    let spec = match a.truncation {
        Some(t) => QuadratureSpec::with_truncation(a.nodes, a.q.0.clone(), t)?,
        None => QuadratureSpec::new(a.nodes, a.q.0.clone())?,
    };
    let gram = gram_matrix(a.max_n, &spec)?;
    let summary = gram_summary(&gram, spec.q())?;
    let ok = summary.max_off_diagonal < a.tol_off_diagonal && summary.max_diagonal_rel_error < a.tol_diagonal;
    let max_error = summary.max_off_diagonal.max(summary.max_diagonal_rel_error);

    let mut out = Outcome::new(ok, gram.len() * gram.len(), max_error);
    out.extra.insert(
        "metadata".into(),
        json!({
            "q": spec.q_value.to_string(),
            "nodes": spec.node_count,
            "truncation": spec.weight_truncation,
            "max_off_diagonal": summary.max_off_diagonal,
            "max_diagonal_rel_error": summary.max_diagonal_rel_error,
        }),
    );
    out.extra.insert("matrix".into(), json!(gram));
    out.table.push((0..gram.len()).map(|n| format!("n{n}")).collect());
    for row in &gram {
        out.table.push(row.iter().map(|v| fmt_f64(*v)).collect());
    }
    out.text = format!(
        "q = {}, nodes = {}, truncation = {}\nmax off-diagonal = {:e}\nmax diagonal relative error = {:e}\n",
        spec.q_value, spec.node_count, spec.weight_truncation, summary.max_off_diagonal, summary.max_diagonal_rel_error
    );
    for row in &gram {
        out.text.push_str(&row.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(" "));
        out.text.push('\n');
    }
    Ok(out)
}

fn limit(a: &LimitArgs) -> Result<Outcome> {
    if a.k_min > a.k_max || a.k_max > 60 {
        return Err(Error::Domain(format!("need k_min <= k_max <= 60, got {}..{}", a.k_min, a.k_max)));
    }
    if a.points == 0 || !(a.lo.is_finite() && a.hi.is_finite()) {
        return Err(Error::Domain("grid needs finite bounds and at least one point".into()));
    }
    let qs = q_sequence(a.k_min, a.k_max);
    let grid = uniform_grid(a.lo, a.hi, a.points);
    let report = match a.which {
        Which::Eq16 => limit16_check(a.n, &qs, &grid)?,
        Which::Eq17 => limit17_check(a.n, &qs, &grid)?,
    };
    let ok = report.converges_first_order(a.ratio_lo, a.ratio_hi);
    // A ratio is undefined once the deviation has collapsed to zero.
    let ratios: Vec<Option<f64>> = report.deviations.windows(2).map(|w| (w[0] != 0.0).then(|| w[1] / w[0])).collect();
    let max_error = report.deviations.iter().copied().fold(0.0, f64::max);

    let mut out = Outcome::new(ok, report.deviations.len(), max_error);
    out.extra.insert("q_sequence".into(), json!(report.q_sequence.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
    out.extra.insert("deviations".into(), json!(report.deviations));
    out.extra.insert("ratios".into(), json!(ratios));
    out.extra.insert("exact_zero".into(), json!(report.is_exact_zero()));
    out.table.push(vec!["k".into(), "q".into(), "deviation".into(), "ratio".into()]);
    out.text = "k\tq\tdeviation\tratio\n".into();
    for (i, (q, d)) in report.q_sequence.iter().zip(&report.deviations).enumerate() {
        let k = a.k_min + i as u32;
        let ratio = match i.checked_sub(1).and_then(|j| ratios[j]) {
            Some(r) => format!("{r:.6}"),
            None => String::new(),
        };
        out.table.push(vec![k.to_string(), q.to_string(), fmt_f64(*d), ratio.clone()]);
        out.text.push_str(&format!("{k}\t{q}\t{d:e}\t{ratio}\n"));
    }
    Ok(out)
}
