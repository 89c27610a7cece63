//! Command-line front end.
//!
//! Every invocation writes one JSON document to stdout (or CSV for
//! `table1 --format csv`); progress and errors go to stderr.
//!
//! Exit codes: 0 success, 1 a verification check returned false, 2 usage or
//! input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use crate::construct::{self, IntegerSet};
use crate::optimize::{self, Table, TABLE_EPS};
use crate::ratefn::{self, RateQuery};
use crate::wcount::{self, WParams, DEFAULT_ENUM_CAP};
use crate::Error;

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable overriding the enumeration cap.
pub const ENUM_CAP_ENV: &str = "SUMDIFF_ENUM_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sumdiff",
    version,
    about = "Sum/difference set exponent bounds"
)]
struct Cli {
    /// Report runtimeMillis as 0 so output is reproducible byte for byte.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact size of W(m, L, B).
    Count(WArgs),
    /// List the members of W(m, L, B) in lexicographic order.
    Enumerate(WArgs),
    /// Rate function I(c, B) and the limit log(B+1) - I(c, B).
    Rate {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long = "B")]
        b: u32,
        #[arg(long, default_value_t = ratefn::DEFAULT_TOL)]
        tol: f64,
    },
    /// Build U = g(W(m, L, B)) and report the exact exponent bound.
    Bound {
        #[command(flatten)]
        w: WArgs,
        /// Write U as newline-delimited integers.
        #[arg(long)]
        export_u: Option<PathBuf>,
        #[arg(long)]
        export_sumset: Option<PathBuf>,
        #[arg(long)]
        export_diffset: Option<PathBuf>,
    },
    /// Exhaustively check the counting identities and injectivity on a grid.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long = "max-L", default_value_t = 5)]
        max_l: usize,
        #[arg(long = "max-B", default_value_t = 3)]
        max_b: usize,
        #[arg(long = "min-B", default_value_t = 1)]
        min_b: usize,
        /// Grid for the legacy map f on V(m, L).
        #[arg(long, default_value_t = 3)]
        f_max_m: usize,
        #[arg(long = "f-max-L", default_value_t = 4)]
        f_max_l: usize,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Maximize the bound over r and a for one B.
    Optimize {
        #[arg(long = "B")]
        b: u32,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// Reproduce the grid of optima over B and search tolerances.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = TABLE_EPS.to_vec())]
        eps_list: Vec<f64>,
        #[arg(long = "b-range", default_value = "3..10")]
        b_range: BRange,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, clap::Args)]
struct WArgs {
    #[arg(long)]
    m: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long = "B")]
    b: usize,
    #[arg(long)]
    cap: Option<u64>,
}

impl WArgs {
    fn params(&self) -> WParams {
        WParams::new(self.m, self.l, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BRange {
    lo: u32,
    hi: u32,
}

impl FromStr for BRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
        let lo = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
        let hi = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
        Ok(BRange { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// One JSON emission.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub runtime_millis: u64,
}

enum Outcome {
    Json {
        parameters: Map<String, Value>,
        results: Value,
        ok: bool,
    },
    Text(String),
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

/// Run the CLI with `argv` (including the program name) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };

    let started = Instant::now();
    let name = command_name(&cli.command);
    let outcome = match execute(&cli.command, err) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let runtime_millis = if cli.no_timing {
        0
    } else {
        started.elapsed().as_millis() as u64
    };

    let (text, code) = match outcome {
        Outcome::Text(t) => (t, EXIT_OK),
        Outcome::Json {
            parameters,
            results,
            ok,
        } => {
            let record = OutputRecord {
                schema_version: SCHEMA_VERSION,
                command: name.to_string(),
                parameters,
                results,
                runtime_millis,
            };
            let mut s = serde_json::to_string_pretty(&record).expect("serializable");
            s.push('\n');
            (s, if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    };
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: writing output: {e}");
        return EXIT_USAGE;
    }
    code
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Count(_) => "count",
        Command::Enumerate(_) => "enumerate",
        Command::Rate { .. } => "rate",
        Command::Bound { .. } => "bound",
        Command::Verify { .. } => "verify",
        Command::Optimize { .. } => "optimize",
        Command::Table1 { .. } => "table1",
    }
}

fn enum_cap(explicit: Option<u64>) -> Result<u64, CliError> {
    if let Some(c) = explicit {
        return Ok(c);
    }
    match std::env::var(ENUM_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(ENUM_CAP_ENV, v, "must be a nonnegative integer").into()),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn big(v: impl ToString) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("decimal integer"))
}

fn float(v: f64) -> Value {
    // non-finite values have no JSON number form
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn w_params(p: WParams, cap: u64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("m".into(), json!(p.m));
    m.insert("L".into(), json!(p.l));
    m.insert("B".into(), json!(p.b));
    m.insert("cap".into(), json!(cap));
    m
}

fn export(path: &Option<PathBuf>, set: &IntegerSet) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let io_err = |e| CliError::Io(path.to_path_buf(), e);
    let file = File::create(Path::new(path)).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    set.write_to(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn execute(cmd: &Command, log: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        Command::Count(args) => {
            let p = args.params();
            let c = wcount::count_w(p);
            let mut params = w_params(p, enum_cap(args.cap)?);
            params.remove("cap");
            Ok(Outcome::Json {
                parameters: params,
                results: json!({
                    "count": big(&c.exact),
                    "logCount": float(c.log_value),
                    "effectiveL": p.effective_l(),
                }),
                ok: true,
            })
        }
        Command::Enumerate(args) => {
            let p = args.params();
            let cap = enum_cap(args.cap)?;
            let vectors = wcount::enumerate_w(p, cap)?;
            Ok(Outcome::Json {
                parameters: w_params(p, cap),
                results: json!({ "size": vectors.len(), "vectors": vectors }),
                ok: true,
            })
        }
        Command::Rate { c, b, tol } => {
            let q = RateQuery::new(*c, *b)?;
            let r = ratefn::rate_i(&q, *tol)?;
            let limit = ((*b + 1) as f64).ln() - r.value;
            let mut params = Map::new();
            params.insert("c".into(), float(*c));
            params.insert("B".into(), json!(b));
            params.insert("tol".into(), float(*tol));
            Ok(Outcome::Json {
                parameters: params,
                results: json!({
                    "rate": float(r.value),
                    "logWRateLimit": float(limit),
                    "tStar": to_value(&r.t_star),
                    "iterations": r.iterations,
                    "residual": float(r.residual),
                }),
                ok: true,
            })
        }
        Command::Bound {
            w,
            export_u,
            export_sumset,
            export_diffset,
        } => {
            let p = w.params();
            let cap = enum_cap(w.cap)?;
            let u = construct::build_u(p, cap)?;
            let report = construct::theta_bound_exact(&u)?;
            export(export_u, &u)?;
            if export_sumset.is_some() {
                export(export_sumset, &construct::sumset(&u))?;
            }
            if export_diffset.is_some() {
                export(export_diffset, &construct::diffset(&u))?;
            }
            let max = u.max().cloned().unwrap_or_default();
            let q_bound = construct::max_u_bound(p.m, p.b);
            Ok(Outcome::Json {
                parameters: w_params(p, cap),
                results: json!({
                    "sizeU": u.len(),
                    "maxU": big(&max),
                    "maxUBound": big(&q_bound),
                    "d": big(&report.d),
                    "s": big(&report.s),
                    "q": big(&report.q),
                    "theta": float(report.theta),
                    "sumsetIdentity": big(wcount::count_w(WParams::new(p.m, 2 * p.l, 2 * p.b))),
                    "diffsetConvolution": big(construct::diffset_convolution(p)),
                }),
                ok: true,
            })
        }
        Command::Verify {
            max_m,
            max_l,
            max_b,
            min_b,
            f_max_m,
            f_max_l,
            cap,
        } => verify(
            *max_m,
            *max_l,
            (*min_b).max(1),
            *max_b,
            *f_max_m,
            *f_max_l,
            enum_cap(*cap)?,
            log,
        ),
        Command::Optimize { b, eps } => {
            let rep = optimize::maximize_r(*b, *eps)?;
            let point = optimize::theta_objective(*b, rep.r_star, rep.a_star, optimize::INNER_TOL)?;
            let mut params = Map::new();
            params.insert("B".into(), json!(b));
            params.insert("eps".into(), float(*eps));
            Ok(Outcome::Json {
                parameters: params,
                results: json!({
                    "report": to_value(&rep),
                    "theta": float(rep.theta()),
                    "terms": to_value(&point.terms),
                }),
                ok: true,
            })
        }
        Command::Table1 {
            eps_list,
            b_range,
            format,
        } => {
            let _ = writeln!(
                log,
                "table1: B = {}..{}, {} tolerances",
                b_range.lo,
                b_range.hi,
                eps_list.len()
            );
            let table = optimize::table1(eps_list, b_range.lo, b_range.hi)?;
            match format {
                Format::Csv => Ok(Outcome::Text(table_csv(&table))),
                Format::Json => {
                    let mut params = Map::new();
                    params.insert(
                        "epsList".into(),
                        Value::Array(eps_list.iter().map(|&e| float(e)).collect()),
                    );
                    params.insert("bRange".into(), json!([b_range.lo, b_range.hi]));
                    Ok(Outcome::Json {
                        parameters: params,
                        results: table_json(&table),
                        ok: true,
                    })
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    max_m: usize,
    max_l: usize,
    min_b: usize,
    max_b: usize,
    f_max_m: usize,
    f_max_l: usize,
    cap: u64,
    log: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let mut all_ok = true;
    for m in 0..=max_m {
        for l in 0..=max_l {
            for b in min_b..=max_b {
                let p = WParams::new(m, l, b);
                let u = construct::build_u(p, cap)?;
                let size_ok = construct::u_size_matches(p, &u);
                let sum_ok = construct::verify_sumset_identity(p, cap)?;
                let diff_ok = construct::verify_diffset_identity(p, cap)?;
                let inj = construct::verify_injectivity(p, cap)?;
                let ok = size_ok && sum_ok && diff_ok && inj.holds();
                if !ok {
                    let _ = writeln!(log, "verify: failure at {p}");
                }
                all_ok &= ok;
                checks.push(json!({
                    "m": m, "L": l, "B": b,
                    "sizeU": size_ok,
                    "sumsetIdentity": sum_ok,
                    "diffsetIdentity": diff_ok,
                    "injectiveOnSums": inj.on_sums,
                    "injectiveOnDiffs": inj.on_diffs,
                }));
            }
        }
    }
    let mut f_checks = Vec::new();
    for m in 0..=f_max_m {
        for l in 0..=f_max_l {
            let inj = construct::verify_injectivity_f(m, l, cap)?;
            if !inj.holds() {
                let _ = writeln!(log, "verify: f not injective at m={m}, L={l}");
            }
            all_ok &= inj.holds();
            f_checks.push(json!({
                "m": m, "L": l,
                "injectiveOnSums": inj.on_sums,
                "injectiveOnDiffs": inj.on_diffs,
            }));
        }
    }
    let mut params = Map::new();
    params.insert("maxM".into(), json!(max_m));
    params.insert("maxL".into(), json!(max_l));
    params.insert("minB".into(), json!(min_b));
    params.insert("maxB".into(), json!(max_b));
    params.insert("fMaxM".into(), json!(f_max_m));
    params.insert("fMaxL".into(), json!(f_max_l));
    params.insert("cap".into(), json!(cap));
    Ok(Outcome::Json {
        parameters: params,
        results: json!({
            "allPassed": all_ok,
            "checked": checks.len() + f_checks.len(),
            "g": checks,
            "f": f_checks,
        }),
        ok: all_ok,
    })
}

fn table_json(t: &Table) -> Value {
    let best = t.best_in_column(t.eps_list.len() - 1);
    json!({
        "bValues": t.b_values,
        "epsList": t.eps_list.iter().map(|&e| float(e)).collect::<Vec<_>>(),
        "rows": t.rows.iter().map(|row| row.iter().map(to_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "best": best.map(|b| json!({
            "B": b.b,
            "epsilon": float(b.epsilon),
            "thetaMinus1": float(b.theta_minus_1),
            "theta": float(b.theta()),
        })),
    })
}

/// One row per `B`, one column of `theta - 1` per tolerance.
fn table_csv(t: &Table) -> String {
    let mut s = String::from("B");
    for e in &t.eps_list {
        s.push_str(&format!(",eps={e:e}"));
    }
    s.push('\n');
    for (b, row) in t.b_values.iter().zip(&t.rows) {
        s.push_str(&b.to_string());
        for rep in row {
            s.push_str(&format!(",{}", rep.theta_minus_1));
        }
        s.push('\n');
    }
    s
}
